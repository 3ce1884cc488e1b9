#include "collapse/rates.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "collapse/units.hpp"

namespace collapse {

namespace {

// Four-term subtracted combination for one (i,j) pair:
// Idiff(r_i^1 - r_j^2) + Idiff(r_i^2 - r_j^1) - Idiff(r_i^1 - r_j^1) - Idiff(r_i^2 - r_j^2)
//
// Evaluations are cached by distance; symmetric geometries hit the cache
// heavily.
struct KernelCache {
  const std::function<double(double, double)>& idiff;
  double t;
  std::map<double, double> values;

  double operator()(double r) {
    if (r == 0.0) return 0.0;
    auto it = values.find(r);
    if (it != values.end()) return it->second;
    const double v = idiff(r, t);
    values.emplace(r, v);
    return v;
  }
};

}  // namespace

RateResult gamma_pair_kernel(const std::function<double(double, double)>& idiff,
                             double gamma_coupling, const ParticleGroup& g1,
                             const ParticleGroup& g2, double t, bool keep_breakdown) {
  validate(g1);
  validate(g2);
  if (!same_couplings(g1, g2))
    throw ConfigError("gamma_pair: groups must share couplings");
  if (t < 0.0) throw DomainError("gamma_pair: t must be >= 0");

  KernelCache cache{idiff, t, {}};
  const std::size_t n = g1.size();
  RateResult out;
  out.t = t;
  if (keep_breakdown) out.breakdown.resize(n * n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double cross = cache(distance(g1.positions[i], g2.positions[j])) +
                           cache(distance(g2.positions[i], g1.positions[j]));
      const double direct = cache(distance(g1.positions[i], g1.positions[j])) +
                            cache(distance(g2.positions[i], g2.positions[j]));
      const double c = gamma_coupling * g1.couplings[i] * g1.couplings[j] * (cross - direct);
      if (keep_breakdown) out.breakdown[i * n + j] = c;
      sum += c;
    }
  }
  out.gamma = sum;
  return out;
}

RateResult gamma_pair(const NoiseModel& model, const ParticleGroup& g1,
                      const ParticleGroup& g2, double t, const RateOptions& opts) {
  validate(model);
  double far_radius = std::numeric_limits<double>::infinity();
  double far_value = 0.0;
  if (opts.far_field_cutoff) {
    if (std::holds_alternative<Unparticle>(model))
      throw ConfigError(
          "far_field_cutoff: unparticle I_diff has no finite large-r asymptote");
    far_radius = opts.cutoff_radii * correlation_length(model);
    far_value = corr_I_diff(model, std::numeric_limits<double>::infinity(), t, opts.quad);
  }
  auto idiff = [&](double r, double tt) {
    if (r > far_radius) return far_value;
    return corr_I_diff(model, r, tt, opts.quad);
  };
  return gamma_pair_kernel(idiff, coupling(model), g1, g2, t, opts.keep_breakdown);
}

RateResult gamma_lm(const NoiseModel& model, const SuperpositionConfig& config,
                    std::size_t L, std::size_t M, double t, const RateOptions& opts) {
  validate(config);
  if (L >= config.branches() || M >= config.branches())
    throw ConfigError("gamma_lm: branch index out of range");
  if (L == M) {
    RateResult r;
    r.t = t;
    return r;
  }
  return gamma_pair(model, config.groups[L], config.groups[M], t, opts);
}

double offdiag_decay(const NoiseModel& model, const ParticleGroup& g1,
                     const ParticleGroup& g2, double t, const RateOptions& opts) {
  return std::exp(-gamma_pair(model, g1, g2, t, opts).gamma);
}

ReductionBounds reduction_bounds(double gamma, double e0) {
  if (!(gamma >= 0.0)) throw DomainError("reduction_bounds: Gamma must be >= 0");
  if (!(e0 >= 0.0 && e0 <= 0.25))
    throw DomainError("reduction_bounds: e0 must lie in [0, 1/4] (p1 p2 <= 1/4)");
  ReductionBounds b;
  b.lower = e0 * std::exp(-2.0 * gamma);
  b.upper = e0 / (1.0 + 8.0 * e0 * gamma);
  return b;
}

bool rate_integrand_positive(const NoiseModel& model, const ParticleGroup& g1,
                             const ParticleGroup& g2, double t, int samples,
                             const QuadratureSpec& spec) {
  if (samples < 1) throw ConfigError("rate_integrand_positive: samples must be >= 1");
  const std::size_t n = g1.size();
  double scale = 0.0;
  for (int s = 1; s <= samples; ++s) {
    const double ts = t * static_cast<double>(s) / static_cast<double>(samples);
    KernelCache cache{
        [&](double r, double tt) { return corr_F_diff(model, r, tt, spec); }, ts, {}};
    double val = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double mm = g1.couplings[i] * g1.couplings[j];
        val += mm * (cache(distance(g1.positions[i], g2.positions[j])) +
                     cache(distance(g2.positions[i], g1.positions[j])) -
                     cache(distance(g1.positions[i], g1.positions[j])) -
                     cache(distance(g2.positions[i], g2.positions[j])));
        scale = std::max(scale, std::abs(val));
      }
    }
    if (val < -1e-12 * scale) return false;
  }
  return true;
}

CslMatch csl_matching(const NoiseModel& model) {
  double mu, temperature, zeta, gamma;
  if (const auto* th = std::get_if<Thermal>(&model)) {
    mu = th->mu;
    temperature = th->temperature;
    zeta = th->zeta;
    gamma = th->gamma;
  } else if (const auto* dl = std::get_if<DiluteNr>(&model)) {
    mu = dl->mu;
    temperature = dl->temperature;
    zeta = dl->zeta;
    gamma = dl->gamma;
  } else {
    throw ConfigError("csl_matching: requires a Thermal or DiluteNr model");
  }
  CslMatch m;
  m.r_c_equiv = 1.0 / std::sqrt(2.0 * mu * temperature);
  const double mn = units::nucleon_mass;
  m.rate_product =
      2.0 * gamma * mn * mn * std::exp(-(mu - zeta) / temperature) / (mu * mu * mu);
  return m;
}

}  // namespace collapse
