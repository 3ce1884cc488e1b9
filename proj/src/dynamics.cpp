#include "collapse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "collapse/correlators.hpp"
#include "collapse/rng.hpp"

namespace collapse {

namespace {

// distance-keyed cache for kernel evaluations shared across matrix entries
class DistCache {
 public:
  DistCache(std::function<double(double)> f) : f_(std::move(f)) {}
  double operator()(double r) {
    auto it = vals_.find(r);
    if (it != vals_.end()) return it->second;
    const double v = f_(r);
    vals_.emplace(r, v);
    return v;
  }

 private:
  std::function<double(double)> f_;
  std::map<double, double> vals_;
};

}  // namespace

void EnsembleSpec::validate() const {
  if (n_traj == 0) throw ConfigError("EnsembleSpec: n_traj must be > 0");
  if (output_times.empty()) throw ConfigError("EnsembleSpec: no output times");
  double prev = -1.0;
  for (double t : output_times) {
    if (!(t >= 0.0)) throw ConfigError("EnsembleSpec: times must be >= 0");
    if (!(t > prev)) throw ConfigError("EnsembleSpec: times must be strictly increasing");
    prev = t;
  }
  if (threads < 1) throw ConfigError("EnsembleSpec: threads must be >= 1");
}

SymMatrix covariance_matrix(const NoiseModel& model, const SuperpositionConfig& config,
                            double t, const QuadratureSpec& spec) {
  validate(config);
  const std::size_t n = config.branches();
  const auto& m0 = config.groups[0].couplings;
  DistCache icache([&](double r) { return corr_I(model, r, t, spec); });
  SymMatrix cov(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < m0.size(); ++i)
        for (std::size_t j = 0; j < m0.size(); ++j)
          s += m0[i] * m0[j] *
               icache(distance(config.groups[a].positions[i], config.groups[b].positions[j]));
      cov(a, b) = 2.0 * s;
      cov(b, a) = cov(a, b);
    }
  }
  return cov;
}

void check_psd(const SymMatrix& cov) {
  const auto ev = sym_eigenvalues(cov);
  const double tr = cov.trace();
  if (!ev.empty() && ev.front() < -1e-10 * std::max(tr, 0.0)) {
    throw PsdError("covariance matrix not PSD: min eigenvalue " +
                   std::to_string(ev.front()) + " vs trace " + std::to_string(tr) +
                   " (invalid correlator or quadrature failure)");
  }
}

TrajectoryBatch sample_reduction_ensemble(const NoiseModel& model,
                                          const SuperpositionConfig& config,
                                          const EnsembleSpec& spec,
                                          const QuadratureSpec& quad) {
  validate(model);
  validate(config);
  spec.validate();
  const std::size_t nb = config.branches();
  const double gamma = coupling(model);
  const double sqrt_gamma = std::sqrt(gamma);

  // per-time Cholesky factors, branch norm subtractions, and the tilt
  // shifts of the physical mixture (branch J tilts the mean by
  // 2 sqrt(gamma) * C e_J)
  struct TimeSetup {
    SymMatrix lower;
    std::vector<double> c;      // c_J = 2 gamma C_JJ
    std::vector<double> shift;  // shift[J * nb + k] = 2 sqrt(gamma) C(k, J)
  };
  std::vector<TimeSetup> setups;
  setups.reserve(spec.output_times.size());
  for (double t : spec.output_times) {
    SymMatrix cov = covariance_matrix(model, config, t, quad);
    check_psd(cov);
    TimeSetup ts;
    const double jitter = 1e-12 * std::max(cov.trace(), 0.0);
    if (!cholesky_jittered(cov, ts.lower, jitter))
      throw PsdError("covariance Cholesky failed beyond the jitter allowance at t = " +
                     std::to_string(t));
    ts.c.resize(nb);
    for (std::size_t j = 0; j < nb; ++j) ts.c[j] = 2.0 * gamma * cov(j, j);
    ts.shift.resize(nb * nb);
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        ts.shift[j * nb + k] = 2.0 * sqrt_gamma * cov(k, j);
    setups.push_back(std::move(ts));
  }
  const bool mixture = spec.sampling == Sampling::PhysicalMixture;

  const std::size_t nt = spec.output_times.size();
  const std::size_t n = spec.n_traj;
  // per-trajectory storage: w * p_J per branch, w, and w * p0 p1
  std::vector<double> wp(n * nt * nb), w(n * nt), wpair(n * nt);
  std::vector<double> probs;
  if (spec.keep_trajectories) probs.resize(n * nt * nb);

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> z(nb), psi(nb), ell(nb), logp0(nb);
    for (std::size_t j = 0; j < nb; ++j)
      logp0[j] = config.probabilities[j] > 0.0 ? std::log(config.probabilities[j])
                                               : -std::numeric_limits<double>::infinity();
    for (std::size_t traj = lo; traj < hi; ++traj) {
      SplitRng rng(spec.seed, traj);
      for (std::size_t m = 0; m < nt; ++m) {
        const auto& ts = setups[m];
        std::size_t tilt = 0;
        if (mixture) {
          // branch label with Born weight p_J(0)
          const double u = rng.uniform();
          double acc = 0.0;
          for (std::size_t j = 0; j < nb; ++j) {
            acc += config.probabilities[j];
            if (u <= acc || j + 1 == nb) {
              tilt = j;
              break;
            }
          }
        }
        for (std::size_t j = 0; j < nb; ++j) z[j] = rng.normal();
        for (std::size_t j = 0; j < nb; ++j) {
          double s = mixture ? ts.shift[tilt * nb + j] : 0.0;
          for (std::size_t k = 0; k <= j; ++k) s += ts.lower(j, k) * z[k];
          psi[j] = s;
        }
        double lmax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nb; ++j) {
          ell[j] = logp0[j] + 2.0 * sqrt_gamma * psi[j] - ts.c[j];
          lmax = std::max(lmax, ell[j]);
        }
        double S = 0.0;
        for (std::size_t j = 0; j < nb; ++j) S += std::exp(ell[j] - lmax);
        const double logw = lmax + std::log(S);
        const std::size_t base = (traj * nt + m) * nb;
        const double p0 = std::exp(ell[0] - lmax) / S;
        const double p1 = std::exp(ell[1] - lmax) / S;
        if (mixture) {
          // unweighted: the sampling measure is already the physical one
          for (std::size_t j = 0; j < nb; ++j) wp[base + j] = std::exp(ell[j] - lmax) / S;
          wpair[traj * nt + m] = p0 * p1;
        } else {
          // w * p_J(t) = exp(ell_J) exactly; the softmax denominator cancels
          for (std::size_t j = 0; j < nb; ++j) wp[base + j] = std::exp(ell[j]);
          wpair[traj * nt + m] = std::exp(logw) * p0 * p1;
        }
        w[traj * nt + m] = std::exp(logw);
        if (spec.keep_trajectories)
          for (std::size_t j = 0; j < nb; ++j)
            probs[base + j] = std::exp(ell[j] - lmax) / S;
      }
    }
  };

  const int nthreads = std::max(1, spec.threads);
  if (nthreads == 1) {
    run_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (int k = 0; k < nthreads; ++k) {
      const std::size_t lo = std::min(n, static_cast<std::size_t>(k) * chunk);
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // fixed-order reduction over trajectory index: results do not depend on
  // the worker count
  auto summarize = [n](auto&& value_at) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += value_at(i);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = value_at(i) - mean;
      ss += d * d;
    }
    MeanStderr r;
    r.mean = mean;
    r.stderr_ = n > 1 ? std::sqrt(ss / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)))
                      : 0.0;
    return r;
  };

  TrajectoryBatch batch;
  batch.n_traj = n;
  batch.seed = spec.seed;
  batch.slices.resize(nt);
  for (std::size_t m = 0; m < nt; ++m) {
    TimeSlice& sl = batch.slices[m];
    sl.t = spec.output_times[m];
    sl.p.resize(nb);
    for (std::size_t j = 0; j < nb; ++j)
      sl.p[j] = summarize([&](std::size_t i) { return wp[(i * nt + m) * nb + j]; });
    sl.pair01 = summarize([&](std::size_t i) { return wpair[i * nt + m]; });
    sl.weight = summarize([&](std::size_t i) { return w[i * nt + m]; });
    if (spec.keep_trajectories) {
      sl.probs.resize(n * nb);
      sl.weights.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        sl.weights[i] = w[i * nt + m];
        for (std::size_t j = 0; j < nb; ++j) sl.probs[i * nb + j] = probs[(i * nt + m) * nb + j];
      }
    }
  }
  return batch;
}

double expected_p1p2_closed(double gamma, double p1, double p2, const QuadratureSpec& spec) {
  if (!(gamma >= 0.0)) throw DomainError("expected_p1p2_closed: Gamma must be >= 0");
  if (std::abs(p1 + p2 - 1.0) > 1e-12)
    throw DomainError("expected_p1p2_closed: p1 + p2 must equal 1");
  if (!(p1 >= 0.0 && p2 >= 0.0))
    throw DomainError("expected_p1p2_closed: probabilities must be >= 0");
  if (gamma == 0.0 || p1 == 0.0 || p2 == 0.0) return p1 * p2;
  const double a = 2.0 * std::sqrt(gamma);
  // e^{-u^2} / (p1 e^{au} + p2 e^{-au}), folded onto u >= 0, log-domain
  auto integrand = [&](double u) {
    auto side = [&](double uu) {
      const double x = a * uu;
      if (x >= 0.0) return std::exp(-uu * uu - x) / (p1 + p2 * std::exp(-2.0 * x));
      return std::exp(-uu * uu + x) / (p1 * std::exp(2.0 * x) + p2);
    };
    return side(u) + side(-u);
  };
  auto r = integrate_semi_infinite(integrand, spec);
  if (!r.converged) throw ConvergenceError("expected_p1p2_closed: quadrature unconverged");
  return p1 * p2 * std::exp(-gamma) * r.value / std::sqrt(std::numbers::pi);
}

SymMatrix fp_diffusion_matrix(const NoiseModel& model, const SuperpositionConfig& config,
                              double t, const QuadratureSpec& spec) {
  validate(model);
  validate(config);
  const std::size_t n = config.branches();
  const auto& mc = config.groups[0].couplings;
  const auto& p = config.probabilities;
  const double gamma = coupling(model);

  // G_AB would be sum m_i m_j F(r_i^A - r_j^B, t); only the bracket
  // combination enters, which is invariant under uniform shifts of F, so we
  // work with the always-finite subtracted kernel: G~_AB = -sum m m F_diff.
  DistCache fcache([&](double r) { return corr_F_diff(model, r, t, spec); });
  SymMatrix G(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < mc.size(); ++i)
        for (std::size_t j = 0; j < mc.size(); ++j)
          s -= mc[i] * mc[j] *
               fcache(distance(config.groups[a].positions[i], config.groups[b].positions[j]));
      G(a, b) = s;
      G(b, a) = s;
    }
  }

  double gsum = 0.0;  // sum_{QS} p_Q p_S G_QS
  std::vector<double> grow(n, 0.0);  // sum_Q p_Q G_QA
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t s = 0; s < n; ++s) gsum += p[q] * p[s] * G(q, s);
    for (std::size_t a = 0; a < n; ++a) grow[a] += p[q] * G(q, a);
  }

  SymMatrix A(n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t tt = m; tt < n; ++tt) {
      A(m, tt) = 4.0 * gamma * p[m] * p[tt] * (G(m, tt) + gsum - grow[tt] - grow[m]);
      A(tt, m) = A(m, tt);
    }
  }
  return A;
}

double moment_rhs(const NoiseModel& model, const SuperpositionConfig& config, double t,
                  std::size_t M, std::size_t L, const QuadratureSpec& spec) {
  if (M >= config.branches() || L >= config.branches())
    throw ConfigError("moment_rhs: branch index out of range");
  SymMatrix A = fp_diffusion_matrix(model, config, t, spec);
  return -2.0 * A(M, L);
}

}  // namespace collapse
