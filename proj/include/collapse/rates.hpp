#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "collapse/correlators.hpp"
#include "collapse/geometry.hpp"
#include "collapse/noise_model.hpp"

// Integrated diagonalization/reduction rates.  Everything is built from
// coupling-weighted differences of the I kernel over particle pairs, so a
// uniform shift of F(r,t) by any xi(t) cancels identically.

namespace collapse {

struct RateResult {
  double gamma = 0.0;  // dimensionless exponent Gamma(t)
  double t = 0.0;
  // per-pair contributions (i over group 1, j over group 2), optional
  std::vector<double> breakdown;
};

struct RateOptions {
  QuadratureSpec quad;
  bool keep_breakdown = false;
  // treat pairs separated by more than cutoff_radii * r_C as fully
  // decorrelated (I_diff at its large-r asymptote)
  bool far_field_cutoff = false;
  double cutoff_radii = 20.0;
};

// Gamma(t) for a two-branch superposition with groups g1, g2.
RateResult gamma_pair(const NoiseModel& model, const ParticleGroup& g1,
                      const ParticleGroup& g2, double t, const RateOptions& opts = {});

// Same pairwise sum over an injected subtracted kernel
// idiff(r, t) = I(0,t) - I(r,t); used for kernel-level tests and by the
// far-field machinery.
RateResult gamma_pair_kernel(const std::function<double(double, double)>& idiff,
                             double gamma_coupling, const ParticleGroup& g1,
                             const ParticleGroup& g2, double t,
                             bool keep_breakdown = false);

// Gamma^{LM}(t) between branches L and M of an N-branch superposition.
RateResult gamma_lm(const NoiseModel& model, const SuperpositionConfig& config,
                    std::size_t L, std::size_t M, double t, const RateOptions& opts = {});

// <1|rho(t)|2> / <1|rho(0)|2> = exp(-Gamma(t))
double offdiag_decay(const NoiseModel& model, const ParticleGroup& g1,
                     const ParticleGroup& g2, double t, const RateOptions& opts = {});

struct ReductionBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// lower = e0 exp(-2 Gamma); upper = e0 / (1 + 8 e0 Gamma).
// The upper bound integrates the differential inequality
// dE/dt <= -8 Gamma' E^2 directly; the resulting 1 + 8 e0 Gamma denominator
// is the form consistent with the lower bound at e0 = 1/4.
ReductionBounds reduction_bounds(double gamma, double e0);

// Samples the pairwise-summed F differences on (0, t]; the reduction bounds
// assume this integrand stays positive, which the thermal-family kernels
// violate at finite t.
bool rate_integrand_positive(const NoiseModel& model, const ParticleGroup& g1,
                             const ParticleGroup& g2, double t, int samples = 64,
                             const QuadratureSpec& spec = {});

struct CslMatch {
  double r_c_equiv = 0.0;      // 1/sqrt(2 mu T)
  double rate_product = 0.0;   // Delta_t * gamma_CSL = 2 gamma m_N^2 e^{-(mu-zeta)/T}/mu^3
};

// Dilute-limit correspondence with the white-noise model (Thermal or
// DiluteNr parameters).
CslMatch csl_matching(const NoiseModel& model);

}  // namespace collapse
