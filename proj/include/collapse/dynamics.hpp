#pragma once

#include <cstdint>
#include <vector>

#include "collapse/geometry.hpp"
#include "collapse/linalg.hpp"
#include "collapse/noise_model.hpp"
#include "collapse/quadrature.hpp"

// Exact-solution Monte Carlo of collapse statistics in the linear gauge,
// the closed-form two-branch expectation, and the Fokker-Planck
// coefficients.  No time stepping anywhere: at each output time the branch
// noise integrals Psi_J = sum_i m_i Phi(r_i^J, t) form a Gaussian vector
// whose covariance is built from I-kernel evaluations, and the collapse
// probabilities and the measure weight follow in closed form.

namespace collapse {

// How trajectories are drawn.
//  - PhysicalMixture: the physical measure is a p_J(0)-weighted mixture of
//    mean-shifted Gaussians (exponential tilt of the raw measure by each
//    branch term of the squared norm).  Sampling it directly gives
//    unweighted, bounded estimators of every physical statistic.
//  - RawNoise: draw under the raw noise measure and reweight by the squared
//    norm.  Exact as well, but the weighted estimators acquire heavy tails
//    once Gamma(t) is a few units, so physical means converge poorly.
enum class Sampling { PhysicalMixture, RawNoise };

struct EnsembleSpec {
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
  std::vector<double> output_times;  // strictly increasing, >= 0
  int threads = 1;
  bool keep_trajectories = false;
  Sampling sampling = Sampling::PhysicalMixture;

  void validate() const;
};

// Cov(Psi_a, Psi_b) = 2 sum_{ij} m_i m_j I(r_i^a - r_j^b, t)
SymMatrix covariance_matrix(const NoiseModel& model, const SuperpositionConfig& config,
                            double t, const QuadratureSpec& spec = {});

// Throws PsdError if min eigenvalue < -1e-10 * trace.
void check_psd(const SymMatrix& cov);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct TimeSlice {
  double t = 0.0;
  std::vector<MeanStderr> p;        // physical-measure E_P[p_J]
  MeanStderr pair01;                // E_P[p_0 p_1]
  // mean squared-norm weight under the sampling measure: equals E_Q[w] = 1
  // for RawNoise, E_P[w] for PhysicalMixture
  MeanStderr weight;
  // per-trajectory data (kept only when keep_trajectories is set):
  // probs[traj * branches + J], weights[traj]
  std::vector<double> probs;
  std::vector<double> weights;
};

struct TrajectoryBatch {
  std::vector<TimeSlice> slices;
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
};

TrajectoryBatch sample_reduction_ensemble(const NoiseModel& model,
                                          const SuperpositionConfig& config,
                                          const EnsembleSpec& spec,
                                          const QuadratureSpec& quad = {});

// E_P[p1 p2] of the two-branch exact solution as a function of the
// accumulated rate Gamma(t); p1 + p2 = 1.
double expected_p1p2_closed(double gamma, double p1, double p2,
                            const QuadratureSpec& spec = {});

// Fokker-Planck diffusion coefficient A_MT at the configuration's
// probabilities.
SymMatrix fp_diffusion_matrix(const NoiseModel& model, const SuperpositionConfig& config,
                              double t, const QuadratureSpec& spec = {});

// Drift of E[delta_ML p_M - p_M p_L] evaluated at the configuration's
// probability point (equals -2 A_ML).
double moment_rhs(const NoiseModel& model, const SuperpositionConfig& config, double t,
                  std::size_t M, std::size_t L, const QuadratureSpec& spec = {});

}  // namespace collapse
