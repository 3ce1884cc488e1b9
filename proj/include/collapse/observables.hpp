#pragma once

#include <vector>

#include "collapse/noise_model.hpp"
#include "collapse/quadrature.hpp"

// Noise-induced observables: energy production (rate and total), the
// hydrogen gamma-emission spectrum, the Markovian-validity diagnostic, and
// the Lindblad-class master-equation kernel.

namespace collapse {

struct ParticleSpecies {
  double coupling = 0.0;       // m_i (noise coupling)
  double inertial_mass = 0.0;  // M_i
  double count = 1.0;
};

void validate(const std::vector<ParticleSpecies>& species);

// d Tr H rho / dt = gamma/(2 pi^2) sum_i (m_i^2/M_i) int k^4 Fhat(k,t) dk,
// in the Markovian approximation.  Natural units (GeV^2 = GeV per unit
// natural time).
double energy_rate(const NoiseModel& model, const std::vector<ParticleSpecies>& species,
                   double t, const QuadratureSpec& spec = {});

// closed form of the white-noise rate (the constant CSL heating law)
double csl_energy_rate_closed(const WhiteCsl& model,
                              const std::vector<ParticleSpecies>& species);

struct EnergyTotal {
  double value = 0.0;       // Delta Tr H rho, natural units
  bool divergent = false;   // true when the t = inf total grows without bound
  double growth_exponent = 0.0;  // fitted d ln E / d ln t in the divergent case
  double exponent_stderr = 0.0;
};

// Total energy produced up to time t (pass infinity for the asymptote).
// In the unparticle zeta = 0, d <= 1/2 regime the asymptote grows without
// bound; the result is flagged divergent and carries a fitted growth
// exponent over the last decade of an internal time scan.
EnergyTotal energy_total(const NoiseModel& model, const std::vector<ParticleSpecies>& species,
                         double t, const QuadratureSpec& spec = {});

struct SpectrumPoint {
  double p = 0.0;      // photon energy
  double dP_dp = 0.0;  // radiated power per unit photon energy
  bool below_threshold = false;
};

// Hydrogen-atom gamma emission spectrum for the mass-shell correlator
// families (Thermal / DiluteNr); zero with a flag below the p = mu
// threshold.
SpectrumPoint gamma_spectrum(const NoiseModel& model, double p, const QuadratureSpec& spec = {});

struct MarkovDiagnostic {
  double ratio = 0.0;  // k_max / (2 m): Markovian approximation valid when << 1
  double k_max = 0.0;
};

MarkovDiagnostic markov_diagnostic(const NoiseModel& model, double particle_mass);

// The exact oscillatory factor O(s-t) of the free-particle check, with k
// and p collinear; O(0) = k^2.
double markov_O_eval(double k, double p, double tau, double mass);

// Lindblad-class kernel 2 m^2 gamma Fhat(k,t).
double lindblad_kernel(const NoiseModel& model, double mass, double k, double t,
                       const QuadratureSpec& spec = {});

}  // namespace collapse
