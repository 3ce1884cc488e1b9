#pragma once

#include <string>
#include <variant>
#include <vector>

#include "collapse/errors.hpp"

namespace collapse {

// Spectral weight gamma(omega) of the product-correlator model.  The three
// parametric shapes cover the qualitative cases discussed for frequency
// cutoffs (constant recovers white noise; the high-pass shape has the
// infrared cutoff gamma(0) = 0 needed to kill late-time energy production).
// Tabulated data is linearly interpolated and extrapolates to zero.
struct SpectralFunction {
  enum class Shape { Constant, Step, HighPass, Tabulated };

  Shape shape = Shape::Constant;
  double gamma0 = 1.0;   // overall scale (carries the full noise coupling)
  double omega_c = 0.0;  // step cutoff
  double omega_0 = 0.0;  // high-pass knee
  std::vector<std::pair<double, double>> table;  // (omega, gamma), sorted

  double operator()(double omega) const;

  static SpectralFunction constant(double g0) { return {Shape::Constant, g0, 0, 0, {}}; }
  static SpectralFunction step(double g0, double wc) { return {Shape::Step, g0, wc, 0, {}}; }
  static SpectralFunction high_pass(double g0, double w0) {
    return {Shape::HighPass, g0, 0, w0, {}};
  }
  static SpectralFunction tabulated(std::vector<std::pair<double, double>> pts);
};

// Loads a two-column CSV (omega in GeV, gamma dimensionless scale).
SpectralFunction load_spectral_csv(const std::string& path);

// --- correlator families ------------------------------------------------
// couplings are in natural units; gamma carries mass^-4 for the white model
// (density-coupled convention) and mass^-2 for the field-coupled models.

struct WhiteCsl {
  double gamma;  // mass^-4
  double r_c;    // correlation length, GeV^-1
};

struct CutoffProduct {
  SpectralFunction gamma_of_omega;  // carries the full coupling
  double r_c;
};

struct Thermal {
  double mu;           // boson mass
  double temperature;  // T
  double zeta;         // chemical potential, must stay below mu
  double gamma;        // mass^-2
};

struct DiluteNr {
  double mu;
  double temperature;
  double zeta;
  double gamma;

  bool dilute_valid() const { return temperature / mu < 0.1; }
};

struct Unparticle {
  double d;            // scaling dimension, > 0
  double lambda;       // scale parameter
  double temperature;  // T
  double zeta;         // <= 0 (spectrum reaches omega = 0)
  double gamma;        // mass^-2

  double effective_coupling() const;  // gamma * Lambda^{2(1-d)}
};

using NoiseModel = std::variant<WhiteCsl, CutoffProduct, Thermal, DiluteNr, Unparticle>;

void validate(const NoiseModel& model);

// noise coupling entering the rate formulas; the CutoffProduct family
// absorbs it into gamma(omega) and reports 1 here
double coupling(const NoiseModel& model);

// spatial decorrelation scale r_C: explicit for the product models,
// 1/sqrt(2 mu T) for the massive thermal ones, 1/T for the unparticle
double correlation_length(const NoiseModel& model);

std::string family_name(const NoiseModel& model);

}  // namespace collapse
