#pragma once

#include "collapse/noise_model.hpp"
#include "collapse/quadrature.hpp"

// Noise-kernel evaluation: D(r,t), its first and second time integrals
// F(r,t) and I(r,t), the subtracted combinations that enter every rate, and
// the spatial Fourier transform Fhat(k,t).  Kernels are isotropic; the
// angular average is done analytically (sin(kr)/kr factor) and only the
// radial integral is left to quadrature.
//
// Only differences like I(0,t) - I(r,t) are physical for the rate formulas
// (uniform shifts of F drop out); corr_I_diff / corr_F_diff are the
// canonical entry points and stay finite in regimes where the absolute
// kernels are infrared-divergent (unparticle with zeta = 0, d <= 1/2).

namespace collapse {

double corr_D(const NoiseModel& model, double r, double t, const QuadratureSpec& spec = {});
double corr_F(const NoiseModel& model, double r, double t, const QuadratureSpec& spec = {});
double corr_I(const NoiseModel& model, double r, double t, const QuadratureSpec& spec = {});

// F(0,t) - F(r,t)
double corr_F_diff(const NoiseModel& model, double r, double t,
                   const QuadratureSpec& spec = {});
// I(0,t) - I(r,t)
double corr_I_diff(const NoiseModel& model, double r, double t,
                   const QuadratureSpec& spec = {});

double fourier_Fhat(const NoiseModel& model, double k, double t,
                    const QuadratureSpec& spec = {});

// Subtracted kernels of the dilute nonrelativistic model at (r,t).
struct DiluteKernels {
  double d_diff = 0.0;  // D(0,t) - D(r,t)
  double f_diff = 0.0;  // F(0,t) - F(r,t)
  double i_diff = 0.0;  // I(0,t) - I(r,t)
};

// Exact closed forms (no quadrature).
DiluteKernels dilute_closed_forms(const DiluteNr& model, double r, double t);

// Reference route: direct radial quadrature of the Gaussian-weighted
// oscillatory integrals the closed forms were derived from.  Kept as the
// independent cross-check for the closed forms.
DiluteKernels dilute_quadrature_forms(const DiluteNr& model, double r, double t,
                                      const QuadratureSpec& spec = {});

// asymptote of I(0,inf) - I(r,inf) in the dilute model
double dilute_i_diff_infinity(const DiluteNr& model, double r);

namespace unparticle_detail {

// int_0^1 cos(v z) (1 - v^2)^{d-1} dv and its subtracted companion,
// evaluated with the endpoint singularity removed by substitution and
// cached on a grid per scaling dimension.
double v_cos(double d, double z);
double v_sub(double d, double z);          // int (1 - cos(vz)) (1-v^2)^{d-1} dv
double v_sub_over_z2(double d, double z);  // v_sub / z^2, finite at z = 0

// dual routes for the Fourier transform (valid ranges overlap on 1 < d < 3/2)
double fhat_raw(const Unparticle& m, double k, double t, const QuadratureSpec& spec);
double fhat_continued(const Unparticle& m, double k, double t, const QuadratureSpec& spec);

// raw v-form of D_U (converges for d > 1); used to validate the
// integrated-by-parts route
double corr_D_raw_vform(const Unparticle& m, double r, double t, const QuadratureSpec& spec);

}  // namespace unparticle_detail

}  // namespace collapse
