#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "collapse/errors.hpp"

// Adaptive Gauss-Kronrod (G7/K15) quadrature tuned for the integrals this
// library produces: Bose-weighted tails, trigonometric factors with known
// period, and integrable endpoint singularities.  Semi-infinite integrals
// are handled by dyadic blocks [0,1],[1,2],[2,4],... until the running
// tail drops below tail_cut of the accumulated value.
//
// Oscillatory integrands: when oscillation_period is set, every panel is
// pre-split at half-period spacing before refinement starts, so the
// cancellation between lobes is resolved instead of estimated.

namespace collapse {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  std::size_t max_evals = 1'000'000;
  // Full period of the fastest oscillation of the integrand along the
  // integration axis; panels are pre-split at half this spacing (0 = none).
  double oscillation_period = 0.0;
  // Fraction of the accumulated value below which the semi-infinite tail
  // may be truncated.
  double tail_cut = 1e-12;

  void validate() const {
    if (!(rel_tol > 0.0)) throw ConfigError("QuadratureSpec: rel_tol must be > 0");
    if (!(abs_tol >= 0.0)) throw ConfigError("QuadratureSpec: abs_tol must be >= 0");
    if (max_evals == 0) throw ConfigError("QuadratureSpec: max_evals must be > 0");
    if (!(oscillation_period >= 0.0))
      throw ConfigError("QuadratureSpec: oscillation_period must be >= 0");
    if (!(tail_cut >= 0.0)) throw ConfigError("QuadratureSpec: tail_cut must be >= 0");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evals = 0;
  bool converged = false;
};

namespace detail {

// K15 abscissae on [0,1] side (symmetric), Kronrod weights, and the
// embedded G7 weights on the shared nodes (odd indices).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void k15_panel(const F& f, double a, double b, double& result, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  for (int i = 0; i < 15; ++i) {
    if (std::isnan(fv[i])) {
      const double x = (i < 7) ? c - h * kXgk[i] : (i == 7 ? c : c + h * kXgk[14 - i]);
      std::ostringstream msg;
      msg << "integrand returned NaN at x = " << x;
      throw ConvergenceError(msg.str());
    }
  }
  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    resk += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) resg += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  result = resk * h;
  err = std::abs(resk - resg) * h;
  resasc *= std::abs(h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
}

struct Panel {
  double a, b, value, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

// Adaptive refinement over an initial partition, one global error budget
// across all panels (convergence is judged on the summed estimate, never
// per panel: cancellation between oscillation lobes would otherwise make
// near-zero panels impossible to "converge" individually).
template <class F>
QuadratureResult refine_partition(const F& f, const std::vector<double>& pts,
                                  const QuadratureSpec& spec, std::size_t& evals_used) {
  QuadratureResult res;
  std::priority_queue<Panel> heap;
  double total = 0.0, toterr = 0.0;
  bool budget_hit = false;

  auto push_panel = [&](double pa, double pb) {
    Panel p{pa, pb, 0.0, 0.0};
    k15_panel(f, pa, pb, p.value, p.err);
    evals_used += 15;
    total += p.value;
    toterr += p.err;
    heap.push(p);
  };

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] == pts[i]) continue;
    if (evals_used + 15 > spec.max_evals) {
      budget_hit = true;
      break;
    }
    push_panel(pts[i], pts[i + 1]);
  }

  auto tolerance = [&] { return std::max(spec.rel_tol * std::abs(total), spec.abs_tol); };

  while (!budget_hit && toterr > tolerance() && !heap.empty()) {
    if (evals_used + 30 > spec.max_evals) {
      budget_hit = true;
      break;
    }
    Panel p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b) {
      // panel at roundoff width; its error cannot be reduced further
      continue;
    }
    total -= p.value;
    toterr -= p.err;
    push_panel(p.a, mid);
    push_panel(mid, p.b);
  }

  res.value = total;
  res.error_estimate = toterr;
  res.evals = evals_used;
  res.converged = !budget_hit && toterr <= tolerance();
  return res;
}

template <class F>
QuadratureResult refine(const F& f, double a, double b, const QuadratureSpec& spec,
                        std::size_t& evals_used) {
  // initial partition: half-period spacing when an oscillation hint is given
  std::size_t n0 = 1;
  if (spec.oscillation_period > 0.0) {
    n0 = static_cast<std::size_t>(std::ceil((b - a) / (0.5 * spec.oscillation_period)));
    const std::size_t cap = std::max<std::size_t>(1, spec.max_evals / 30);
    n0 = std::clamp<std::size_t>(n0, 1, cap);
  }
  std::vector<double> pts(n0 + 1);
  for (std::size_t i = 0; i <= n0; ++i)
    pts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n0);
  return refine_partition(f, pts, spec, evals_used);
}

}  // namespace detail

template <class F>
QuadratureResult integrate_finite(const F& f, double a, double b,
                                  const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(b > a)) {
    if (b == a) return {0.0, 0.0, 0, true};
    throw ConfigError("integrate_finite: requires b >= a");
  }
  std::size_t evals = 0;
  return detail::refine(f, a, b, spec, evals);
}

// Adaptive integration over a panel list with caller-chosen interior
// breakpoints (e.g. images of oscillation half-periods under a variable
// substitution).  Breakpoints must be sorted; first and last are the range.
template <class F>
QuadratureResult integrate_breakpoints(const F& f, const std::vector<double>& pts,
                                       const QuadratureSpec& spec = {}) {
  spec.validate();
  if (pts.size() < 2) throw ConfigError("integrate_breakpoints: need at least two points");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i + 1] >= pts[i]))
      throw ConfigError("integrate_breakpoints: points must be sorted");
  std::size_t evals = 0;
  return detail::refine_partition(f, pts, spec, evals);
}

// Integral over (0, inf) for an eventually-decaying integrand.  Blocks
// [0,1],[1,2],[2,4],... are each integrated adaptively; the scan stops once
// two consecutive blocks fall below the tail cut.
template <class F>
QuadratureResult integrate_semi_infinite(const F& f, const QuadratureSpec& spec = {}) {
  spec.validate();
  QuadratureResult out;
  std::size_t evals = 0;
  double lo = 0.0, hi = 1.0;
  int quiet_blocks = 0;
  bool budget_hit = false;

  for (int block = 0; block < 64; ++block) {
    QuadratureSpec bs = spec;
    bs.abs_tol = std::max(spec.abs_tol, 0.1 * spec.rel_tol * std::abs(out.value));
    bs.max_evals = (spec.max_evals > evals) ? spec.max_evals - evals : 0;
    if (bs.max_evals < 15) {
      budget_hit = true;
      break;
    }
    QuadratureResult br = detail::refine(f, lo, hi, bs, evals);
    out.value += br.value;
    out.error_estimate += br.error_estimate;
    if (!br.converged) budget_hit = true;

    const double tail_gate =
        std::max(spec.tail_cut * std::abs(out.value), 0.1 * spec.abs_tol);
    if (std::abs(br.value) <= tail_gate)
      ++quiet_blocks;
    else
      quiet_blocks = 0;
    if (quiet_blocks >= 2) break;

    lo = hi;
    hi *= 2.0;
  }

  out.evals = evals;
  out.converged =
      !budget_hit && quiet_blocks >= 2 &&
      out.error_estimate <= std::max(spec.rel_tol * std::abs(out.value), spec.abs_tol);
  return out;
}

// int_0^inf  w^n / (exp((w - zeta)/T) - 1) dw.
// zeta <= 0 (a positive chemical potential puts a pole inside the
// integration range); at zeta = 0 the integrand behaves as T w^{n-1} near
// the origin and the integral exists only for n > 0.
inline double bose_integral(double n, double zeta, double temperature,
                            const QuadratureSpec& spec = {}) {
  if (!(temperature > 0.0)) throw DomainError("bose_integral: T must be > 0");
  if (zeta > 0.0)
    throw DomainError("bose_integral: zeta > 0 would correspond to a physical-region pole");
  if (zeta == 0.0 && n <= 0.0)
    throw DomainError("bose_integral: divergent for zeta = 0, n <= 0");
  const double a = -zeta / temperature;
  auto f = [&](double x) { return std::pow(x, n) / std::expm1(x + a); };
  QuadratureResult r = integrate_semi_infinite(f, spec);
  if (!r.converged)
    throw ConvergenceError("bose_integral: quadrature did not converge");
  return std::pow(temperature, n + 1.0) * r.value;
}

}  // namespace collapse
