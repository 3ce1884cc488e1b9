#include "collapse/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace collapse {

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

std::vector<double> sym_eigenvalues(SymMatrix m) {
  const std::size_t n = m.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (off < 1e-30 * std::max(1.0, m.trace() * m.trace())) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = m(k, p), akq = m(k, q);
          m(k, p) = c * akp - s * akq;
          m(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = m(p, k), aqk = m(q, k);
          m(p, k) = c * apk - s * aqk;
          m(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

bool cholesky(const SymMatrix& m, SymMatrix& lower) {
  const std::size_t n = m.size();
  lower = SymMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      if (i == j) {
        if (!(s > 0.0)) {
          // allow exactly-zero rows (e.g. covariance at t = 0)
          bool row_zero = true;
          for (std::size_t k = 0; k < n; ++k)
            if (m(i, k) != 0.0) row_zero = false;
          if (row_zero && s == 0.0) {
            lower(i, i) = 0.0;
            continue;
          }
          return false;
        }
        lower(i, i) = std::sqrt(s);
      } else {
        lower(i, j) = (lower(j, j) > 0.0) ? s / lower(j, j) : 0.0;
      }
    }
  }
  return true;
}

bool cholesky_jittered(const SymMatrix& m, SymMatrix& lower, double max_jitter) {
  if (cholesky(m, lower)) return true;
  double jitter = max_jitter > 0.0 ? max_jitter * 1e-4 : 0.0;
  while (jitter > 0.0 && jitter <= max_jitter) {
    SymMatrix mj = m;
    for (std::size_t i = 0; i < m.size(); ++i) mj(i, i) += jitter;
    if (cholesky(mj, lower)) return true;
    jitter *= 10.0;
  }
  return false;
}

}  // namespace collapse
