#pragma once

#include <cstddef>
#include <vector>

namespace collapse {

// Dense symmetric matrix, row-major, sized for branch counts (a handful).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  double trace() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

// Eigenvalues by cyclic Jacobi rotations (ascending order).
std::vector<double> sym_eigenvalues(SymMatrix m);

// Lower-triangular Cholesky factor.  Returns false if the matrix is not
// (numerically) positive definite; on success fills `lower`.
bool cholesky(const SymMatrix& m, SymMatrix& lower);

// Cholesky with diagonal jitter escalated up to max_jitter (absolute).
// Throws via the caller's policy: returns false when even the jittered
// factorization fails.
bool cholesky_jittered(const SymMatrix& m, SymMatrix& lower, double max_jitter);

}  // namespace collapse
