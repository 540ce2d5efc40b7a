#pragma once

#include "gpk/types.hpp"

namespace gpk {

/// Geometric jitter ladder {0, j0, j0*g, ..., j0*g^(max_attempts-1)} with
/// j0 = initial_relative * mean(diag(A)).
struct JitterPolicy {
  int max_attempts = 8;
  double initial_relative = 1e-10;
  double growth_factor = 10.0;
};

/// Jitter above this fraction of mean(diag) means numerical regularization is
/// no longer negligible next to a modelled noise variance.
inline constexpr double kJitterGateRelative = 1e-6;

/// Lower Cholesky factor of A + jitter * I.
class CholFactor {
 public:
  CholFactor() = default;
  CholFactor(Matrix lower, double jitter, double mean_diagonal)
      : lower_(std::move(lower)), jitter_(jitter), mean_diagonal_(mean_diagonal) {}

  const Matrix& lower() const { return lower_; }
  double jitter_applied() const { return jitter_; }
  double mean_diagonal() const { return mean_diagonal_; }
  Eigen::Index dimension() const { return lower_.rows(); }

  /// True when the applied jitter stays below kJitterGateRelative * mean(diag).
  bool jitter_within_gate() const { return jitter_ <= kJitterGateRelative * mean_diagonal_; }

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;

  /// L^{-1} b
  Vector half_solve(const Vector& b) const;

  /// b^T (A + jitter I)^{-1} b through two triangular solves.
  double quad_form(const Vector& b) const;

  /// L z
  Vector multiply(const Vector& z) const;

 private:
  Matrix lower_;
  double jitter_ = 0.0;
  double mean_diagonal_ = 0.0;
};

/// Throws InputError unless A is square and symmetric within 1e-12 (relative to
/// max(1, |A|_inf)); throws SingularMatrixError once the ladder is exhausted.
CholFactor cholesky_with_jitter(const Matrix& a, const JitterPolicy& policy = {});

struct SymEigen {
  Vector values;   // descending
  Matrix vectors;  // columns orthonormal, matching `values`
};

/// Throws NumericalError if the QR iteration does not converge within
/// Eigen's cap of 30 * n sweeps.
SymEigen sym_eigen(const Matrix& a);

}  // namespace gpk
