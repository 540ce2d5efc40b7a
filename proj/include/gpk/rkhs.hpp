#pragma once

#include "gpk/kernels.hpp"
#include "gpk/linalg.hpp"

namespace gpk {

/// f = sum_i c_i k(., x_i), an element of the pre-Hilbert span of canonical features.
class SpanElement {
 public:
  SpanElement(Kernel kernel, PointSet centers, Vector coefficients, double jitter_applied = 0.0);

  double operator()(const Point& x) const;

  /// <f, g> = a^T K(X, Y) b; both spans must use the same kernel.
  double inner(const SpanElement& other) const;

  /// c^T K c
  double norm_sq() const;

  /// Canonical feature k(., x).
  static SpanElement feature(const Kernel& kernel, const Point& x);

  /// Concatenates centers, scaling the second coefficient block by `scale`.
  SpanElement plus(const SpanElement& other, double scale = 1.0) const;
  SpanElement scaled(double factor) const;

  const Kernel& kernel() const { return kernel_; }
  const PointSet& centers() const { return centers_; }
  const Vector& coefficients() const { return coefficients_; }

  /// Diagonal jitter used when the coefficients came from a Gram solve.
  double jitter_applied() const { return jitter_applied_; }

 private:
  Kernel kernel_;
  PointSet centers_;
  Vector coefficients_;
  double jitter_applied_;
};

/// argmin ||f|| subject to f(x_i) = y_i: coefficients K^{-1} y.
SpanElement min_norm_interpolant(const Kernel& kernel, const PointSet& xs, const Vector& ys,
                                 const JitterPolicy& policy = {});

/// argmin (1/n) sum (f(x_i) - y_i)^2 + lambda ||f||^2: coefficients (K + n lambda I)^{-1} y.
SpanElement krr(const Kernel& kernel, const PointSet& xs, const Vector& ys, double lambda,
                const JitterPolicy& policy = {});

/// Power function sqrt(k(x,x) - k_n(x)^T K^{-1} k_n(x)), factoring K once for many probes.
class PowerFunction {
 public:
  PowerFunction(Kernel kernel, PointSet xs, double noise_variance = 0.0, const JitterPolicy& policy = {});

  /// k(x,x) - k_n^T (K + s^2 I)^{-1} k_n, clamped like a posterior variance.
  double squared(const Point& x) const;
  double operator()(const Point& x) const;

  /// K^{-1} k_n(x)
  Vector optimal_weights(const Point& x) const;

  double jitter_applied() const { return chol_.jitter_applied(); }
  const CholFactor& factor() const { return chol_; }

 private:
  Kernel kernel_;
  PointSet xs_;
  CholFactor chol_;
};

double power_function(const Kernel& kernel, const PointSet& xs, const Point& x);

/// sqrt(k(x,x) - k_n^T (K + s^2 I)^{-1} k_n + s^2), the worst-case error of
/// predicting f(x) + noise. Defined only off the training inputs.
double worst_case_error_regularized(const Kernel& kernel, double noise_variance, const PointSet& xs,
                                    const Point& x);

/// f_norm * power_function(kernel, xs, x)
double error_bound(const Kernel& kernel, const PointSet& xs, const Point& x, double f_norm);

struct FillDistance {
  double value;
  double grid_spacing;  // 0 for the exact 1-D computation
  bool empty;           // no points: value is rho
};

/// sup over the ball B(center, rho) of the distance to the nearest point.
/// Exact in 1-D; in 2-D the supremum runs over a resolution x resolution probe
/// grid and undershoots by at most grid_spacing.
FillDistance fill_distance(const PointSet& xs, const Point& center, double rho, int resolution = 201);

}  // namespace gpk
