#pragma once

#include <utility>

#include "gpk/kernels.hpp"
#include "gpk/linalg.hpp"

namespace gpk {

/// Conditioning state of GP(m, k) on y_i = F(x_i) + noise, noise ~ N(0, noise_variance).
/// noise_variance == 0 is noise-free interpolation.
///
///   mean(x)   = m(x) + k_n(x)^T (K_n + s^2 I)^{-1} (y - m_n)
///   cov(x,x') = k(x,x') - k_n(x)^T (K_n + s^2 I)^{-1} k_n(x')
class GPFit {
 public:
  GPFit(Kernel kernel, PointSet xs, Vector ys, double noise_variance = 0.0, ScalarFunction prior_mean = {},
        const JitterPolicy& policy = {});

  double posterior_mean(const Point& x) const;
  double posterior_cov(const Point& x, const Point& y) const;

  /// Diagonal of posterior_cov. Values in [-1e-10 k(x,x), 0) are clamped to 0;
  /// anything lower raises NumericalError.
  double posterior_var(const Point& x) const;

  /// (mean - multiplier * sd, mean + multiplier * sd)
  std::pair<double, double> credible_interval(const Point& x, double multiplier) const;

  const Kernel& kernel() const { return kernel_; }
  const PointSet& inputs() const { return xs_; }
  const Vector& outputs() const { return ys_; }
  double noise_variance() const { return noise_variance_; }
  const Vector& dual() const { return dual_; }
  const CholFactor& factor() const { return chol_; }
  double jitter_applied() const { return chol_.jitter_applied(); }

 private:
  Kernel kernel_;
  PointSet xs_;
  Vector ys_;
  double noise_variance_;
  ScalarFunction prior_mean_;
  CholFactor chol_;
  Vector dual_;
};

/// Clamp policy shared by posterior variances and power functions.
double clamp_variance(double value, double prior_variance);

}  // namespace gpk
