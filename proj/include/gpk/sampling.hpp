#pragma once

#include "gpk/kernels.hpp"
#include "gpk/linalg.hpp"
#include "gpk/random.hpp"
#include "gpk/spectral.hpp"

namespace gpk {

/// Exact zero-mean Gaussian draws at a fixed point set: L z with L the jittered
/// Cholesky factor of the Gram matrix.
class GaussianSampler {
 public:
  GaussianSampler(const Kernel& kernel, PointSet points, const JitterPolicy& policy = {});

  /// Factor of an arbitrary covariance matrix.
  explicit GaussianSampler(const Matrix& covariance, const JitterPolicy& policy = {});

  Vector draw(const RngSpec& rng) const;

  /// Columns are replicates first..first+count-1 of base.replicate(.).
  Matrix draw_batch(const RngSpec& base, std::uint64_t first, std::uint64_t count) const;

  const CholFactor& factor() const { return factor_; }
  const PointSet& points() const { return points_; }

 private:
  PointSet points_;
  CholFactor factor_;
};

/// F(X) ~ N(0, K_X) for a single replicate.
Vector gp_sample_at(const Kernel& kernel, const PointSet& xs, const RngSpec& rng);

/// x -> sum_{i < count} z_i lambda_i^{1/2} phi_i(x) with recorded coefficients z.
class KlPath {
 public:
  KlPath(const EigenSystem* sys, Vector z);

  double operator()(const Point& x) const;
  const Vector& coefficients() const { return z_; }

 private:
  const EigenSystem* sys_;
  Vector z_;
  Vector scaled_;  // z_i * sqrt(lambda_i)
};

/// The path keeps a pointer to `sys`, which must outlive it.
KlPath kl_sample(const EigenSystem& sys, std::size_t count, const RngSpec& rng);

/// k(x, x) - sum_{i < count} lambda_i phi_i(x)^2, clamped to 0 above -1e-8 k(x,x);
/// below that the eigensystem is inconsistent with the kernel (NumericalError).
double kl_truncation_var(const EigenSystem& sys, const Kernel& kernel, const Point& x, std::size_t count);

/// Truncated variance sum_{i < count} lambda_i phi_i(x)^2 of a KL path.
double kl_path_variance(const EigenSystem& sys, const Point& x, std::size_t count);

}  // namespace gpk
