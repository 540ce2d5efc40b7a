#include "gpk/sampling.hpp"

#include <cmath>

#include "gpk/error.hpp"

namespace gpk {

GaussianSampler::GaussianSampler(const Kernel& kernel, PointSet points, const JitterPolicy& policy)
    : points_(std::move(points)), factor_(cholesky_with_jitter(gram(kernel, points_), policy)) {}

GaussianSampler::GaussianSampler(const Matrix& covariance, const JitterPolicy& policy)
    : factor_(cholesky_with_jitter(covariance, policy)) {}

Vector GaussianSampler::draw(const RngSpec& rng) const {
  auto engine = make_engine(rng);
  return factor_.multiply(standard_normals(engine, factor_.dimension()));
}

Matrix GaussianSampler::draw_batch(const RngSpec& base, std::uint64_t first, std::uint64_t count) const {
  const Eigen::Index n = factor_.dimension();
  Matrix z(n, static_cast<Eigen::Index>(count));
  for (std::uint64_t r = 0; r < count; ++r) {
    auto engine = make_engine(base.replicate(first + r));
    z.col(static_cast<Eigen::Index>(r)) = standard_normals(engine, n);
  }
  if (n == 0) return z;
  return factor_.lower().triangularView<Eigen::Lower>() * z;
}

Vector gp_sample_at(const Kernel& kernel, const PointSet& xs, const RngSpec& rng) {
  return GaussianSampler(kernel, xs).draw(rng);
}

KlPath::KlPath(const EigenSystem* sys, Vector z) : sys_(sys), z_(std::move(z)) {
  scaled_ = z_;
  for (Eigen::Index i = 0; i < z_.size(); ++i) {
    scaled_[i] *= std::sqrt(sys_->eigenvalues()[static_cast<std::size_t>(i)]);
  }
}

double KlPath::operator()(const Point& x) const {
  if (z_.size() == 0) return 0.0;
  return sys_->eigenfunctions(x, static_cast<std::size_t>(z_.size())).dot(scaled_);
}

KlPath kl_sample(const EigenSystem& sys, std::size_t count, const RngSpec& rng) {
  if (count > sys.size()) throw InputError("KL truncation exceeds the available eigenpairs");
  auto engine = make_engine(rng);
  return KlPath(&sys, standard_normals(engine, static_cast<Eigen::Index>(count)));
}

double kl_path_variance(const EigenSystem& sys, const Point& x, std::size_t count) {
  if (count > sys.size()) throw InputError("KL truncation exceeds the available eigenpairs");
  if (count == 0) return 0.0;
  const Vector phi = sys.eigenfunctions(x, count);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double f = phi[static_cast<Eigen::Index>(i)];
    acc += sys.eigenvalues()[i] * f * f;
  }
  return acc;
}

double kl_truncation_var(const EigenSystem& sys, const Kernel& kernel, const Point& x, std::size_t count) {
  const double kxx = eval(kernel, x, x);
  const double residual = kxx - kl_path_variance(sys, x, count);
  if (residual >= 0.0) return residual;
  if (residual >= -1e-8 * std::abs(kxx)) return 0.0;
  throw NumericalError("truncated KL variance exceeds k(x,x): eigensystem inconsistent with the kernel");
}

}  // namespace gpk
