#include "gpk/gp.hpp"

#include <cmath>

#include "gpk/error.hpp"

namespace gpk {

double clamp_variance(double value, double prior_variance) {
  if (value >= 0.0) return value;
  if (value >= -1e-10 * std::abs(prior_variance)) return 0.0;
  throw NumericalError("posterior variance is negative beyond roundoff");
}

GPFit::GPFit(Kernel kernel, PointSet xs, Vector ys, double noise_variance, ScalarFunction prior_mean,
             const JitterPolicy& policy)
    : kernel_(std::move(kernel)),
      xs_(std::move(xs)),
      ys_(std::move(ys)),
      noise_variance_(noise_variance),
      prior_mean_(std::move(prior_mean)) {
  if (static_cast<std::size_t>(ys_.size()) != xs_.size()) throw InputError("inputs and outputs differ in length");
  if (!(noise_variance_ >= 0.0) || !std::isfinite(noise_variance_)) {
    throw InputError("noise variance must be nonnegative");
  }
  if (!ys_.allFinite()) throw InputError("observations must be finite");
  if (noise_variance_ == 0.0) {
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (xs_[i].size() == xs_[j].size() && xs_[i] == xs_[j]) {
          throw SingularMatrixError("duplicate training inputs make the noise-free Gram matrix singular", 0.0);
        }
      }
    }
  }
  Matrix k = gram(kernel_, xs_);
  k.diagonal().array() += noise_variance_;
  chol_ = cholesky_with_jitter(k, policy);

  Vector centred = ys_;
  if (prior_mean_) {
    for (std::size_t i = 0; i < xs_.size(); ++i) centred[static_cast<Eigen::Index>(i)] -= prior_mean_(xs_[i]);
  }
  dual_ = chol_.solve(centred);
}

double GPFit::posterior_mean(const Point& x) const {
  const double prior = prior_mean_ ? prior_mean_(x) : 0.0;
  if (xs_.empty()) return prior;
  return prior + kernel_vector(kernel_, xs_, x).dot(dual_);
}

double GPFit::posterior_cov(const Point& x, const Point& y) const {
  const double prior = eval(kernel_, x, y);
  if (xs_.empty()) return prior;
  const Vector a = chol_.half_solve(kernel_vector(kernel_, xs_, x));
  const Vector b = chol_.half_solve(kernel_vector(kernel_, xs_, y));
  return prior - a.dot(b);
}

double GPFit::posterior_var(const Point& x) const {
  const double prior = eval(kernel_, x, x);
  if (xs_.empty()) return prior;
  return clamp_variance(prior - chol_.quad_form(kernel_vector(kernel_, xs_, x)), prior);
}

std::pair<double, double> GPFit::credible_interval(const Point& x, double multiplier) const {
  if (!(multiplier >= 0.0)) throw InputError("credible interval multiplier must be nonnegative");
  const double m = posterior_mean(x);
  const double half = multiplier * std::sqrt(posterior_var(x));
  return {m - half, m + half};
}

}  // namespace gpk
