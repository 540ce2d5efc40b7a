#include "gpk/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpk/error.hpp"
#include "gpk/gp.hpp"

namespace gpk {

SpanElement::SpanElement(Kernel kernel, PointSet centers, Vector coefficients, double jitter_applied)
    : kernel_(std::move(kernel)),
      centers_(std::move(centers)),
      coefficients_(std::move(coefficients)),
      jitter_applied_(jitter_applied) {
  if (static_cast<std::size_t>(coefficients_.size()) != centers_.size()) {
    throw InputError("span coefficients and centers differ in length");
  }
}

double SpanElement::operator()(const Point& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    acc += coefficients_[static_cast<Eigen::Index>(i)] * eval(kernel_, x, centers_[i]);
  }
  return acc;
}

double SpanElement::inner(const SpanElement& other) const {
  if (kernel_.spec() != other.kernel_.spec()) throw InputError("inner product of spans with different kernels");
  return coefficients_.dot(cross_gram(kernel_, centers_, other.centers_) * other.coefficients_);
}

double SpanElement::norm_sq() const {
  if (centers_.empty()) return 0.0;
  return coefficients_.dot(gram(kernel_, centers_) * coefficients_);
}

SpanElement SpanElement::feature(const Kernel& kernel, const Point& x) {
  return SpanElement(kernel, {x}, Vector::Ones(1));
}

SpanElement SpanElement::plus(const SpanElement& other, double scale) const {
  PointSet centers = centers_;
  centers.insert(centers.end(), other.centers_.begin(), other.centers_.end());
  Vector c(coefficients_.size() + other.coefficients_.size());
  c << coefficients_, scale * other.coefficients_;
  return SpanElement(kernel_, std::move(centers), std::move(c));
}

SpanElement SpanElement::scaled(double factor) const {
  return SpanElement(kernel_, centers_, factor * coefficients_, jitter_applied_);
}

SpanElement min_norm_interpolant(const Kernel& kernel, const PointSet& xs, const Vector& ys,
                                 const JitterPolicy& policy) {
  if (static_cast<std::size_t>(ys.size()) != xs.size()) throw InputError("inputs and outputs differ in length");
  const CholFactor chol = cholesky_with_jitter(gram(kernel, xs), policy);
  return SpanElement(kernel, xs, chol.solve(ys), chol.jitter_applied());
}

SpanElement krr(const Kernel& kernel, const PointSet& xs, const Vector& ys, double lambda,
                const JitterPolicy& policy) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("KRR regularization lambda must be positive");
  if (static_cast<std::size_t>(ys.size()) != xs.size()) throw InputError("inputs and outputs differ in length");
  Matrix k = gram(kernel, xs);
  k.diagonal().array() += static_cast<double>(xs.size()) * lambda;
  const CholFactor chol = cholesky_with_jitter(k, policy);
  return SpanElement(kernel, xs, chol.solve(ys), chol.jitter_applied());
}

PowerFunction::PowerFunction(Kernel kernel, PointSet xs, double noise_variance, const JitterPolicy& policy)
    : kernel_(std::move(kernel)), xs_(std::move(xs)) {
  if (!(noise_variance >= 0.0)) throw InputError("noise variance must be nonnegative");
  Matrix k = gram(kernel_, xs_);
  k.diagonal().array() += noise_variance;
  chol_ = cholesky_with_jitter(k, policy);
}

double PowerFunction::squared(const Point& x) const {
  const double kxx = eval(kernel_, x, x);
  if (xs_.empty()) return kxx;
  return clamp_variance(kxx - chol_.quad_form(kernel_vector(kernel_, xs_, x)), kxx);
}

double PowerFunction::operator()(const Point& x) const { return std::sqrt(squared(x)); }

Vector PowerFunction::optimal_weights(const Point& x) const {
  return chol_.solve(kernel_vector(kernel_, xs_, x));
}

double power_function(const Kernel& kernel, const PointSet& xs, const Point& x) {
  return PowerFunction(kernel, xs)(x);
}

double worst_case_error_regularized(const Kernel& kernel, double noise_variance, const PointSet& xs,
                                    const Point& x) {
  if (!(noise_variance > 0.0)) throw InputError("noise variance must be positive");
  for (const auto& xi : xs) {
    if (xi.size() == x.size() && xi == x) {
      throw PreconditionError("worst-case error of noisy prediction is defined only off the training inputs");
    }
  }
  return std::sqrt(PowerFunction(kernel, xs, noise_variance).squared(x) + noise_variance);
}

double error_bound(const Kernel& kernel, const PointSet& xs, const Point& x, double f_norm) {
  if (!(f_norm >= 0.0)) throw InputError("RKHS norm bound must be nonnegative");
  return f_norm * power_function(kernel, xs, x);
}

FillDistance fill_distance(const PointSet& xs, const Point& center, double rho, int resolution) {
  if (!(rho > 0.0)) throw InputError("fill distance radius must be positive");
  const auto d = center.size();
  if (d != 1 && d != 2) throw InputError("fill distance supports dimensions 1 and 2");
  for (const auto& p : xs) {
    if (p.size() != d) throw InputError("fill distance points must match the center's dimension");
  }
  if (xs.empty()) return {rho, 0.0, true};

  if (d == 1) {
    std::vector<double> s;
    s.reserve(xs.size());
    for (const auto& p : xs) s.push_back(p[0]);
    std::sort(s.begin(), s.end());
    const double lo = center[0] - rho, hi = center[0] + rho;
    auto nearest = [&s](double t) {
      auto it = std::lower_bound(s.begin(), s.end(), t);
      double best = std::numeric_limits<double>::infinity();
      if (it != s.end()) best = *it - t;
      if (it != s.begin()) best = std::min(best, t - *std::prev(it));
      return best;
    };
    // The distance to the nearest point is piecewise linear in t with maxima
    // at gap midpoints and at the ball's ends.
    double best = std::max(nearest(lo), nearest(hi));
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double mid = 0.5 * (s[i] + s[i + 1]);
      if (mid >= lo && mid <= hi) best = std::max(best, 0.5 * (s[i + 1] - s[i]));
    }
    return {best, 0.0, false};
  }

  if (resolution < 2) throw InputError("fill distance probe resolution must be at least 2");
  const double spacing = 2.0 * rho / (resolution - 1);
  double best = 0.0;
  Point probe(2);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      probe << center[0] - rho + i * spacing, center[1] - rho + j * spacing;
      if ((probe - center).norm() > rho * (1.0 + 1e-12)) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& p : xs) nearest = std::min(nearest, (probe - p).norm());
      best = std::max(best, nearest);
    }
  }
  return {best, spacing, false};
}

}  // namespace gpk
