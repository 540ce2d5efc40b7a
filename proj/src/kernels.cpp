#include "gpk/kernels.hpp"

#include <cmath>
#include <numbers>
#include <type_traits>

#include "gpk/error.hpp"
#include "gpk/format.hpp"

namespace gpk {

namespace {

constexpr int kMaxPeriodicOrder = 10;
constexpr int kMaxMaternOrder = 30;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(what) + " must be a positive finite number");
  }
}

void require_finite(const Point& x) {
  if (!x.allFinite()) throw InputError("kernel input has non-finite coordinates");
}

void require_scalar(const Point& x, const char* family) {
  if (x.size() != 1) {
    throw DomainError(std::string(family) + " kernel is defined on scalar inputs");
  }
}

// Bernoulli numbers B_0..B_n with B_1 = -1/2.
std::vector<double> bernoulli_numbers(int n) {
  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  b[0] = 1.0;
  for (int m = 1; m <= n; ++m) {
    double acc = 0.0;
    double binom = 1.0;  // C(m+1, k)
    for (int k = 0; k < m; ++k) {
      acc += binom * b[static_cast<std::size_t>(k)];
      binom = binom * (m + 1 - k) / (k + 1);
    }
    b[static_cast<std::size_t>(m)] = -acc / (m + 1);
  }
  return b;
}

double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

double eval_unchecked(const Kernel& k, const Point& x, const Point& y);

struct Evaluator {
  const Point& x;
  const Point& y;

  double operator()(const SquaredExponential& p) const {
    return std::exp(-(x - y).squaredNorm() / (p.bandwidth * p.bandwidth));
  }
  double operator()(const MaternHalfInteger& p) const {
    const double r = (x - y).norm() / p.bandwidth;
    const double z = std::sqrt(8.0 * p.m + 4.0) * r;
    double poly = 0.0;
    // sum_i c_i z^(m-i), Horner from the highest power.
    for (int i = 0; i <= p.m; ++i) poly = poly * z + p.coefficients[static_cast<std::size_t>(i)];
    return std::exp(-std::sqrt(2.0 * p.m + 1.0) * r) * poly;
  }
  double operator()(const Brownian&) const {
    require_scalar(x, "Brownian");
    require_scalar(y, "Brownian");
    if (x[0] < 0.0 || y[0] < 0.0) throw DomainError("Brownian kernel requires nonnegative inputs");
    return std::min(x[0], y[0]);
  }
  double operator()(const PeriodicSobolev& p) const {
    require_scalar(x, "periodic Sobolev");
    require_scalar(y, "periodic Sobolev");
    if (x[0] < 0.0 || x[0] > 1.0 || y[0] < 0.0 || y[0] > 1.0) {
      throw DomainError("periodic Sobolev kernel requires inputs in [0, 1]");
    }
    // B_2s is symmetric about 1/2, so B_2s({x - x'}) = B_2s({|x - x'|}); the
    // absolute value makes the evaluation bit-symmetric.
    const double u = std::abs(x[0] - y[0]);
    const double t = u - std::floor(u);
    return 1.0 + p.scale * horner(p.bernoulli, t);
  }
  double operator()(const KroneckerDelta& p) const {
    return (x.size() == y.size() && x == y) ? p.variance : 0.0;
  }
  double operator()(const BrownianDistance& p) const {
    if (x.size() != p.dimension || y.size() != p.dimension) {
      throw DomainError("Brownian distance kernel dimension mismatch");
    }
    return x.norm() + y.norm() - p.distance_coefficient * (x - y).norm();
  }
  double operator()(const Sum& p) const {
    return eval_unchecked(*p.left, x, y) + eval_unchecked(*p.right, x, y);
  }
  double operator()(const Product& p) const {
    return eval_unchecked(*p.left, x, y) * eval_unchecked(*p.right, x, y);
  }
  double operator()(const Regularized& p) const {
    const double base = eval_unchecked(*p.base, x, y);
    return (x.size() == y.size() && x == y) ? base + p.variance : base;
  }
  double operator()(const Tensor& p) const {
    if (x.size() <= p.split || y.size() != x.size()) {
      throw DomainError("tensor kernel input is too short for its split");
    }
    const Eigen::Index tail = x.size() - p.split;
    const Point xh = x.head(p.split), yh = y.head(p.split);
    const Point xt = x.tail(tail), yt = y.tail(tail);
    return eval_unchecked(*p.left, xh, yh) * eval_unchecked(*p.right, xt, yt);
  }
};

double eval_unchecked(const Kernel& k, const Point& x, const Point& y) {
  return std::visit(Evaluator{x, y}, k.family());
}

}  // namespace

std::vector<double> bernoulli_polynomial(int n) {
  if (n < 0) throw InputError("Bernoulli polynomial order must be nonnegative");
  const auto b = bernoulli_numbers(n);
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  double binom = 1.0;  // C(n, k)
  for (int k = 0; k <= n; ++k) {
    c[static_cast<std::size_t>(n - k)] = binom * b[static_cast<std::size_t>(k)];
    binom = binom * (n - k) / (k + 1);
  }
  return c;
}

Kernel Kernel::squared_exponential(double bandwidth) {
  require_positive(bandwidth, "squared-exponential bandwidth");
  return Kernel(SquaredExponential{bandwidth});
}

Kernel Kernel::matern(int m, double bandwidth) {
  if (m < 0 || m > kMaxMaternOrder) throw InputError("Matern order m must lie in [0, 30]");
  require_positive(bandwidth, "Matern bandwidth");
  // m!/(2m)! * (m+i)!/(i!(m-i)!) via log-gamma to stay finite for larger m.
  std::vector<double> coef(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    const double log_c = std::lgamma(m + 1.0) - std::lgamma(2.0 * m + 1.0) + std::lgamma(m + i + 1.0) -
                         std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0);
    coef[static_cast<std::size_t>(i)] = std::exp(log_c);
  }
  return Kernel(MaternHalfInteger{m, bandwidth, std::move(coef)});
}

Kernel Kernel::brownian() { return Kernel(Brownian{}); }

Kernel Kernel::periodic_sobolev(int order) {
  if (order < 1 || order > kMaxPeriodicOrder) {
    throw InputError("periodic Sobolev order must lie in [1, 10]");
  }
  const int n = 2 * order;
  const double sign = (order % 2 == 1) ? 1.0 : -1.0;
  const double scale = sign * std::exp(n * std::log(2.0 * std::numbers::pi) - std::lgamma(n + 1.0));
  return Kernel(PeriodicSobolev{order, scale, bernoulli_polynomial(n)});
}

Kernel Kernel::kronecker_delta(double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw InputError("Kronecker delta variance must be nonnegative");
  }
  return Kernel(KroneckerDelta{variance});
}

Kernel Kernel::brownian_distance(int dimension, double distance_coefficient) {
  if (dimension < 1) throw InputError("Brownian distance dimension must be positive");
  if (!std::isfinite(distance_coefficient)) throw InputError("distance coefficient must be finite");
  return Kernel(BrownianDistance{dimension, distance_coefficient});
}

Kernel Kernel::sum(const Kernel& left, const Kernel& right) {
  return Kernel(Sum{std::make_shared<const Kernel>(left), std::make_shared<const Kernel>(right)});
}

Kernel Kernel::product(const Kernel& left, const Kernel& right) {
  return Kernel(Product{std::make_shared<const Kernel>(left), std::make_shared<const Kernel>(right)});
}

Kernel Kernel::regularized(const Kernel& base, double variance) {
  require_positive(variance, "regularization variance");
  return Kernel(Regularized{std::make_shared<const Kernel>(base), variance});
}

Kernel Kernel::tensor(const Kernel& left, const Kernel& right, int split) {
  if (split < 1) throw InputError("tensor split must be positive");
  return Kernel(Tensor{std::make_shared<const Kernel>(left), std::make_shared<const Kernel>(right), split});
}

double Kernel::operator()(const Point& x, const Point& y) const { return eval(*this, x, y); }

std::string Kernel::spec() const {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SquaredExponential>) {
          return "se:gamma=" + format_double(p.bandwidth);
        } else if constexpr (std::is_same_v<T, MaternHalfInteger>) {
          return "matern:m=" + std::to_string(p.m) + ",h=" + format_double(p.bandwidth);
        } else if constexpr (std::is_same_v<T, Brownian>) {
          return "brownian";
        } else if constexpr (std::is_same_v<T, PeriodicSobolev>) {
          return "periodic:s=" + std::to_string(p.order);
        } else if constexpr (std::is_same_v<T, KroneckerDelta>) {
          return "delta:var=" + format_double(p.variance);
        } else if constexpr (std::is_same_v<T, BrownianDistance>) {
          std::string s = "browndist:d=" + std::to_string(p.dimension);
          if (p.distance_coefficient != 2.0) s += ",c=" + format_double(p.distance_coefficient);
          return s;
        } else if constexpr (std::is_same_v<T, Sum>) {
          return "sum(" + p.left->spec() + "," + p.right->spec() + ")";
        } else if constexpr (std::is_same_v<T, Product>) {
          return "prod(" + p.left->spec() + "," + p.right->spec() + ")";
        } else if constexpr (std::is_same_v<T, Regularized>) {
          return "reg(" + p.base->spec() + ",var=" + format_double(p.variance) + ")";
        } else {
          return "tensor(" + p.left->spec() + "," + p.right->spec() + ",split=" + std::to_string(p.split) +
                 ")";
        }
      },
      family_);
}

double eval(const Kernel& kernel, const Point& x, const Point& y) {
  require_finite(x);
  require_finite(y);
  if (x.size() != y.size()) throw InputError("kernel arguments differ in dimension");
  return eval_unchecked(kernel, x, y);
}

double spectral_density(const Kernel& kernel, const Vector& omega, double normalizer) {
  if (!omega.allFinite()) throw InputError("frequency has non-finite coordinates");
  const double w2 = omega.squaredNorm();
  if (const auto* se = std::get_if<SquaredExponential>(&kernel.family())) {
    return normalizer * std::exp(-se->bandwidth * se->bandwidth * w2 / 4.0);
  }
  if (const auto* mt = std::get_if<MaternHalfInteger>(&kernel.family())) {
    const double alpha = mt->m + 0.5;
    const double d = static_cast<double>(omega.size());
    const double base = 2.0 * alpha / (mt->bandwidth * mt->bandwidth) + 4.0 * std::numbers::pi * std::numbers::pi * w2;
    return normalizer * std::pow(base, -alpha - d / 2.0);
  }
  throw UnsupportedError("spectral density is available for squared-exponential and Matern kernels only");
}

Matrix gram(const Kernel& kernel, const PointSet& xs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      g(i, j) = eval(kernel, xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

Matrix cross_gram(const Kernel& kernel, const PointSet& xs, const PointSet& ys) {
  Matrix g(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = eval(kernel, xs[i], ys[j]);
    }
  }
  return g;
}

Vector kernel_vector(const Kernel& kernel, const PointSet& xs, const Point& x) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = eval(kernel, xs[i], x);
  return v;
}

}  // namespace gpk
