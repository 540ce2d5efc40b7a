#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gpk/types.hpp"

namespace gpk {

class Kernel;

/// exp(-|x - x'|^2 / gamma^2)
struct SquaredExponential {
  double bandwidth;
};

/// Matern kernel of smoothness alpha = m + 1/2 in its closed
/// polynomial-times-exponential form. m = 0 is the Laplace kernel.
struct MaternHalfInteger {
  int m;
  double bandwidth;
  std::vector<double> coefficients;  // m!/(2m)! * (m+i)!/(i!(m-i)!), i = 0..m
};

/// min(x, x') on [0, inf).
struct Brownian {};

/// 1 + (-1)^(s-1) (2 pi)^(2s) / (2s)! * B_2s({x - x'}) on [0, 1].
struct PeriodicSobolev {
  int order;
  double scale;                     // (-1)^(s-1) (2 pi)^(2s) / (2s)!
  std::vector<double> bernoulli;    // B_2s coefficients, constant term first
};

/// variance * [x == x'] with exact coordinate comparison.
struct KroneckerDelta {
  double variance;
};

/// |x| + |x'| - c |x - x'| with c = 2 by default. c = 1 gives twice the
/// fractional Brownian (H = 1/2) covariance, which is positive semidefinite.
struct BrownianDistance {
  int dimension;
  double distance_coefficient = 2.0;
};

struct Sum {
  std::shared_ptr<const Kernel> left;
  std::shared_ptr<const Kernel> right;
};

/// Pointwise product k(x,x') l(x,x') on a common input.
struct Product {
  std::shared_ptr<const Kernel> left;
  std::shared_ptr<const Kernel> right;
};

/// k(x,x') + variance * [x == x'].
struct Regularized {
  std::shared_ptr<const Kernel> base;
  double variance;
};

/// Tensor product on a split input: k(x_head, x'_head) * l(x_tail, x'_tail)
/// where the head holds the first `split` coordinates.
struct Tensor {
  std::shared_ptr<const Kernel> left;
  std::shared_ptr<const Kernel> right;
  int split;
};

/// Immutable positive definite kernel from a closed parametric family.
/// Copies share composite children.
class Kernel {
 public:
  using Family = std::variant<SquaredExponential, MaternHalfInteger, Brownian, PeriodicSobolev,
                              KroneckerDelta, BrownianDistance, Sum, Product, Regularized, Tensor>;

  static Kernel squared_exponential(double bandwidth);
  static Kernel matern(int m, double bandwidth);
  static Kernel laplace(double bandwidth) { return matern(0, bandwidth); }
  static Kernel brownian();
  static Kernel periodic_sobolev(int order);
  static Kernel kronecker_delta(double variance);
  static Kernel brownian_distance(int dimension, double distance_coefficient = 2.0);
  static Kernel sum(const Kernel& left, const Kernel& right);
  static Kernel product(const Kernel& left, const Kernel& right);
  static Kernel regularized(const Kernel& base, double variance);
  static Kernel tensor(const Kernel& left, const Kernel& right, int split);

  double operator()(const Point& x, const Point& y) const;

  const Family& family() const { return family_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(family_);
  }

  /// Round-trips through parse_kernel_spec.
  std::string spec() const;

 private:
  explicit Kernel(Family f) : family_(std::move(f)) {}
  Family family_;
};

/// Pointwise evaluation with domain checks.
double eval(const Kernel& kernel, const Point& x, const Point& y);

/// Normalising constants default to 1; only ratios and decay rates matter
/// downstream. Supported for SquaredExponential and MaternHalfInteger.
double spectral_density(const Kernel& kernel, const Vector& omega, double normalizer = 1.0);

/// Symmetric Gram matrix; the upper triangle is mirrored from the lower.
Matrix gram(const Kernel& kernel, const PointSet& xs);

/// (k(x_i, y_j))_{ij}
Matrix cross_gram(const Kernel& kernel, const PointSet& xs, const PointSet& ys);

/// (k(x_1, x), ..., k(x_n, x))
Vector kernel_vector(const Kernel& kernel, const PointSet& xs, const Point& x);

/// Coefficients of the Bernoulli polynomial B_n, constant term first.
std::vector<double> bernoulli_polynomial(int n);

/// Parses the CLI grammar: `se:gamma=1.0`, `matern:m=1,h=0.5`, `laplace:h=1.0`,
/// `brownian`, `periodic:s=2`, `delta:var=0.01`, `reg(<inner>,var=0.01)`,
/// `sum(<a>,<b>)`, `prod(<a>,<b>)`, `browndist:d=1` (optional `,c=1`).
Kernel parse_kernel_spec(const std::string& text);

}  // namespace gpk
