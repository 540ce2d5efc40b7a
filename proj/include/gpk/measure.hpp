#pragma once

#include <random>
#include <variant>

#include "gpk/types.hpp"

namespace gpk {

struct UniformInterval {
  double a;
  double b;
};

/// Uniform distribution on [0, 1]^dim.
struct UniformBox {
  int dim;
};

/// N(mean, variance * I)
struct IsotropicGaussian {
  Point mean;
  double variance;
};

/// sum_i weights_i * delta_{points_i}; weights nonnegative and summing to 1.
struct FiniteMeasure {
  PointSet points;
  std::vector<double> weights;
};

/// Probability measure against which kernel means and double integrals are taken.
class Measure {
 public:
  using Variant = std::variant<UniformInterval, UniformBox, IsotropicGaussian, FiniteMeasure>;

  static Measure uniform(double a = 0.0, double b = 1.0);
  static Measure uniform_box(int dim);
  static Measure gaussian(Point mean, double variance);
  static Measure finite(PointSet points, std::vector<double> weights);
  /// Equal weights 1/n on the given points.
  static Measure empirical(PointSet points);
  static Measure dirac(const Point& at);

  const Variant& variant() const { return v_; }
  int dimension() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }

  Point sample(std::mt19937_64& engine) const;

 private:
  explicit Measure(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

}  // namespace gpk
