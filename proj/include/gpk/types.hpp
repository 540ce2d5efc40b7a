#pragma once

#include <Eigen/Dense>
#include <functional>
#include <initializer_list>
#include <vector>

namespace gpk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point of R^d. One-dimensional inputs are length-1 vectors.
using Point = Eigen::VectorXd;
using PointSet = std::vector<Point>;

using ScalarFunction = std::function<double(const Point&)>;

inline Point point(double x) { return Point::Constant(1, x); }

inline Point point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p[i++] = c;
  return p;
}

inline PointSet points_1d(const std::vector<double>& xs) {
  PointSet out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(point(x));
  return out;
}

// n equispaced points a, ..., b (n >= 2) or {a} for n == 1.
inline PointSet linspace(double a, double b, int n) {
  PointSet out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(point(n == 1 ? a : a + (b - a) * i / (n - 1)));
  }
  return out;
}

}  // namespace gpk
