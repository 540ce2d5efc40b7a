#include "gpk/measure.hpp"

#include <cmath>
#include <numeric>

#include "gpk/error.hpp"

namespace gpk {

Measure Measure::uniform(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) throw InputError("uniform measure needs a < b");
  return Measure(UniformInterval{a, b});
}

Measure Measure::uniform_box(int dim) {
  if (dim < 1) throw InputError("uniform box dimension must be positive");
  return Measure(UniformBox{dim});
}

Measure Measure::gaussian(Point mean, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InputError("Gaussian variance must be positive");
  if (mean.size() < 1 || !mean.allFinite()) throw InputError("Gaussian mean must be a finite point");
  return Measure(IsotropicGaussian{std::move(mean), variance});
}

Measure Measure::finite(PointSet points, std::vector<double> weights) {
  if (points.empty() || points.size() != weights.size()) {
    throw InputError("finite measure needs matching, nonempty points and weights");
  }
  const auto dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim || !p.allFinite()) throw InputError("finite measure points must share a dimension");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("finite measure weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("finite measure weights must sum to 1");
  return Measure(FiniteMeasure{std::move(points), std::move(weights)});
}

Measure Measure::empirical(PointSet points) {
  const auto n = points.size();
  if (n == 0) throw InputError("empirical measure needs at least one point");
  return finite(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Measure Measure::dirac(const Point& at) { return finite({at}, {1.0}); }

int Measure::dimension() const {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UniformInterval>) return 1;
        else if constexpr (std::is_same_v<T, UniformBox>) return m.dim;
        else if constexpr (std::is_same_v<T, IsotropicGaussian>) return static_cast<int>(m.mean.size());
        else return static_cast<int>(m.points.front().size());
      },
      v_);
}

Point Measure::sample(std::mt19937_64& engine) const {
  return std::visit(
      [&engine](const auto& m) -> Point {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UniformInterval>) {
          std::uniform_real_distribution<double> u(m.a, m.b);
          return point(u(engine));
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          std::uniform_real_distribution<double> u(0.0, 1.0);
          Point p(m.dim);
          for (int i = 0; i < m.dim; ++i) p[i] = u(engine);
          return p;
        } else if constexpr (std::is_same_v<T, IsotropicGaussian>) {
          std::normal_distribution<double> z(0.0, 1.0);
          Point p = m.mean;
          const double sd = std::sqrt(m.variance);
          for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += sd * z(engine);
          return p;
        } else {
          std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
          return m.points[pick(engine)];
        }
      },
      v_);
}

}  // namespace gpk
