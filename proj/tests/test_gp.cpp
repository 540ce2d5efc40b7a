#include <cmath>
#include <random>

#include "doctest.h"
#include "gpk/error.hpp"
#include "gpk/gp.hpp"
#include "gpk/kernels.hpp"

using namespace gpk;
using doctest::Approx;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("scalar fits") {
  const Kernel se = Kernel::squared_exponential(1.0);
  const GPFit interp(se, points_1d({0.0}), vec({1.0}));
  CHECK(interp.dual()[0] == 1.0);
  for (double x : {-1.0, 0.3, 2.0}) {
    CHECK(interp.posterior_mean(point(x)) == Approx(std::exp(-x * x)).epsilon(1e-15));
    CHECK(interp.posterior_var(point(x)) == Approx(1.0 - std::exp(-2.0 * x * x)).epsilon(1e-13));
  }
  const auto [lo, hi] = interp.credible_interval(point(1.0), 1.0);
  CHECK(lo == Approx(std::exp(-1.0) - std::sqrt(1.0 - std::exp(-2.0))));
  CHECK(hi == Approx(std::exp(-1.0) + std::sqrt(1.0 - std::exp(-2.0))));

  const GPFit reg(se, points_1d({0.0}), vec({1.0}), 0.25);
  CHECK(reg.dual()[0] == Approx(0.8).epsilon(1e-15));
  CHECK(reg.posterior_mean(point(0.0)) == Approx(0.8).epsilon(1e-15));

  const GPFit bm(Kernel::brownian(), points_1d({0.5, 1.0}), vec({1.0, 0.0}));
  CHECK(bm.dual()[0] == Approx(4.0).epsilon(1e-14));
  CHECK(bm.dual()[1] == Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("training points and degenerate cases") {
  const PointSet xs = points_1d({0.1, 0.4, 0.8});
  const Vector ys = vec({0.5, -1.0, 2.0});
  const GPFit fit(Kernel::matern(2, 0.3), xs, ys);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(fit.posterior_var(xs[i]) == Approx(0.0).epsilon(1e-12));
    const auto [lo, hi] = fit.credible_interval(xs[i], 2.0);
    // Posterior sd at a node is rounding-level, roughly sqrt(eps).
    CHECK(hi - lo <= 1e-6);
    CHECK(0.5 * (lo + hi) == Approx(ys[static_cast<Eigen::Index>(i)]).epsilon(1e-10));
  }
  const auto [lo, hi] = fit.credible_interval(point(0.6), 0.0);
  CHECK(lo == hi);
  CHECK(lo == fit.posterior_mean(point(0.6)));

  const GPFit empty(Kernel::brownian(), {}, Vector(0));
  CHECK(empty.posterior_cov(point(0.3), point(0.6)) == 0.3);
  CHECK(empty.posterior_mean(point(0.3)) == 0.0);

  const GPFit constant(Kernel::squared_exponential(0.5), xs, vec({3.0, 3.0, 3.0}), 0.0,
                       [](const Point&) { return 3.0; });
  CHECK(constant.posterior_mean(point(0.9)) == 3.0);
}

TEST_CASE("invalid fits") {
  CHECK_THROWS_AS(GPFit(Kernel::brownian(), points_1d({0.1, 0.2}), vec({1.0})), InputError);
  CHECK_THROWS_AS(GPFit(Kernel::brownian(), points_1d({0.1}), vec({1.0}), -0.1), InputError);
  CHECK_THROWS_AS(GPFit(Kernel::brownian(), points_1d({0.1}), vec({NAN})), InputError);
}

TEST_CASE("noise decomposition through the regularized kernel") {
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 1 + eng() % 12;
    PointSet xs;
    Vector ys(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(point((i + 0.1 + 0.8 * u(eng)) / static_cast<double>(n)));
      ys[static_cast<Eigen::Index>(i)] = z(eng);
    }
    const double s2 = std::pow(10.0, -2.0 + 2.0 * u(eng));
    const Kernel k = inst % 2 ? Kernel::matern(1, 0.3) : Kernel::squared_exponential(0.2);
    const GPFit regression(k, xs, ys, s2);
    const GPFit interp(Kernel::regularized(k, s2), xs, ys);
    const double scale = 1.0 + ys.cwiseAbs().maxCoeff();
    for (int p = 0; p < 10; ++p) {
      const Point x = point(u(eng) * 1.2 - 0.1);
      CHECK(std::abs(regression.posterior_mean(x) - interp.posterior_mean(x)) <= 1e-9 * scale);
      CHECK(interp.posterior_var(x) == Approx(regression.posterior_var(x) + s2).epsilon(1e-9));
    }
  }
}

TEST_CASE("adding a training point never increases the variance") {
  std::mt19937_64 eng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 1 + eng() % 10;
    PointSet xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(point(u(eng)));
    const double noise = inst % 3 == 0 ? 0.0 : 0.01;
    const Kernel k = Kernel::matern(1, 0.4);
    const GPFit before(k, xs, Vector::Zero(static_cast<Eigen::Index>(n)), noise);
    PointSet more = xs;
    more.push_back(point(u(eng)));
    const GPFit after(k, more, Vector::Zero(static_cast<Eigen::Index>(n + 1)), noise);
    for (int p = 0; p < 10; ++p) {
      const Point x = point(u(eng));
      CHECK(after.posterior_var(x) <= before.posterior_var(x) + 1e-9);
    }
  }
}

TEST_CASE("near-duplicate inputs report jitter") {
  const GPFit fit(Kernel::squared_exponential(1.0), points_1d({0.3, 0.3 + 1e-9, 0.7}), vec({1.0, 1.0, 0.0}));
  CHECK(fit.jitter_applied() > 0.0);
}
