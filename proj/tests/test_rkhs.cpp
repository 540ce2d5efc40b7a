#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gpk/error.hpp"
#include "gpk/gp.hpp"
#include "gpk/kernels.hpp"
#include "gpk/rkhs.hpp"

using namespace gpk;
using doctest::Approx;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

struct Instance {
  Kernel kernel;
  PointSet xs;
  Vector ys;
};

Instance random_instance(std::mt19937_64& eng, int id) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  const std::size_t n = 1 + eng() % 15;
  PointSet xs;
  Vector ys(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(point((i + 0.15 + 0.7 * u(eng)) / static_cast<double>(n)));
    ys[static_cast<Eigen::Index>(i)] = z(eng);
  }
  const Kernel kernels[] = {Kernel::squared_exponential(2.0 / n), Kernel::matern(1, 0.2), Kernel::brownian(),
                            Kernel::periodic_sobolev(1)};
  return {kernels[id % 4], xs, ys};
}

}  // namespace

TEST_CASE("interpolant examples") {
  const SpanElement one = min_norm_interpolant(Kernel::periodic_sobolev(1), points_1d({0.3}), vec({2.0}));
  CHECK(one.coefficients()[0] == Approx(2.0 / (1.0 + std::numbers::pi * std::numbers::pi / 3.0)));
  const SpanElement bm = min_norm_interpolant(Kernel::brownian(), points_1d({0.5, 1.0}), vec({1.0, 0.0}));
  CHECK(bm.coefficients()[0] == Approx(4.0).epsilon(1e-14));
  CHECK(bm.coefficients()[1] == Approx(-2.0).epsilon(1e-14));
  CHECK(bm(point(0.5)) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("kernel ridge regression examples") {
  const Kernel se = Kernel::squared_exponential(1.0);
  CHECK(krr(se, points_1d({0.2}), vec({3.0}), 1.0).coefficients()[0] == Approx(1.5).epsilon(1e-15));
  const PointSet xs = points_1d({0.1, 0.5, 0.9});
  const Vector ys = vec({1.0, -2.0, 0.5});
  const SpanElement big = krr(se, xs, ys, 1e12);
  CHECK(big.coefficients().cwiseAbs().maxCoeff() <= 1e-11);
  const Kernel m = Kernel::matern(1, 0.2);
  const SpanElement tiny = krr(m, xs, ys, 1e-12), exact = min_norm_interpolant(m, xs, ys);
  CHECK((tiny.coefficients() - exact.coefficients()).norm() <= 1e-6 * exact.coefficients().norm());
  CHECK_THROWS_AS(krr(se, xs, ys, -1.0), InputError);
}

TEST_CASE("power function examples") {
  const Kernel se = Kernel::squared_exponential(1.0);
  CHECK(power_function(se, points_1d({0.4}), point(0.4)) == Approx(0.0).epsilon(1e-12));
  CHECK(power_function(Kernel::periodic_sobolev(1), {}, point(0.2)) ==
        Approx(std::sqrt(1.0 + std::numbers::pi * std::numbers::pi / 3.0)));
  for (double x : {0.3, 1.0, 2.0}) {
    CHECK(power_function(se, points_1d({0.0}), point(x)) == Approx(std::sqrt(1.0 - std::exp(-2.0 * x * x))).epsilon(1e-12));
  }
  CHECK(worst_case_error_regularized(se, 0.3, {}, point(0.1)) == Approx(std::sqrt(1.3)));
  const PointSet xs = points_1d({0.1, 0.45, 0.8});
  CHECK(worst_case_error_regularized(se, 0.1, xs, point(0.3)) ==
        Approx(power_function(Kernel::regularized(se, 0.1), xs, point(0.3))).epsilon(1e-12));
  CHECK(worst_case_error_regularized(Kernel::matern(1, 0.3), 1e-12, xs, point(0.3)) ==
        Approx(power_function(Kernel::matern(1, 0.3), xs, point(0.3))).epsilon(1e-5));
  CHECK(error_bound(se, xs, point(0.3), 0.0) == 0.0);
  CHECK(error_bound(se, xs, point(0.45), 5.0) == Approx(0.0).epsilon(1e-6));
}

TEST_CASE("fill distance examples") {
  CHECK(fill_distance(points_1d({0.0, 1.0}), point(0.5), 0.5).value == Approx(0.5));
  CHECK(fill_distance(points_1d({0.3}), point(0.3), 0.2).value == Approx(0.2));
  PointSet grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(point(i / 40.0));
  CHECK(fill_distance(grid, point(0.5), 0.25).value == Approx(1.0 / 80.0));
  CHECK(fill_distance({}, point(0.5), 0.25).empty);
  const FillDistance two = fill_distance({point({0.0, 0.0})}, point({0.0, 0.0}), 0.3);
  CHECK(two.value == Approx(0.3).epsilon(two.grid_spacing + 1e-12));
}

TEST_CASE("duality identities on random instances") {
  std::mt19937_64 eng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int id = 0; id < 100; ++id) {
    const auto inst = random_instance(eng, id);
    const double scale = 1.0 + inst.ys.cwiseAbs().maxCoeff();
    const double n = static_cast<double>(inst.xs.size());
    const GPFit gp(inst.kernel, inst.xs, inst.ys);
    const SpanElement f = min_norm_interpolant(inst.kernel, inst.xs, inst.ys);
    const double s2 = 0.1;
    const GPFit gpr(inst.kernel, inst.xs, inst.ys, s2);
    const SpanElement fk = krr(inst.kernel, inst.xs, inst.ys, s2 / n);
    const SpanElement fr = min_norm_interpolant(Kernel::regularized(inst.kernel, s2), inst.xs, inst.ys);
    const PowerFunction pf(inst.kernel, inst.xs);
    for (int p = 0; p < 20; ++p) {
      const Point x = point(u(eng));
      CHECK(std::abs(gp.posterior_mean(x) - f(x)) <= 1e-8 * scale);
      CHECK(std::abs(gpr.posterior_mean(x) - fk(x)) <= 1e-8 * scale);
      CHECK(std::abs(fr(x) - fk(x)) <= 1e-9 * scale);
      CHECK(worst_case_error_regularized(inst.kernel, s2, inst.xs, x) ==
            Approx(std::sqrt(gpr.posterior_var(x) + s2)).epsilon(1e-9));
      // Power function squared is the norm of the residual feature.
      const SpanElement resid = SpanElement::feature(inst.kernel, x)
                                    .plus(SpanElement(inst.kernel, inst.xs, pf.optimal_weights(x)), -1.0);
      const double kxx = inst.kernel(x, x);
      CHECK(std::abs(pf.squared(x) - resid.norm_sq()) <= 1e-8 * kxx);
      CHECK(std::abs(pf.squared(x) - gp.posterior_var(x)) <= 1e-10 * kxx);
    }
    for (std::size_t i = 0; i < inst.xs.size(); ++i) {
      CHECK(fr(inst.xs[i]) == Approx(inst.ys[static_cast<Eigen::Index>(i)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("reproducing property on spans") {
  std::mt19937_64 eng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  for (const Kernel& k : {Kernel::squared_exponential(0.3), Kernel::matern(2, 0.5), Kernel::brownian()}) {
    for (int rep = 0; rep < 30; ++rep) {
      PointSet cs;
      Vector a(6);
      for (int i = 0; i < 6; ++i) {
        cs.push_back(point(u(eng)));
        a[i] = z(eng);
      }
      const SpanElement f(k, cs, a);
      const Point x = point(u(eng));
      const double fx = f(x);
      CHECK(f.inner(SpanElement::feature(k, x)) == Approx(fx).epsilon(1e-10).scale(1.0));
      CHECK(f.norm_sq() >= 0.0);
      CHECK(f.scaled(2.0).norm_sq() == Approx(4.0 * f.norm_sq()));
    }
  }
  CHECK_THROWS_AS(SpanElement(Kernel::brownian(), points_1d({0.1}), Vector::Ones(2)), InputError);
}
