#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gpk/error.hpp"
#include "gpk/kernels.hpp"
#include "gpk/linalg.hpp"

using namespace gpk;
using doctest::Approx;

namespace {

PointSet random_points(std::mt19937_64& eng, std::size_t n, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  PointSet xs;
  for (std::size_t i = 0; i < n; ++i) {
    Point p(dim);
    for (int j = 0; j < dim; ++j) p[j] = u(eng);
    xs.push_back(p);
  }
  return xs;
}

std::vector<Kernel> families() {
  return {Kernel::squared_exponential(0.4), Kernel::matern(0, 0.3), Kernel::matern(1, 0.5), Kernel::matern(2, 0.2),
          Kernel::brownian(),                Kernel::periodic_sobolev(1), Kernel::periodic_sobolev(3),
          Kernel::regularized(Kernel::squared_exponential(1.0), 0.01),
          Kernel::sum(Kernel::brownian(), Kernel::laplace(0.5)),
          Kernel::product(Kernel::squared_exponential(0.7), Kernel::matern(1, 1.0))};
}

}  // namespace

TEST_CASE("evaluation examples") {
  CHECK(eval(Kernel::squared_exponential(1.0), point(0.37), point(0.37)) == 1.0);
  CHECK(eval(Kernel::matern(0, 1.0), point(0.2), point(1.2)) == Approx(0.36787944117144233).epsilon(1e-14));
  CHECK(eval(Kernel::periodic_sobolev(1), point(0.3), point(0.3)) ==
        Approx(1.0 + std::numbers::pi * std::numbers::pi / 3.0).epsilon(1e-14));
  CHECK(eval(Kernel::brownian(), point(0.3), point(0.7)) == 0.3);
}

TEST_CASE("closed forms against high-precision values") {
  // Half-integer Matern at r = 0.3, h = 0.5, and periodic kernels from their
  // Fourier series summed to convergence.
  CHECK(eval(Kernel::matern(1, 0.5), point(0.1), point(0.4)) == Approx(0.7213304237515005).epsilon(1e-14));
  CHECK(eval(Kernel::matern(2, 0.5), point(0.1), point(0.4)) == Approx(0.768993109251618).epsilon(1e-14));
  CHECK(eval(Kernel::periodic_sobolev(1), point(0.1), point(0.35)) == Approx(0.5887664832879434).epsilon(1e-13));
  CHECK(eval(Kernel::periodic_sobolev(1), point(0.9), point(0.8)) == Approx(2.513339341500368).epsilon(1e-13));
  CHECK(eval(Kernel::periodic_sobolev(2), point(0.1), point(0.35)) == Approx(0.8816208963128443).epsilon(1e-13));
  CHECK(eval(Kernel::periodic_sobolev(2), point(0.9), point(0.8)) == Approx(2.6386373758386634).epsilon(1e-13));
  CHECK(eval(Kernel::squared_exponential(2.0), point({0.0, 1.0}), point({1.0, 0.0})) ==
        Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("spectral density examples") {
  CHECK(spectral_density(Kernel::squared_exponential(2.0), Vector::Zero(1)) == 1.0);
  CHECK(spectral_density(Kernel::matern(1, 1.0), Vector::Zero(1)) == Approx(1.0 / 9.0).epsilon(1e-15));
  // Large-frequency ratio approaches 2^(-2 alpha - d).
  for (int m : {0, 1, 2}) {
    const Kernel k = Kernel::matern(m, 0.7);
    const double alpha = m + 0.5;
    const double ratio = spectral_density(k, Vector::Constant(1, 2e3)) / spectral_density(k, Vector::Constant(1, 1e3));
    CHECK(ratio == Approx(std::pow(2.0, -2.0 * alpha - 1.0)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(spectral_density(Kernel::brownian(), Vector::Zero(1)), UnsupportedError);
}

TEST_CASE("gram examples") {
  const Matrix g = gram(Kernel::brownian(), points_1d({0.25, 0.5, 1.0}));
  Matrix expected(3, 3);
  expected << 0.25, 0.25, 0.25, 0.25, 0.5, 0.5, 0.25, 0.5, 1.0;
  CHECK(g == expected);
  CHECK(gram(Kernel::matern(2, 0.3), points_1d({0.4}))(0, 0) == 1.0);

  const PointSet xs = points_1d({0.1, 0.5, 0.8});
  const Matrix reg = gram(Kernel::regularized(Kernel::squared_exponential(1.0), 0.1), xs);
  const Matrix base = gram(Kernel::squared_exponential(1.0), xs) + 0.1 * Matrix::Identity(3, 3);
  CHECK((reg - base).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cross_gram(Kernel::brownian(), xs, points_1d({0.3}))(2, 0) == 0.3);
}

TEST_CASE("symmetry is bit-exact") {
  std::mt19937_64 eng(11);
  for (const auto& k : families()) {
    const PointSet xs = random_points(eng, 40, 1, 0.0, 1.0);
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) CHECK(k(xs[i], xs[i + 1]) == k(xs[i + 1], xs[i]));
  }
}

TEST_CASE("gram matrices are positive semidefinite") {
  std::mt19937_64 eng(12);
  for (const auto& k : families()) {
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const PointSet xs = random_points(eng, 1 + eng() % 20, 1, 0.0, 1.0);
      const Matrix g = gram(k, xs);
      const double lo = sym_eigen(g).values.minCoeff();
      worst = std::min(worst, lo / g.trace());
    }
    INFO(k.spec());
    CHECK(worst >= -1e-10);
  }
  for (const auto& k : {Kernel::squared_exponential(0.5), Kernel::matern(1, 0.4)}) {
    for (int rep = 0; rep < 50; ++rep) {
      const Matrix g = gram(k, random_points(eng, 1 + eng() % 20, 3, -1.0, 1.0));
      CHECK(sym_eigen(g).values.minCoeff() >= -1e-10 * g.trace());
    }
  }
}

TEST_CASE("distance-based Brownian kernel with c = 2 is indefinite") {
  // Documents why the coefficient must not be 2 for a valid covariance.
  const Kernel k = Kernel::brownian_distance(1);
  // K = [[0.2, -0.7], [-0.7, 2]] has negative determinant.
  const Matrix g = gram(k, points_1d({0.1, 1.0}));
  CHECK(g.determinant() < 0.0);
  CHECK(sym_eigen(g).values.minCoeff() < -1e-3);
  const Matrix ok = gram(Kernel::brownian_distance(1, 1.0), points_1d({0.2, 0.5, 0.9}));
  CHECK(sym_eigen(ok).values.minCoeff() >= -1e-12);
}

TEST_CASE("Matern approaches the squared exponential as smoothness grows") {
  // Same length scale convention: exp(-r^2 / (2 h^2)).
  std::mt19937_64 eng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 0.4;
  // Pointwise gaps only shrink monotonically inside the first crossing; past
  // about 2h the curves cross and the gap can briefly grow.
  for (int pair = 0; pair < 20; ++pair) {
    const Point x = point(u(eng)), y = x + point(1.5 * h * u(eng));
    const double target = std::exp(-(x - y).squaredNorm() / (2.0 * h * h));
    double prev = INFINITY;
    for (int m : {0, 1, 2, 5, 10}) {
      const double gap = std::abs(eval(Kernel::matern(m, h), x, y) - target);
      CHECK(gap <= prev + 1e-15);
      prev = gap;
    }
  }
  // Uniform gap over r in [0, 3h] decreases with m.
  double prev_sup = INFINITY;
  for (int m : {0, 1, 2, 5, 10}) {
    double sup = 0.0;
    for (int i = 0; i <= 3000; ++i) {
      const double r = 3.0 * h * i / 3000.0;
      sup = std::max(sup, std::abs(eval(Kernel::matern(m, h), point(0.0), point(r)) - std::exp(-r * r / (2.0 * h * h))));
    }
    INFO("m = " << m << " sup = " << sup);
    CHECK(sup < prev_sup);
    prev_sup = sup;
  }
}

TEST_CASE("periodic Sobolev kernel") {
  for (int s : {1, 2, 3}) {
    const Kernel k = Kernel::periodic_sobolev(s);
    CHECK(eval(k, point(0.0), point(1.0)) == eval(k, point(0.0), point(0.0)));
  }
  // Bernoulli form against the truncated cosine series.
  std::mt19937_64 eng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr int terms = 100000;
  for (int s : {1, 2}) {
    double tail = 0.0;
    for (int m = 400000; m > terms; --m) tail += std::pow(m, -2.0 * s);
    tail = 2.0 * (tail + std::pow(400000.5, 1.0 - 2.0 * s) / (2.0 * s - 1.0));
    const Kernel k = Kernel::periodic_sobolev(s);
    for (int pair = 0; pair < 50; ++pair) {
      const double x = u(eng), y = u(eng);
      double series = 0.0;
      for (int m = terms; m >= 1; --m) series += std::cos(2.0 * std::numbers::pi * m * (x - y)) / std::pow(m, 2.0 * s);
      CHECK(std::abs(k(point(x), point(y)) - (1.0 + 2.0 * series)) <= tail + 1e-12);
    }
  }
}

TEST_CASE("Bernoulli polynomials") {
  const auto b2 = bernoulli_polynomial(2);  // x^2 - x + 1/6
  REQUIRE(b2.size() == 3);
  CHECK(b2[0] == Approx(1.0 / 6.0));
  CHECK(b2[1] == -1.0);
  CHECK(b2[2] == 1.0);
  const auto b4 = bernoulli_polynomial(4);  // x^4 - 2x^3 + x^2 - 1/30
  CHECK(b4[0] == Approx(-1.0 / 30.0));
  CHECK(b4[2] == Approx(1.0));
  CHECK(b4[3] == Approx(-2.0));
}

TEST_CASE("spec strings round-trip") {
  for (const std::string s : {"se:gamma=1.5", "matern:m=2,h=0.25", "laplace:h=0.5", "brownian", "periodic:s=2",
                              "delta:var=0.01", "reg(se:gamma=0.3,var=0.01)", "sum(brownian,periodic:s=1)",
                              "prod(se:gamma=1,matern:m=1,h=0.5)", "browndist:d=1"}) {
    const Kernel k = parse_kernel_spec(s);
    const Kernel again = parse_kernel_spec(k.spec());
    CHECK(again.spec() == k.spec());
    CHECK(again(point(0.3), point(0.6)) == k(point(0.3), point(0.6)));
  }
  CHECK(parse_kernel_spec("laplace:h=0.5")(point(0.0), point(0.5)) == Approx(std::exp(-1.0)));
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(parse_kernel_spec("cubic:h=1"), InputError);
  CHECK_THROWS_AS(parse_kernel_spec("se:gamma=-1"), InputError);
  CHECK_THROWS_AS(parse_kernel_spec("sum(brownian"), InputError);
  CHECK_THROWS_AS(Kernel::squared_exponential(0.0), InputError);
  CHECK_THROWS_AS(Kernel::matern(-1, 1.0), InputError);
  CHECK_THROWS_AS(eval(Kernel::brownian(), point(-0.1), point(0.5)), DomainError);
  CHECK_THROWS_AS(eval(Kernel::squared_exponential(1.0), point(0.1), point({0.1, 0.2})), InputError);
  CHECK_THROWS(eval(Kernel::squared_exponential(1.0), point(NAN), point(0.2)));
}
