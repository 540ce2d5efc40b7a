#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gpk/error.hpp"
#include "gpk/kernels.hpp"
#include "gpk/spectral.hpp"

using namespace gpk;
using doctest::Approx;

TEST_CASE("periodic eigenvalues") {
  CHECK(periodic_sobolev_eigenvalue(1, 1) == 1.0);
  CHECK(periodic_sobolev_eigenvalue(1, 2) == 1.0);
  CHECK(periodic_sobolev_eigenvalue(1, 3) == 1.0);
  CHECK(periodic_sobolev_eigenvalue(1, 4) == 0.25);
  CHECK(periodic_sobolev_eigenvalue(2, 5) == 1.0 / 16.0);
  const EigenSystem sys = periodic_sobolev_eigensystem(2, 7);
  CHECK(sys.size() == 7);
  CHECK(sys.is_analytic());
}

TEST_CASE("analytic eigenfunctions are orthonormal") {
  const EigenSystem sys = periodic_sobolev_eigensystem(1, 9);
  constexpr int nodes = 10000;
  Matrix gramian = Matrix::Zero(9, 9);
  for (int j = 0; j < nodes; ++j) {
    const Vector phi = sys.eigenfunctions(point((j + 0.5) / nodes), 9);
    gramian += phi * phi.transpose() / nodes;
  }
  CHECK((gramian - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("Nystrom eigenvalues") {
  const Measure u = Measure::uniform(0.0, 1.0);
  const EigenSystem bm = nystrom_eigensystem(Kernel::brownian(), u, 2000);
  CHECK(bm.eigenvalues()[0] == Approx(4.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-3));

  // Doubling the node count moves the top eigenvalues very little.
  const EigenSystem fine = nystrom_eigensystem(Kernel::brownian(), u, 1000);
  const EigenSystem coarse = nystrom_eigensystem(Kernel::brownian(), u, 500);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(fine.eigenvalues()[i] - coarse.eigenvalues()[i]) <= 1e-3 * fine.eigenvalues()[i]);
  }

  const EigenSystem per = nystrom_eigensystem(Kernel::periodic_sobolev(1), u, 1000);
  const EigenSystem exact = periodic_sobolev_eigensystem(1, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(per.eigenvalues()[i] == Approx(exact.eigenvalues()[i]).epsilon(1e-3));
  }

  const EigenSystem one = nystrom_eigensystem(Kernel::squared_exponential(0.5), Measure::dirac(point(0.3)), 10);
  REQUIRE(one.size() == 1);
  CHECK(one.eigenvalues()[0] == Approx(1.0));
  CHECK(std::abs(one.eigenfunction(0, point(0.3))) == Approx(1.0));
}

TEST_CASE("Mercer residuals") {
  const Kernel k = Kernel::periodic_sobolev(1);
  const EigenSystem sys = periodic_sobolev_eigensystem(1, 401);
  const double bound = periodic_mercer_tail_bound(1, 401);
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) worst = std::max(worst, std::abs(mercer_residual(sys, k, point(i / 20.0), point(j / 20.0), 401)));
  }
  CHECK(worst <= bound + 1e-14);
  CHECK(mercer_residual(sys, k, point(0.2), point(0.7), 0) == k(point(0.2), point(0.7)));

  // Truncated diagonal increases with M and stays below k(x, x).
  for (double x : {0.0, 0.13, 0.5, 0.77}) {
    double prev = -1.0;
    for (std::size_t m : {1, 2, 5, 20, 100, 401}) {
      const double diag = k(point(x), point(x)) - mercer_residual(sys, k, point(x), point(x), m);
      CHECK(diag >= prev - 1e-14);
      CHECK(diag <= k(point(x), point(x)) + 1e-12);
      prev = diag;
    }
  }
}

TEST_CASE("power kernels") {
  const EigenSystem s2 = periodic_sobolev_eigensystem(2, 401);
  const Kernel k1 = Kernel::periodic_sobolev(1);
  const double bound = periodic_mercer_tail_bound(1, 401);
  for (double x : {0.1, 0.4, 0.9}) {
    // The square root of the order-2 kernel has the order-1 eigenvalues.
    CHECK(std::abs(power_kernel_eval(s2, 0.5, point(x), point(0.3), 401) - k1(point(x), point(0.3))) <= bound + 1e-12);
    const Kernel k2 = Kernel::periodic_sobolev(2);
    CHECK(std::abs(power_kernel_eval(s2, 1.0, point(x), point(0.3), 401) - k2(point(x), point(0.3))) <=
          periodic_mercer_tail_bound(2, 401) + 1e-12);
    double prev = 0.0;
    for (double theta : {1.0, 0.8, 0.6, 0.4}) {
      const double d = power_kernel_eval(s2, theta, point(x), point(x), 101);
      CHECK(d >= prev);
      prev = d;
    }
  }
}

TEST_CASE("Hilbert-Schmidt inclusion") {
  std::vector<double> lam, gam, lam2, gam2;
  for (int i = 1; i <= 100000; ++i) {
    lam.push_back(std::pow(i, -4.0));
    gam.push_back(std::pow(i, -2.0));
    lam2.push_back(std::pow(i, -2.0));
    gam2.push_back(std::pow(i, -1.5));
  }
  const auto conv = hs_inclusion_norm_sq(lam, gam);
  CHECK(conv.convergent);
  CHECK(conv.partial_sum == Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-4));
  CHECK_FALSE(hs_inclusion_norm_sq(lam, lam).convergent);
  const auto div = hs_inclusion_norm_sq(lam2, gam2);
  CHECK_FALSE(div.convergent);
  CHECK(div.tail_exponent == Approx(-0.5).epsilon(1e-3));
  CHECK(hs_inclusion_norm_sq(lam, gam, DecayExponents{-4.0, -2.0}).analytic);
  CHECK_THROWS_AS(hs_inclusion_norm_sq({1.0}, {1.0, 2.0}), InputError);
}

TEST_CASE("sample-path power classification") {
  CHECK(driscoll_power_classification(1, 0.4).in_space);
  CHECK(driscoll_power_classification(2, 0.74).in_space);
  CHECK_FALSE(driscoll_power_classification(2, 0.76).in_space);
  for (int s : {1, 2, 3}) {
    CHECK(driscoll_power_classification(s, 0.3).threshold == Approx((2.0 * s - 1.0) / (2.0 * s)));
    CHECK_FALSE(driscoll_power_classification(s, 0.999).in_space);
  }
  CHECK_THROWS(driscoll_power_classification(1, 1.5));
  CHECK_THROWS(driscoll_power_classification(0, 0.5));
}
