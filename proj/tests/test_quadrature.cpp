#include <cmath>
#include <random>

#include "doctest.h"
#include "gpk/embeddings.hpp"
#include "gpk/error.hpp"
#include "gpk/experiments.hpp"
#include "gpk/kernels.hpp"
#include "gpk/quadrature.hpp"
#include "gpk/stats.hpp"

using namespace gpk;
using doctest::Approx;

TEST_CASE("quadrature examples") {
  const Kernel bm = Kernel::brownian();
  const Measure u = Measure::uniform(0.0, 1.0);
  const QuadratureRule empty = bq_rule(bm, u, {});
  CHECK(empty.posterior_variance == Approx(1.0 / 3.0));
  CHECK(bq_estimate(empty, Vector(0)) == 0.0);

  const QuadratureRule one = bq_rule(bm, u, points_1d({0.4}));
  CHECK(one.weights[0] == Approx(1.0 - 0.4 / 2.0).epsilon(1e-15));
  CHECK(one.posterior_variance == Approx(0.07733333333333331).epsilon(1e-13));

  const QuadratureRule at_one = bq_rule(bm, u, points_1d({1.0}));
  CHECK(bq_estimate(at_one, Vector::Ones(1)) == Approx(0.5).epsilon(1e-15));

  const QuadratureRule per = bq_rule(Kernel::periodic_sobolev(1), u, points_1d({0.1, 0.3, 0.75}));
  CHECK((per.kernel_means - Vector::Ones(3)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(bq_estimate(per, Vector::Zero(3)) == 0.0);

  CHECK_THROWS_AS(bq_rule(bm, u, points_1d({0.2, 0.2})), PreconditionError);
  CHECK_THROWS_AS(bq_rule(bm, Measure::gaussian(point(0.5), 1.0), points_1d({0.2})), UnsupportedError);
  CHECK_THROWS_AS(bq_estimate(one, Vector::Ones(2)), InputError);
}

TEST_CASE("weights and variance against an independent solve") {
  const QuadratureRule r = bq_rule(Kernel::squared_exponential(0.4), Measure::uniform(0.0, 1.0), points_1d({0.1, 0.5, 0.9}));
  CHECK(r.weights[0] == Approx(0.28250950671623426).epsilon(1e-10));
  CHECK(r.weights[1] == Approx(0.4464602756189654).epsilon(1e-10));
  CHECK(r.weights[2] == Approx(0.28250950671623426).epsilon(1e-10));
  CHECK(r.initial_variance == Approx(0.5490018915558214).epsilon(1e-12));
  CHECK(r.posterior_variance == Approx(0.0015268046686385262).epsilon(1e-8));
}

TEST_CASE("variance equals MMD^2 and is monotone in the nodes") {
  std::mt19937_64 eng(81);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<std::pair<Kernel, Measure>> cases = {
      {Kernel::squared_exponential(0.2), Measure::uniform(0.0, 1.0)},
      {Kernel::squared_exponential(0.3), Measure::gaussian(point(0.5), 0.05)},
      {Kernel::matern(1, 0.3), Measure::uniform(0.0, 1.0)},
      {Kernel::matern(0, 0.5), Measure::uniform(0.0, 1.0)},
      {Kernel::brownian(), Measure::uniform(0.0, 1.0)},
      {Kernel::periodic_sobolev(2), Measure::uniform(0.0, 1.0)}};
  for (const auto& [k, m] : cases) {
    PointSet nodes;
    double prev = bq_rule(k, m, nodes).posterior_variance;
    // One jittered node per cell, visited out of order, keeps the Gram
    // matrix well enough conditioned for a 1e-10 comparison.
    for (int i : {3, 0, 6, 1, 7, 4, 2, 5}) {
      nodes.push_back(point(0.05 + 0.9 * (i + 0.25 + 0.5 * u(eng)) / 8.0));
      const QuadratureRule r = bq_rule(k, m, nodes);
      CHECK(std::abs(r.posterior_variance - mmd_squared_weighted(k, m, nodes, r.weights)) <=
            1e-10 * r.initial_variance);
      CHECK(r.posterior_variance <= prev + 1e-10);
      prev = r.posterior_variance;
    }
  }
}

TEST_CASE("error bound for span integrands") {
  std::mt19937_64 eng(82);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  const Kernel k = Kernel::matern(1, 0.25);
  const Measure m = Measure::uniform(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    PointSet zs, nodes;
    Vector a(4);
    for (int j = 0; j < 4; ++j) {
      zs.push_back(point(u(eng)));
      a[j] = z(eng);
    }
    for (int j = 0; j < 6; ++j) nodes.push_back(point((j + u(eng)) / 6.0));
    const QuadratureRule r = bq_rule(k, m, nodes);
    Vector vals(6);
    double exact = 0.0;
    for (int i = 0; i < 6; ++i) vals[i] = 0.0;
    for (int j = 0; j < 4; ++j) {
      exact += a[j] * kernel_mean(k, m, zs[static_cast<std::size_t>(j)]);
      for (int i = 0; i < 6; ++i) vals[i] += a[j] * k(nodes[static_cast<std::size_t>(i)], zs[static_cast<std::size_t>(j)]);
    }
    const double norm = std::sqrt(a.dot(gram(k, zs) * a));
    CHECK(std::abs(bq_estimate(r, vals) - exact) <= norm * std::sqrt(r.posterior_variance) + 1e-9);
  }
}

TEST_CASE("Monte-Carlo baseline") {
  const Measure u = Measure::uniform(0.0, 1.0);
  CHECK(mc_baseline(u, [](const Point&) { return 2.5; }, 100, RngSpec{1, 0}) == 2.5);
  std::vector<double> est;
  for (std::uint64_t s = 0; s < 20; ++s) {
    est.push_back(mc_baseline(u, [](const Point& x) { return x[0]; }, 10000, RngSpec{s, 0}));
  }
  CHECK(std::abs(mean(est) - 0.5) <= 5.0 * standard_error(est));
  // Variance over seeds scales like 1/n.
  std::vector<double> ns, vars;
  for (std::size_t n : {64, 256, 1024, 4096}) {
    std::vector<double> e;
    for (std::uint64_t s = 0; s < 200; ++s) e.push_back(mc_baseline(u, [](const Point& x) { return x[0]; }, n, RngSpec{s, 1}));
    ns.push_back(static_cast<double>(n));
    vars.push_back(sample_variance(e));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    lx.push_back(std::log2(ns[i]));
    ly.push_back(std::log2(vars[i]));
  }
  CHECK(ols_slope(lx, ly) == Approx(-1.0).epsilon(0.2));
}

TEST_CASE("greedy node selection") {
  const PointSet cand = linspace(0.0, 1.0, 41);
  const auto idx = greedy_bq_nodes(Kernel::matern(1, 0.3), Measure::uniform(0.0, 1.0), cand, 5);
  REQUIRE(idx.size() == 5);
  PointSet nodes;
  double prev = INFINITY;
  for (std::size_t i : idx) {
    nodes.push_back(cand[i]);
    const double v = bq_rule(Kernel::matern(1, 0.3), Measure::uniform(0.0, 1.0), nodes).posterior_variance;
    CHECK(v <= prev);
    prev = v;
  }
}
