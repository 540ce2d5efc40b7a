#include <random>

#include "doctest.h"
#include "gpk/error.hpp"
#include "gpk/linalg.hpp"

using namespace gpk;
using doctest::Approx;

namespace {

Matrix random_spd(std::mt19937_64& eng, int n) {
  std::normal_distribution<double> z;
  Matrix a(n, n);
  for (auto& v : a.reshaped()) v = z(eng);
  return a * a.transpose() + 0.1 * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("factorization examples") {
  const CholFactor id = cholesky_with_jitter(Matrix::Identity(3, 3));
  CHECK(id.lower() == Matrix::Identity(3, 3));
  CHECK(id.jitter_applied() == 0.0);

  Matrix a(2, 2);
  a << 4, 2, 2, 5;
  const CholFactor f = cholesky_with_jitter(a);
  Matrix l(2, 2);
  l << 2, 0, 1, 2;
  CHECK((f.lower() - l).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(f.jitter_applied() == 0.0);

  const Vector x = f.solve(Vector((Vector(2) << 2, 7).finished()));
  CHECK(x[0] == Approx(-0.25).epsilon(1e-15));
  CHECK(x[1] == Approx(1.5).epsilon(1e-15));
  const Vector b = Vector::LinSpaced(3, 1, 3);
  CHECK(id.solve(b) == b);
}

TEST_CASE("rank-deficient input is rescued by recorded jitter") {
  const CholFactor f = cholesky_with_jitter(Matrix::Ones(3, 3));
  CHECK(f.jitter_applied() > 0.0);
  CHECK(f.jitter_within_gate());
  const Matrix rebuilt = f.lower() * f.lower().transpose();
  CHECK((rebuilt - Matrix::Ones(3, 3) - f.jitter_applied() * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("failures") {
  Matrix neg(2, 2);
  neg << 1, 0, 0, -1;
  try {
    cholesky_with_jitter(neg);
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.last_jitter() > 0.0);
  }
  Matrix asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(cholesky_with_jitter(asym), InputError);
  CHECK_THROWS_AS(cholesky_with_jitter(Matrix::Ones(2, 3)), InputError);
}

TEST_CASE("symmetric eigendecomposition") {
  const SymEigen d = sym_eigen(Vector((Vector(3) << 3, 1, 2).finished()).asDiagonal().toDenseMatrix());
  CHECK(d.values[0] == 3.0);
  CHECK(d.values[1] == 2.0);
  CHECK(d.values[2] == 1.0);

  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const SymEigen e = sym_eigen(a);
  CHECK(e.values[0] == Approx(3.0).epsilon(1e-15));
  CHECK(e.values[1] == Approx(1.0).epsilon(1e-15));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(e.vectors(0, 0)) == Approx(r));
  CHECK(e.vectors(0, 0) * e.vectors(1, 0) > 0.0);
  CHECK(e.vectors(0, 1) * e.vectors(1, 1) < 0.0);
}

TEST_CASE("solve and quadratic form on random SPD systems") {
  std::mt19937_64 eng(21);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(eng() % 15);
    const Matrix a = random_spd(eng, n);
    Vector b(n);
    for (auto& v : b) v = z(eng);
    const CholFactor f = cholesky_with_jitter(a);
    const Vector x = f.solve(b);
    CHECK((a * x - b).norm() / b.norm() <= 1e-10);
    const double direct = b.dot(a.inverse() * b);
    CHECK(f.quad_form(b) == Approx(direct).epsilon(1e-9));
    CHECK((f.multiply(f.half_solve(b)) - b).norm() <= 1e-10 * b.norm());
  }
}
