#include "gpk/linalg.hpp"

#include <cmath>
#include <string>

#include "gpk/error.hpp"
#include "gpk/format.hpp"

namespace gpk {

namespace {

void require_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) throw InputError("matrix must be square");
  if (a.size() == 0) return;
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError("matrix is not symmetric");
  }
}

}  // namespace

Vector CholFactor::solve(const Vector& b) const {
  if (b.size() != lower_.rows()) throw InputError("solve: dimension mismatch");
  if (b.size() == 0) return b;
  Vector x = lower_.triangularView<Eigen::Lower>().solve(b);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Matrix CholFactor::solve(const Matrix& b) const {
  if (b.rows() != lower_.rows()) throw InputError("solve: dimension mismatch");
  if (b.size() == 0) return b;
  Matrix x = lower_.triangularView<Eigen::Lower>().solve(b);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Vector CholFactor::half_solve(const Vector& b) const {
  if (b.size() != lower_.rows()) throw InputError("half_solve: dimension mismatch");
  if (b.size() == 0) return b;
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

double CholFactor::quad_form(const Vector& b) const { return half_solve(b).squaredNorm(); }

Vector CholFactor::multiply(const Vector& z) const {
  if (z.size() != lower_.rows()) throw InputError("multiply: dimension mismatch");
  if (z.size() == 0) return z;
  return lower_.triangularView<Eigen::Lower>() * z;
}

CholFactor cholesky_with_jitter(const Matrix& a, const JitterPolicy& policy) {
  require_symmetric(a);
  const Eigen::Index n = a.rows();
  if (n == 0) return CholFactor(Matrix(0, 0), 0.0, 0.0);

  const double mean_diag = a.diagonal().mean();
  const double j0 = policy.initial_relative * (mean_diag > 0.0 ? mean_diag : 1.0);

  double jitter = 0.0;
  for (int attempt = 0; attempt <= policy.max_attempts; ++attempt) {
    if (attempt > 0) jitter = j0 * std::pow(policy.growth_factor, attempt - 1);
    Matrix shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Matrix l = llt.matrixL();
      if (l.allFinite() && (l.diagonal().array() > 0.0).all()) return CholFactor(std::move(l), jitter, mean_diag);
    }
  }
  throw SingularMatrixError("Cholesky factorization failed after jitter " + format_double(jitter), jitter);
}

SymEigen sym_eigen(const Matrix& a) {
  require_symmetric(a);
  if (a.rows() == 0) return {Vector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  // Eigen returns ascending order.
  SymEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

}  // namespace gpk
