#include "gpk/spectral.hpp"

#include <cmath>
#include <numbers>

#include "gpk/error.hpp"
#include "gpk/linalg.hpp"
#include "gpk/stats.hpp"

namespace gpk {

namespace {

constexpr double kTruncationRelative = 1e-12;

double periodic_eigenfunction(std::size_t index, double x) {
  const double pi = std::numbers::pi;
  if (index == 1) return 1.0;
  if (index % 2 == 0) return std::numbers::sqrt2 * std::cos(static_cast<double>(index) * pi * x);
  return std::numbers::sqrt2 * std::sin(static_cast<double>(index - 1) * pi * x);
}

void require_count(const EigenSystem& sys, std::size_t count) {
  if (count > sys.size()) throw InputError("requested more eigenpairs than the system holds");
}

}  // namespace

EigenSystem EigenSystem::analytic_periodic(int order, std::size_t count) {
  std::vector<double> lambdas(count);
  for (std::size_t i = 0; i < count; ++i) lambdas[i] = periodic_sobolev_eigenvalue(order, i + 1);
  return EigenSystem(Measure::uniform(0.0, 1.0), std::move(lambdas), AnalyticPeriodic{order});
}

EigenSystem EigenSystem::nystrom(Kernel kernel, Measure measure, PointSet nodes, Vector weights,
                                 std::vector<double> lambdas, Matrix nodal_values) {
  return EigenSystem(std::move(measure), std::move(lambdas),
                     Nystrom{std::move(kernel), std::move(nodes), std::move(weights), std::move(nodal_values)});
}

double EigenSystem::eigenfunction(std::size_t i, const Point& x) const {
  if (i >= size()) throw InputError("eigenfunction index out of range");
  if (const auto* a = std::get_if<AnalyticPeriodic>(&kind_)) {
    (void)a;
    if (x.size() != 1) throw DomainError("periodic eigenfunctions take scalar inputs");
    return periodic_eigenfunction(i + 1, x[0]);
  }
  const auto& ny = std::get<Nystrom>(kind_);
  double acc = 0.0;
  for (std::size_t j = 0; j < ny.nodes.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    acc += ny.weights[jj] * eval(ny.kernel, x, ny.nodes[j]) * ny.nodal_values(jj, static_cast<Eigen::Index>(i));
  }
  return acc / lambdas_[i];
}

Vector EigenSystem::eigenfunctions(const Point& x, std::size_t count) const {
  if (count > size()) throw InputError("requested more eigenfunctions than the system holds");
  Vector out(static_cast<Eigen::Index>(count));
  if (std::holds_alternative<AnalyticPeriodic>(kind_)) {
    if (x.size() != 1) throw DomainError("periodic eigenfunctions take scalar inputs");
    for (std::size_t i = 0; i < count; ++i) out[static_cast<Eigen::Index>(i)] = periodic_eigenfunction(i + 1, x[0]);
    return out;
  }
  const auto& ny = std::get<Nystrom>(kind_);
  Vector kw(static_cast<Eigen::Index>(ny.nodes.size()));
  for (std::size_t j = 0; j < ny.nodes.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    kw[jj] = ny.weights[jj] * eval(ny.kernel, x, ny.nodes[j]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out[ii] = kw.dot(ny.nodal_values.col(ii)) / lambdas_[i];
  }
  return out;
}

double periodic_sobolev_eigenvalue(int order, std::size_t index) {
  if (index < 1) throw InputError("eigenvalue index is one-based");
  if (index == 1) return 1.0;
  const double m = (index % 2 == 0) ? static_cast<double>(index) / 2.0 : static_cast<double>(index - 1) / 2.0;
  return std::pow(m, -2.0 * order);
}

EigenSystem periodic_sobolev_eigensystem(int order, std::size_t count) {
  if (order < 1) throw InputError("periodic Sobolev order must be positive");
  if (count < 1) throw InputError("eigensystem truncation count must be at least 1");
  return EigenSystem::analytic_periodic(order, count);
}

EigenSystem nystrom_eigensystem(const Kernel& kernel, const Measure& measure, std::size_t node_count) {
  PointSet nodes;
  Vector weights;
  if (const auto* u = measure.as<UniformInterval>()) {
    if (node_count < 2) throw InputError("Nystrom discretisation needs at least 2 nodes");
    const double h = (u->b - u->a) / static_cast<double>(node_count);
    nodes.reserve(node_count);
    for (std::size_t j = 0; j < node_count; ++j) nodes.push_back(point(u->a + (static_cast<double>(j) + 0.5) * h));
    weights = Vector::Constant(static_cast<Eigen::Index>(node_count), 1.0 / static_cast<double>(node_count));
  } else if (const auto* f = measure.as<FiniteMeasure>()) {
    nodes = f->points;
    weights = Eigen::Map<const Vector>(f->weights.data(), static_cast<Eigen::Index>(f->weights.size()));
  } else {
    throw UnsupportedError("Nystrom eigensystems support uniform-interval and finite measures");
  }

  const Vector sqrt_w = weights.cwiseSqrt();
  Matrix scaled = gram(kernel, nodes);
  scaled = sqrt_w.asDiagonal() * scaled * sqrt_w.asDiagonal();
  // Mirror to remove the last-bit asymmetry from the diagonal scaling.
  scaled = (0.5 * (scaled + scaled.transpose())).eval();
  const SymEigen eig = sym_eigen(scaled);

  const double top = eig.values.size() > 0 ? eig.values[0] : 0.0;
  if (!(top > 0.0)) throw NumericalError("Nystrom operator has no positive eigenvalue");
  std::vector<double> lambdas;
  for (Eigen::Index i = 0; i < eig.values.size() && eig.values[i] > kTruncationRelative * top; ++i) {
    lambdas.push_back(eig.values[i]);
  }
  const auto kept = static_cast<Eigen::Index>(lambdas.size());
  Matrix nodal(eig.vectors.rows(), kept);
  for (Eigen::Index i = 0; i < kept; ++i) {
    nodal.col(i) = eig.vectors.col(i).cwiseQuotient(sqrt_w);
    // Fix the sign so the largest-magnitude nodal value is positive.
    Eigen::Index arg = 0;
    nodal.col(i).cwiseAbs().maxCoeff(&arg);
    if (nodal(arg, i) < 0.0) nodal.col(i) *= -1.0;
  }
  return EigenSystem::nystrom(kernel, measure, std::move(nodes), std::move(weights), std::move(lambdas),
                              std::move(nodal));
}

double mercer_residual(const EigenSystem& sys, const Kernel& kernel, const Point& x, const Point& y,
                       std::size_t count) {
  require_count(sys, count);
  const double k = eval(kernel, x, y);
  if (count == 0) return k;
  const Vector fx = sys.eigenfunctions(x, count);
  const Vector fy = sys.eigenfunctions(y, count);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    acc += sys.eigenvalues()[i] * fx[ii] * fy[ii];
  }
  return k - acc;
}

double power_kernel_eval(const EigenSystem& sys, double theta, const Point& x, const Point& y, std::size_t count) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InputError("power theta must lie in (0, 1]");
  require_count(sys, count);
  if (count == 0) return 0.0;
  const Vector fx = sys.eigenfunctions(x, count);
  const Vector fy = sys.eigenfunctions(y, count);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    acc += std::pow(sys.eigenvalues()[i], theta) * fx[ii] * fy[ii];
  }
  return acc;
}

double periodic_mercer_tail_bound(int order, std::size_t count) {
  const std::size_t pairs = count == 0 ? 0 : (count - 1) / 2;
  // sum_{m > pairs} m^{-2s}: explicit terms up to a cutoff, then the integral tail.
  const std::size_t cutoff = pairs + 200000;
  double acc = 0.0;
  for (std::size_t m = cutoff; m > pairs; --m) acc += std::pow(static_cast<double>(m), -2.0 * order);
  acc += std::pow(static_cast<double>(cutoff) + 0.5, 1.0 - 2.0 * order) / (2.0 * order - 1.0);
  if (count == 0) acc += 0.5;  // the constant mode 1 = 2 * (1/2) is missing too
  return 2.0 * acc;
}

HsInclusion hs_inclusion_norm_sq(const std::vector<double>& lambdas, const std::vector<double>& gammas,
                                 std::optional<DecayExponents> exponents) {
  if (lambdas.size() != gammas.size()) throw InputError("eigenvalue and weight sequences differ in length");
  if (lambdas.empty()) throw InputError("empty eigenvalue sequence");
  HsInclusion out{};
  std::vector<double> ratios(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !(gammas[i] > 0.0)) throw InputError("sequences must be positive");
    ratios[i] = lambdas[i] / gammas[i];
    out.partial_sum += ratios[i];
  }
  if (exponents) {
    out.tail_exponent = exponents->lambda_exponent - exponents->gamma_exponent;
    out.analytic = true;
  } else {
    const std::size_t n = ratios.size();
    const std::size_t start = std::max<std::size_t>(1, n / 10);
    if (n - start + 1 < 2) throw InputError("need at least a decade of terms to fit a decay exponent");
    std::vector<double> lx, ly;
    for (std::size_t i = start; i <= n; ++i) {
      lx.push_back(std::log(static_cast<double>(i)));
      ly.push_back(std::log(ratios[i - 1]));
    }
    out.tail_exponent = ols_slope(lx, ly);
    out.analytic = false;
  }
  out.convergent = out.tail_exponent < -1.0;
  return out;
}

PowerClassification driscoll_power_classification(int order, double theta) {
  if (order < 1) throw InputError("periodic Sobolev order must be positive");
  if (!(theta > 0.0 && theta <= 1.0)) throw InputError("theta must lie in (0, 1]");
  PowerClassification out{};
  out.threshold = (2.0 * order - 1.0) / (2.0 * order);
  // lambda_i = Theta(i^{-2s}) so sum lambda_i^{1-theta} converges iff 2s(1 - theta) > 1.
  out.in_space = theta < out.threshold;
  out.checkpoints = {100, 10000, 1000000};
  double acc = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 1; i <= out.checkpoints.back(); ++i) {
    acc += std::pow(periodic_sobolev_eigenvalue(order, i), 1.0 - theta);
    if (i == out.checkpoints[next]) {
      out.partial_sums.push_back(acc);
      ++next;
    }
  }
  return out;
}

}  // namespace gpk
