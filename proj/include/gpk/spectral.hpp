#pragma once

#include <optional>
#include <vector>

#include "gpk/kernels.hpp"
#include "gpk/measure.hpp"

namespace gpk {

/// Eigenpairs (lambda_i, phi_i) of the integral operator
/// (T f)(x) = \int k(x, t) f(t) dnu(t), ordered by index.
///
/// Analytic systems exist for the periodic Sobolev family under the uniform
/// measure on [0, 1]. Every other pair is discretised with a Nystrom rule:
/// nodes t_j with weights w_j, eigenvectors of W^{1/2} K W^{1/2}, and the
/// extension phi_i(x) = (1/lambda_i) sum_j w_j k(x, t_j) phi_i(t_j).
class EigenSystem {
 public:
  struct AnalyticPeriodic {
    int order;
  };
  struct Nystrom {
    Kernel kernel;
    PointSet nodes;
    Vector weights;
    Matrix nodal_values;  // nodal_values(j, i) = phi_i(t_j)
  };

  static EigenSystem analytic_periodic(int order, std::size_t count);
  static EigenSystem nystrom(Kernel kernel, Measure measure, PointSet nodes, Vector weights,
                             std::vector<double> lambdas, Matrix nodal_values);

  std::size_t size() const { return lambdas_.size(); }
  const std::vector<double>& eigenvalues() const { return lambdas_; }
  const Measure& measure() const { return measure_; }
  bool is_analytic() const { return std::holds_alternative<AnalyticPeriodic>(kind_); }
  const std::variant<AnalyticPeriodic, Nystrom>& kind() const { return kind_; }

  /// phi_i(x) for the zero-based index i.
  double eigenfunction(std::size_t i, const Point& x) const;

  /// (phi_0(x), ..., phi_{count-1}(x))
  Vector eigenfunctions(const Point& x, std::size_t count) const;

 private:
  EigenSystem(Measure measure, std::vector<double> lambdas, std::variant<AnalyticPeriodic, Nystrom> kind)
      : measure_(std::move(measure)), lambdas_(std::move(lambdas)), kind_(std::move(kind)) {}

  Measure measure_;
  std::vector<double> lambdas_;
  std::variant<AnalyticPeriodic, Nystrom> kind_;
};

/// Eigenvalue of the periodic Sobolev kernel of order s at the one-based index i:
/// 1 for i = 1, (i/2)^(-2s) for even i, ((i-1)/2)^(-2s) for odd i >= 3.
double periodic_sobolev_eigenvalue(int order, std::size_t index);

/// Exactly `count` eigenpairs in index order; phi_1 = 1,
/// phi_i = sqrt(2) cos(i pi x) for even i, sqrt(2) sin((i-1) pi x) for odd i >= 3.
EigenSystem periodic_sobolev_eigensystem(int order, std::size_t count);

/// Midpoint rule with `node_count` nodes on a uniform interval, or the atoms of
/// a finite measure. Eigenvalues below 1e-12 * lambda_1 are discarded.
EigenSystem nystrom_eigensystem(const Kernel& kernel, const Measure& measure, std::size_t node_count);

/// k(x, x') - sum_{i < count} lambda_i phi_i(x) phi_i(x')
double mercer_residual(const EigenSystem& sys, const Kernel& kernel, const Point& x, const Point& y,
                       std::size_t count);

/// Truncated power kernel sum_{i < count} lambda_i^theta phi_i(x) phi_i(x'), 0 < theta <= 1.
double power_kernel_eval(const EigenSystem& sys, double theta, const Point& x, const Point& y, std::size_t count);

/// 2 * sum_{m > complete_pairs} m^(-2s): a bound on |k_s - truncated Mercer sum| when the
/// first `count` periodic modes are kept, where complete_pairs = floor((count - 1) / 2).
double periodic_mercer_tail_bound(int order, std::size_t count);

/// Known power-law decay exponents: lambda_i ~ i^lambda_exponent, gamma_i ~ i^gamma_exponent.
struct DecayExponents {
  double lambda_exponent;
  double gamma_exponent;
};

struct HsInclusion {
  double partial_sum;      // sum_i lambda_i / gamma_i
  double tail_exponent;    // exponent of lambda_i / gamma_i
  bool convergent;         // tail_exponent < -1
  bool analytic;           // exponent from DecayExponents instead of a fit
};

/// Hilbert-Schmidt inclusion condition sum_i lambda_i / gamma_i < infinity.
/// Without known exponents the exponent is a least-squares log-log slope over
/// the last decade of indices.
HsInclusion hs_inclusion_norm_sq(const std::vector<double>& lambdas, const std::vector<double>& gammas,
                                 std::optional<DecayExponents> exponents = std::nullopt);

struct PowerClassification {
  bool in_space;
  double threshold;                      // (2s - 1) / (2s)
  std::vector<std::size_t> checkpoints;  // 1e2, 1e4, 1e6
  std::vector<double> partial_sums;      // sum_{i <= checkpoint} lambda_i^(1 - theta)
};

/// Whether samples of GP(0, k_s) lie in the theta-power of the periodic Sobolev
/// RKHS almost surely, i.e. whether sum_i lambda_i^(1 - theta) converges.
PowerClassification driscoll_power_classification(int order, double theta);

}  // namespace gpk
