#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpk/kernels.hpp"
#include "gpk/measure.hpp"
#include "gpk/quadrature.hpp"

namespace gpk {

// ---- GP / RKHS equivalence battery ---------------------------------------

struct EquivalenceInstance {
  int id;
  Kernel kernel;
  PointSet xs;
  Vector ys;
  PointSet probes;  // off the training inputs
};

/// Random, well-conditioned instances cycling through SE, Matern (m = 1, 2),
/// Laplace, Brownian and periodic Sobolev kernels; some SE/Matern instances
/// are two-dimensional. n ranges over 1..max_n.
std::vector<EquivalenceInstance> equivalence_instances(std::uint64_t seed, std::size_t count,
                                                       std::size_t max_n = 40, std::size_t probes = 50);

/// Maximum relative deviations of each identity on one instance. Means are
/// scaled by 1 + |y|_inf, variances by k(x,x) + s^2.
struct EquivalenceRow {
  int id = 0;
  std::string kernel;
  std::size_t n = 0;
  double interp = 0;           // GP posterior mean vs minimum-norm interpolant
  double gpr_krr = 0;          // GP regression mean vs KRR with lambda = s^2 / n
  double reg_mean = 0;         // regularized-kernel interpolant vs KRR, off the inputs
  double reg_var = 0;          // regularized interpolation variance vs regression variance + s^2
  double reg_train = 0;        // regularized interpolant at the inputs vs y
  double krr_train_gap = 0;    // min over noise levels of max_i |krr(x_i) - y_i| / (1 + |y|_inf)
  double worst_case = 0;       // power-function formulas vs residual span norms
  double jitter_relative = 0;  // largest applied jitter / mean(diag)
  double cond_estimate = 0;    // (max L_ii / min L_ii)^2 of the noise-free factor
  bool flagged = false;        // any jitter or cond_estimate > 1e10
};

inline const std::vector<double> kDefaultNoiseLevels = {0.01, 0.1, 1.0};

EquivalenceRow check_equivalence(const EquivalenceInstance& inst,
                                 const std::vector<double>& noise_levels = kDefaultNoiseLevels);

struct EquivalenceSummary {
  std::vector<EquivalenceRow> rows;
  EquivalenceRow maxima;  // column-wise maxima (krr_train_gap: minimum)
  std::size_t flagged = 0;
};

EquivalenceSummary run_equivalence(const std::vector<EquivalenceInstance>& instances,
                                   const std::vector<double>& noise_levels = kDefaultNoiseLevels);

// ---- Rate studies ----------------------------------------------------------

struct RateStudy {
  std::vector<double> n;
  std::vector<double> metric;
  std::vector<double> extra;  // study-specific companion column
  double slope = 0;           // OLS of log2 metric on log2 n over the top half
  bool monotone_decreasing = false;
  bool within_gate = true;    // every factorization stayed under the jitter gate
};

struct ContractionRow {
  std::size_t n;
  double fill_distance;
  double posterior_var;
  double power_function;
  double jitter_relative;
};

/// Posterior variance at `probe` for grids linspace(0, 1, n); fill distance is
/// taken over the ball of radius rho around the probe.
std::vector<ContractionRow> contraction_sweep(const Kernel& kernel, const std::vector<std::size_t>& ns,
                                              double probe = 0.5, double rho = 0.25);

/// n in {2^lo, ..., 2^hi}; metric = posterior variance at 0.5.
RateStudy contraction_study(const Kernel& kernel, int log2_lo = 4, int log2_hi = 9);

struct KrrStudyConfig {
  int log2_lo = 6;
  int log2_hi = 12;
  std::size_t seeds = 10;
  double noise_sd = 0.1;
  double bandwidth = 0.2;  // Matern m = 1
  std::size_t eval_grid = 2000;
};

/// f*(x) = min(x, 1 - x), X ~ U[0,1], lambda = noise^2 / n; metric = median
/// over seeds of the squared L2(P_X) error on a midpoint grid.
RateStudy krr_rate_study(std::uint64_t seed, const KrrStudyConfig& cfg = {});

struct McMeanConfig {
  int log2_lo = 5;
  int log2_hi = 12;
  std::size_t seeds = 20;
  std::size_t atoms = 10;
  double bandwidth = 0.5;
};

/// metric = median over seeds of MMD(P, empirical of n draws) for a finite P.
RateStudy mc_mean_rate_study(std::uint64_t seed, const McMeanConfig& cfg = {});

// ---- Quadrature node selection -----------------------------------------------

/// Greedy sequential minimisation of the BQ posterior variance over a
/// candidate set. A grid-search heuristic without optimality guarantees.
std::vector<std::size_t> greedy_bq_nodes(const Kernel& kernel, const Measure& measure, const PointSet& candidates,
                                         std::size_t count);

}  // namespace gpk
