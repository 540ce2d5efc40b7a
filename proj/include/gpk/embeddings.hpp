#pragma once

#include <string>

#include "gpk/kernels.hpp"
#include "gpk/measure.hpp"
#include "gpk/random.hpp"

namespace gpk {

// Closed-form kernel means mu_P(x) = \int k(x, t) dP(t) and double integrals
// \int\int k dP dQ. Registered pairs:
//
//   any kernel              x Finite                 weighted sums
//   SquaredExponential      x IsotropicGaussian      Gaussian convolution
//   SquaredExponential      x UniformInterval/Box    erf products
//   MaternHalfInteger       x UniformInterval        incomplete-gamma sums
//   Brownian                x UniformInterval, a>=0  piecewise quadratic
//   PeriodicSobolev         x Uniform[0, 1]          mu == 1
//   Sum                     x (both parts registered)
//   Regularized             x non-atomic measures    the delta part integrates to 0
//
// Double integrals between two continuous measures need the same measure on
// both sides, except SE x two Gaussians.

bool has_kernel_mean(const Kernel& kernel, const Measure& measure);

double kernel_mean(const Kernel& kernel, const Measure& measure, const Point& x);

double kernel_double_integral(const Kernel& kernel, const Measure& p, const Measure& q);

/// ||mu_P - mu_Q||^2 = \int\int k dPdP + \int\int k dQdQ - 2 \int\int k dPdQ.
/// Values in [-1e-12 * scale, 0) are clamped to 0.
double mmd_squared_exact(const Kernel& kernel, const Measure& p, const Measure& q);

/// ||mu_P - sum_i c_i k(., x_i)||^2 for arbitrary real weights c.
double mmd_squared_weighted(const Kernel& kernel, const Measure& p, const PointSet& nodes, const Vector& weights);

/// Unbiased three-sum estimator of MMD^2; may be negative.
double mmd_u_statistic(const Kernel& kernel, const PointSet& xs, const PointSet& ys);

struct DiscrepancyReport {
  double rms;        // sqrt(mean of (\int F dP - \int F dQ)^2) over replicates
  double exact_mmd;  // sqrt(mmd_squared_exact)
  double std_err;    // delta-method standard error of rms
  double z;          // (rms - exact_mmd) / std_err; 0 when both vanish
  bool pass;         // |z| <= 3
  double jitter_applied;
};

/// Monte-Carlo Gaussian process discrepancy between two finite measures, with
/// F ~ GP(0, k) drawn exactly on the union of their supports.
DiscrepancyReport gpd_mc(const Kernel& kernel, const Measure& p, const Measure& q, const RngSpec& rng,
                         std::size_t replicates);

/// P(X = xs_i, Y = ys_j) = probs(i, j).
class JointFiniteDistribution {
 public:
  JointFiniteDistribution(PointSet xs, PointSet ys, Matrix probs);

  /// Builds the supports from (x, y, p) rows, merging repeated values.
  static JointFiniteDistribution from_triples(const PointSet& x, const PointSet& y, const std::vector<double>& p);

  const PointSet& xs() const { return xs_; }
  const PointSet& ys() const { return ys_; }
  const Matrix& probs() const { return probs_; }
  Vector marginal_x() const { return probs_.rowwise().sum(); }
  Vector marginal_y() const { return probs_.colwise().sum().transpose(); }

  /// P_{XY} as a finite measure on concatenated points (x, y).
  Measure joint_measure() const;
  /// P_X (x) P_Y on the same concatenated space.
  Measure product_measure() const;

  std::pair<Point, Point> sample(std::mt19937_64& engine) const;

 private:
  PointSet xs_;
  PointSet ys_;
  Matrix probs_;
};

/// Exact E_{XY}E_{X'Y'}[k l] + E_X E_X' E_Y E_Y'[k l] - 2 E_{XY} E_X' E_Y'[k l].
double hsic_population(const Kernel& k, const Kernel& l, const JointFiniteDistribution& joint);

/// Three-term sample estimator with (n - 1) denominators; n >= 3.
double hsic_estimator(const Kernel& k, const Kernel& l, const PointSet& xs, const PointSet& ys);

struct IndependenceReport {
  double mean_sq_cov;  // mean over replicates of Cov[F(X), G(Y)]^2
  double population;   // hsic_population
  double std_err;
  double z;
  bool pass;           // |z| <= 3
  std::string status;  // "ok" or "kernel_not_psd" (no draws possible)
};

/// Monte-Carlo GP independence criterion with F ~ GP(0,k), G ~ GP(0,l) drawn
/// independently on the two supports.
IndependenceReport gpic_mc(const Kernel& k, const Kernel& l, const JointFiniteDistribution& joint,
                           const RngSpec& rng, std::size_t replicates);

/// Support {-1, 0, 1} x {-1, 0, 1}: X = 1 on Z in [0,1), -1 on (-1,0), else 0;
/// Y = -1 on [1,2], 1 on [-2,-1], else 0, with Z ~ U[-2, 2].
JointFiniteDistribution indicator_dependence_joint();

}  // namespace gpk
