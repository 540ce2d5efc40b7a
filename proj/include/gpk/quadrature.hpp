#pragma once

#include "gpk/kernels.hpp"
#include "gpk/linalg.hpp"
#include "gpk/measure.hpp"
#include "gpk/random.hpp"

namespace gpk {

/// Bayesian quadrature for \int F dP given F(x_1), ..., F(x_n) under GP(0, k):
/// posterior mean sum_i c_i F(x_i) with c = K^{-1} mu and posterior variance
/// \int\int k dPdP - mu^T K^{-1} mu, which equals MMD^2(P, sum_i c_i delta_{x_i}).
struct QuadratureRule {
  Kernel kernel;
  Measure measure;
  PointSet nodes;
  Vector weights;       // c = K^{-1} mu
  Vector kernel_means;  // mu_i = \int k(x_i, t) dP(t)
  double initial_variance;    // \int\int k dPdP
  double posterior_variance;  // clamped at 0 above -1e-12 * max(1, initial_variance)
  double jitter_applied;
};

/// Nodes must be pairwise distinct (PreconditionError otherwise).
QuadratureRule bq_rule(const Kernel& kernel, const Measure& measure, const PointSet& nodes,
                       const JitterPolicy& policy = {});

double bq_estimate(const QuadratureRule& rule, const Vector& values);

/// Equal-weight average of f over n i.i.d. draws from the measure; draw i uses
/// rng.replicate(i).
double mc_baseline(const Measure& measure, const ScalarFunction& f, std::size_t n, const RngSpec& rng);

}  // namespace gpk
