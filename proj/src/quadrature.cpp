#include "gpk/quadrature.hpp"

#include <cmath>

#include "gpk/embeddings.hpp"
#include "gpk/error.hpp"
#include "gpk/stats.hpp"

namespace gpk {

QuadratureRule bq_rule(const Kernel& kernel, const Measure& measure, const PointSet& nodes,
                       const JitterPolicy& policy) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (nodes[i].size() == nodes[j].size() && nodes[i] == nodes[j]) {
        throw PreconditionError("quadrature nodes must be pairwise distinct");
      }
    }
  }
  const double initial = kernel_double_integral(kernel, measure, measure);
  QuadratureRule rule{kernel, measure, nodes, Vector(0), Vector(0), initial, initial, 0.0};
  if (nodes.empty()) return rule;

  rule.kernel_means.resize(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    rule.kernel_means[static_cast<Eigen::Index>(i)] = kernel_mean(kernel, measure, nodes[i]);
  }
  const CholFactor chol = cholesky_with_jitter(gram(kernel, nodes), policy);
  rule.jitter_applied = chol.jitter_applied();
  rule.weights = chol.solve(rule.kernel_means);
  const double var = initial - chol.quad_form(rule.kernel_means);
  if (var < 0.0) {
    if (var < -1e-12 * std::max(1.0, std::abs(initial))) {
      throw NumericalError("quadrature posterior variance is negative beyond roundoff");
    }
    rule.posterior_variance = 0.0;
  } else {
    rule.posterior_variance = var;
  }
  return rule;
}

double bq_estimate(const QuadratureRule& rule, const Vector& values) {
  if (values.size() != rule.weights.size()) throw InputError("value count differs from node count");
  if (values.size() == 0) return 0.0;
  return rule.weights.dot(values);
}

double mc_baseline(const Measure& measure, const ScalarFunction& f, std::size_t n, const RngSpec& rng) {
  if (n == 0) throw InputError("Monte-Carlo baseline needs at least one draw");
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto engine = make_engine(rng.replicate(i));
    vals[i] = f(measure.sample(engine));
  }
  return tree_sum(vals) / static_cast<double>(n);
}

}  // namespace gpk
