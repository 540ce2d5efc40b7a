#include "gpk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gpk/embeddings.hpp"
#include "gpk/error.hpp"
#include "gpk/gp.hpp"
#include "gpk/random.hpp"
#include "gpk/rkhs.hpp"
#include "gpk/stats.hpp"

namespace gpk {

namespace {

PointSet stratified_1d(std::mt19937_64& eng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointSet xs;
  for (std::size_t j = 0; j < n; ++j) {
    xs.push_back(point(lo + (hi - lo) * (static_cast<double>(j) + 0.2 + 0.6 * u(eng)) / static_cast<double>(n)));
  }
  std::shuffle(xs.begin(), xs.end(), eng);
  return xs;
}

PointSet stratified_2d(std::mt19937_64& eng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<std::size_t> cells(m * m);
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), eng);
  PointSet xs;
  for (std::size_t c = 0; c < n; ++c) {
    const double i = static_cast<double>(cells[c] % m), j = static_cast<double>(cells[c] / m);
    xs.push_back(point({(i + 0.2 + 0.6 * u(eng)) / static_cast<double>(m), (j + 0.2 + 0.6 * u(eng)) / static_cast<double>(m)}));
  }
  return xs;
}

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool in_set(const PointSet& xs, const Point& x) {
  return std::any_of(xs.begin(), xs.end(), [&](const Point& p) { return p.size() == x.size() && p == x; });
}

// Residual k(., x) - sum_i w_i k(., x_i) as a span element.
SpanElement residual(const Kernel& kernel, const Point& x, const PointSet& xs, const Vector& w) {
  PointSet centers{x};
  centers.insert(centers.end(), xs.begin(), xs.end());
  Vector c(w.size() + 1);
  c << 1.0, -w;
  return SpanElement(kernel, std::move(centers), std::move(c));
}

double rel_jitter(const CholFactor& f) {
  return f.mean_diagonal() > 0.0 ? f.jitter_applied() / f.mean_diagonal() : f.jitter_applied();
}

}  // namespace

std::vector<EquivalenceInstance> equivalence_instances(std::uint64_t seed, std::size_t count, std::size_t max_n,
                                                       std::size_t probes) {
  if (max_n < 1) throw InputError("max_n must be at least 1");
  std::mt19937_64 eng = make_engine(RngSpec{seed, 0xe9u});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EquivalenceInstance> out;
  for (std::size_t id = 0; id < count; ++id) {
    const std::size_t family = id % 6;
    const std::size_t n = 1 + static_cast<std::size_t>(eng() % max_n);
    const bool two_d = family <= 2 && id % 4 == 3;
    PointSet xs = two_d ? stratified_2d(eng, n) : stratified_1d(eng, n, 0.02, 1.0);
    const double spacing = two_d ? 1.0 / std::ceil(std::sqrt(static_cast<double>(n))) : 1.0 / static_cast<double>(n);
    Kernel k = Kernel::brownian();
    switch (family) {
      case 0: k = Kernel::squared_exponential((0.8 + 1.2 * u(eng)) * spacing); break;
      case 1: k = Kernel::matern(1, 0.1 + 0.2 * u(eng)); break;
      case 2: k = Kernel::matern(2, 0.1 + 0.2 * u(eng)); break;
      case 3: k = Kernel::laplace(0.1 + 0.9 * u(eng)); break;
      case 4: k = Kernel::brownian(); break;
      default: k = Kernel::periodic_sobolev(1 + static_cast<int>((id / 6) % 2)); break;
    }
    Vector ys(static_cast<Eigen::Index>(n));
    std::normal_distribution<double> z(0.0, 1.0);
    for (auto& y : ys) y = z(eng);
    PointSet pr;
    while (pr.size() < probes) {
      Point p = two_d ? point({u(eng), u(eng)}) : point(u(eng));
      if (!in_set(xs, p)) pr.push_back(std::move(p));
    }
    out.push_back({static_cast<int>(id), k, std::move(xs), std::move(ys), std::move(pr)});
  }
  return out;
}

EquivalenceRow check_equivalence(const EquivalenceInstance& inst, const std::vector<double>& noise_levels) {
  const Kernel& k = inst.kernel;
  const auto n = inst.xs.size();
  EquivalenceRow row;
  row.id = inst.id;
  row.kernel = k.spec();
  row.n = n;
  const double mscale = 1.0 + max_abs(inst.ys);

  const GPFit fit0(k, inst.xs, inst.ys);
  const SpanElement interp = min_norm_interpolant(k, inst.xs, inst.ys);
  const PowerFunction pf(k, inst.xs);
  row.jitter_relative = rel_jitter(fit0.factor());
  if (n > 0) {
    const Vector d = fit0.factor().lower().diagonal();
    row.cond_estimate = std::pow(d.maxCoeff() / d.minCoeff(), 2);
  }
  for (const auto& x : inst.probes) {
    row.interp = std::max(row.interp, std::abs(fit0.posterior_mean(x) - interp(x)) / mscale);
    const double kxx = eval(k, x, x);
    const double formula = pf.squared(x);
    const double span = residual(k, x, inst.xs, pf.optimal_weights(x)).norm_sq();
    row.worst_case = std::max(row.worst_case, std::abs(formula - span) / kxx);
  }

  row.krr_train_gap = std::numeric_limits<double>::infinity();
  for (double s2 : noise_levels) {
    const GPFit fit(k, inst.xs, inst.ys, s2);
    const SpanElement kr = krr(k, inst.xs, inst.ys, s2 / static_cast<double>(n));
    const Kernel reg = Kernel::regularized(k, s2);
    const SpanElement reg_interp = min_norm_interpolant(reg, inst.xs, inst.ys);
    const GPFit reg_fit(reg, inst.xs, inst.ys);
    const PowerFunction pf_noisy(k, inst.xs, s2);
    row.jitter_relative = std::max({row.jitter_relative, rel_jitter(fit.factor()), rel_jitter(reg_fit.factor())});

    for (const auto& x : inst.probes) {
      const double kxx = eval(k, x, x);
      const double m = fit.posterior_mean(x);
      row.gpr_krr = std::max(row.gpr_krr, std::abs(kr(x) - m) / mscale);
      row.reg_mean = std::max(row.reg_mean, std::abs(reg_interp(x) - kr(x)) / mscale);
      const double v = fit.posterior_var(x);
      row.reg_var = std::max(row.reg_var, std::abs(reg_fit.posterior_var(x) - (v + s2)) / (kxx + s2));
      const double wce = worst_case_error_regularized(k, s2, inst.xs, x);
      const double span = residual(reg, x, inst.xs, pf_noisy.optimal_weights(x)).norm_sq();
      row.worst_case = std::max({row.worst_case, std::abs(wce * wce - (v + s2)) / (kxx + s2),
                                 std::abs(wce * wce - span) / (kxx + s2)});
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = inst.ys[static_cast<Eigen::Index>(i)];
      row.gpr_krr = std::max(row.gpr_krr, std::abs(kr(inst.xs[i]) - fit.posterior_mean(inst.xs[i])) / mscale);
      row.reg_train = std::max(row.reg_train, std::abs(reg_interp(inst.xs[i]) - y) / mscale);
      gap = std::max(gap, std::abs(kr(inst.xs[i]) - y) / mscale);
    }
    row.krr_train_gap = std::min(row.krr_train_gap, gap);
  }
  if (noise_levels.empty()) row.krr_train_gap = 0.0;
  row.flagged = row.jitter_relative > 0.0 || row.cond_estimate > 1e10;
  return row;
}

EquivalenceSummary run_equivalence(const std::vector<EquivalenceInstance>& instances,
                                   const std::vector<double>& noise_levels) {
  EquivalenceSummary s;
  s.maxima.id = -1;
  s.maxima.kernel = "max";
  s.maxima.krr_train_gap = std::numeric_limits<double>::infinity();
  for (const auto& inst : instances) {
    EquivalenceRow r = check_equivalence(inst, noise_levels);
    auto& m = s.maxima;
    m.n = std::max(m.n, r.n);
    m.interp = std::max(m.interp, r.interp);
    m.gpr_krr = std::max(m.gpr_krr, r.gpr_krr);
    m.reg_mean = std::max(m.reg_mean, r.reg_mean);
    m.reg_var = std::max(m.reg_var, r.reg_var);
    m.reg_train = std::max(m.reg_train, r.reg_train);
    m.krr_train_gap = std::min(m.krr_train_gap, r.krr_train_gap);
    m.worst_case = std::max(m.worst_case, r.worst_case);
    m.jitter_relative = std::max(m.jitter_relative, r.jitter_relative);
    m.cond_estimate = std::max(m.cond_estimate, r.cond_estimate);
    if (r.flagged) ++s.flagged;
    s.rows.push_back(std::move(r));
  }
  s.maxima.flagged = s.flagged > 0;
  return s;
}

std::vector<ContractionRow> contraction_sweep(const Kernel& kernel, const std::vector<std::size_t>& ns, double probe,
                                              double rho) {
  std::vector<ContractionRow> rows;
  const Point x = point(probe);
  for (std::size_t n : ns) {
    if (n < 2) throw InputError("contraction grids need at least 2 points");
    const PointSet xs = linspace(0.0, 1.0, static_cast<int>(n));
    const PowerFunction pf(kernel, xs);
    const double v = pf.squared(x);
    rows.push_back({n, fill_distance(xs, x, rho).value, v, std::sqrt(v), rel_jitter(pf.factor())});
  }
  return rows;
}

RateStudy contraction_study(const Kernel& kernel, int log2_lo, int log2_hi) {
  std::vector<std::size_t> ns;
  for (int e = log2_lo; e <= log2_hi; ++e) ns.push_back(std::size_t{1} << e);
  RateStudy out;
  for (const auto& r : contraction_sweep(kernel, ns)) {
    out.n.push_back(static_cast<double>(r.n));
    out.metric.push_back(r.posterior_var);
    out.extra.push_back(r.fill_distance);
    if (r.jitter_relative > kJitterGateRelative) out.within_gate = false;
  }
  out.slope = loglog_slope_top_half(out.n, out.metric);
  out.monotone_decreasing = std::adjacent_find(out.metric.begin(), out.metric.end(), std::less_equal<>()) == out.metric.end();
  return out;
}

RateStudy krr_rate_study(std::uint64_t seed, const KrrStudyConfig& cfg) {
  const Kernel k = Kernel::matern(1, cfg.bandwidth);
  auto f_star = [](double x) { return std::min(x, 1.0 - x); };
  PointSet grid;
  Vector truth(static_cast<Eigen::Index>(cfg.eval_grid));
  for (std::size_t j = 0; j < cfg.eval_grid; ++j) {
    const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(cfg.eval_grid);
    grid.push_back(point(x));
    truth[static_cast<Eigen::Index>(j)] = f_star(x);
  }
  RateStudy out;
  const double s2 = cfg.noise_sd * cfg.noise_sd;
  for (int e = cfg.log2_lo; e <= cfg.log2_hi; ++e) {
    const std::size_t n = std::size_t{1} << e;
    std::vector<double> errs;
    for (std::size_t s = 0; s < cfg.seeds; ++s) {
      auto eng = make_engine(RngSpec{seed, s}.replicate(n));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::normal_distribution<double> z(0.0, 1.0);
      PointSet xs;
      Vector ys(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const double x = u(eng);
        xs.push_back(point(x));
        ys[static_cast<Eigen::Index>(i)] = f_star(x) + cfg.noise_sd * z(eng);
      }
      const SpanElement fhat = krr(k, xs, ys, s2 / static_cast<double>(n));
      // mean(diag) of K + n lambda I is k(x,x) + noise^2 = 1 + s2.
      if (fhat.jitter_applied() > kJitterGateRelative * (1.0 + s2)) out.within_gate = false;
      const Vector pred = cross_gram(k, grid, xs) * fhat.coefficients();
      errs.push_back((pred - truth).squaredNorm() / static_cast<double>(cfg.eval_grid));
    }
    out.n.push_back(static_cast<double>(n));
    out.metric.push_back(median(errs));
    out.extra.push_back(std::sqrt(out.metric.back()));
  }
  out.slope = loglog_slope_top_half(out.n, out.metric);
  out.monotone_decreasing = std::adjacent_find(out.metric.begin(), out.metric.end(), std::less_equal<>()) == out.metric.end();
  return out;
}

RateStudy mc_mean_rate_study(std::uint64_t seed, const McMeanConfig& cfg) {
  if (cfg.atoms < 2) throw InputError("need at least two atoms");
  const Kernel k = Kernel::squared_exponential(cfg.bandwidth);
  auto eng0 = make_engine(RngSpec{seed, 0xa70u});
  std::uniform_real_distribution<double> u(0.5, 1.5);
  PointSet atoms;
  std::vector<double> p(cfg.atoms);
  for (std::size_t i = 0; i < cfg.atoms; ++i) {
    atoms.push_back(point((static_cast<double>(i) + 0.5) / static_cast<double>(cfg.atoms)));
    p[i] = u(eng0);
  }
  const double total = tree_sum(p);
  for (auto& w : p) w /= total;
  const Measure target = Measure::finite(atoms, p);

  RateStudy out;
  for (int e = cfg.log2_lo; e <= cfg.log2_hi; ++e) {
    const std::size_t n = std::size_t{1} << e;
    std::vector<double> dists, sq;
    for (std::size_t s = 0; s < cfg.seeds; ++s) {
      auto eng = make_engine(RngSpec{seed, s}.replicate(n));
      std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
      // The empirical measure of draws from a finite P lives on P's atoms.
      std::vector<double> q(cfg.atoms, 0.0);
      for (std::size_t i = 0; i < n; ++i) q[pick(eng)] += 1.0;
      for (auto& w : q) w /= static_cast<double>(n);
      const double m2 = mmd_squared_exact(k, target, Measure::finite(atoms, q));
      sq.push_back(m2);
      dists.push_back(std::sqrt(m2));
    }
    out.n.push_back(static_cast<double>(n));
    out.metric.push_back(median(dists));
    out.extra.push_back(median(sq));
  }
  out.slope = loglog_slope_top_half(out.n, out.metric);
  out.monotone_decreasing = std::adjacent_find(out.metric.begin(), out.metric.end(), std::less_equal<>()) == out.metric.end();
  return out;
}

std::vector<std::size_t> greedy_bq_nodes(const Kernel& kernel, const Measure& measure, const PointSet& candidates,
                                         std::size_t count) {
  if (count > candidates.size()) throw InputError("more nodes requested than candidates");
  std::vector<std::size_t> chosen;
  std::vector<bool> used(candidates.size(), false);
  PointSet nodes;
  for (std::size_t step = 0; step < count; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = candidates.size();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      PointSet trial = nodes;
      trial.push_back(candidates[c]);
      double v;
      try {
        v = bq_rule(kernel, measure, trial).posterior_variance;
      } catch (const SingularMatrixError&) {
        continue;
      } catch (const PreconditionError&) {
        continue;
      }
      if (v < best) {
        best = v;
        arg = c;
      }
    }
    if (arg == candidates.size()) break;
    used[arg] = true;
    chosen.push_back(arg);
    nodes.push_back(candidates[arg]);
  }
  return chosen;
}

}  // namespace gpk
