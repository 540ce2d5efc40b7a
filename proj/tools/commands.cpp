#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "gpk/acceptance.hpp"
#include "gpk/embeddings.hpp"
#include "gpk/error.hpp"
#include "gpk/experiments.hpp"
#include "gpk/format.hpp"
#include "gpk/functionals.hpp"
#include "gpk/gp.hpp"
#include "gpk/kernels.hpp"
#include "gpk/quadrature.hpp"
#include "gpk/report.hpp"
#include "gpk/rkhs.hpp"
#include "gpk/sampling.hpp"
#include "gpk/spectral.hpp"
#include "gpk/stats.hpp"

namespace gpk::cli {

namespace {

// ---- parsing helpers --------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size() || !std::isfinite(v)) throw InputError("not a finite number: '" + s + "'");
  return v;
}

// Numeric rows of a CSV file. Blank lines, '#' comments and a non-numeric
// header line are skipped; every row must have the same width.
std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    try {
      for (const auto& f : split(line, ',')) row.push_back(to_double(f));
    } catch (const InputError&) {
      if (first && rows.empty()) {
        first = false;
        continue;
      }
      throw;
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) throw InputError("ragged CSV '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("no data rows in '" + path + "'");
  return rows;
}

Point row_point(const std::vector<double>& row, std::size_t begin, std::size_t end) {
  Point p(static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) p[static_cast<Eigen::Index>(i - begin)] = row[i];
  return p;
}

// "a:b:n" -> linspace(a, b, n)
PointSet parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw InputError("grid must be a:b:n, got '" + spec + "'");
  const double a = to_double(parts[0]), b = to_double(parts[1]), n = to_double(parts[2]);
  if (n < 1 || n != std::floor(n) || n > 1e7) throw InputError("grid size must be a positive integer");
  if (b < a) throw InputError("grid needs a <= b");
  return linspace(a, b, static_cast<int>(n));
}

bool looks_like_grid(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) return false;
  try {
    for (const auto& p : parts) to_double(p);
  } catch (const InputError&) {
    return false;
  }
  return true;
}

// Grid spec or a CSV of coordinates (every column is a coordinate).
PointSet parse_points(const std::string& spec) {
  if (looks_like_grid(spec)) return parse_grid(spec);
  PointSet out;
  for (const auto& row : read_csv(spec)) out.push_back(row_point(row, 0, row.size()));
  return out;
}

// uniform01 | uniform:a,b | box:d | gauss:mu,var | finite:<CSV coords...,weight>
Measure parse_measure(const std::string& spec) {
  if (spec == "uniform01") return Measure::uniform(0.0, 1.0);
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "uniform") {
    const auto p = split(body, ',');
    if (p.size() != 2) throw InputError("uniform:a,b");
    return Measure::uniform(to_double(p[0]), to_double(p[1]));
  }
  if (head == "box") return Measure::uniform_box(static_cast<int>(to_double(body)));
  if (head == "gauss") {
    const auto p = split(body, ',');
    if (p.size() < 2) throw InputError("gauss:mu[,mu2...],var");
    Point mu(static_cast<Eigen::Index>(p.size() - 1));
    for (std::size_t i = 0; i + 1 < p.size(); ++i) mu[static_cast<Eigen::Index>(i)] = to_double(p[i]);
    return Measure::gaussian(mu, to_double(p.back()));
  }
  if (head == "finite") {
    const auto rows = read_csv(body);
    if (rows.front().size() < 2) throw InputError("finite measure CSV needs coordinates and a weight column");
    PointSet pts;
    std::vector<double> w;
    for (const auto& r : rows) {
      pts.push_back(row_point(r, 0, r.size() - 1));
      w.push_back(r.back());
    }
    return Measure::finite(std::move(pts), std::move(w));
  }
  throw InputError("unknown measure '" + spec + "'");
}

struct NamedG {
  std::function<double(double)> g;
  double square_integral;
};

NamedG named_g(const std::string& name) {
  constexpr double tau = 2.0 * std::numbers::pi;
  if (name == "one") return {[](double) { return 1.0; }, 1.0};
  if (name == "t") return {[](double t) { return t; }, 1.0 / 3.0};
  if (name == "t2") return {[](double t) { return t * t; }, 0.2};
  if (name == "sin2pi") return {[](double t) { return std::sin(tau * t); }, 0.5};
  if (name == "cos2pi") return {[](double t) { return std::cos(tau * t); }, 0.5};
  throw InputError("unknown integrand '" + name + "' (one, t, t2, sin2pi, cos2pi)");
}

StieltjesPoint parse_rule(const std::string& r) {
  if (r == "left") return StieltjesPoint::left;
  if (r == "right") return StieltjesPoint::right;
  throw InputError("rule must be left or right");
}

// eval:x=0.3 | error:x=0.4,centers=0.1|0.5|0.9 | pw:g=t[,rule=right]
// | integral:<measure> | deriv:x0=0.2
LinearFunctional parse_functional(const std::string& spec, const Kernel& kernel) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "integral") return LinearFunctional::integral(parse_measure(body));
  std::map<std::string, std::string> kv;
  for (const auto& item : split(body, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("expected key=value in '" + spec + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto need = [&](const std::string& k) {
    if (!kv.count(k)) throw InputError("functional '" + head + "' needs " + k + "=");
    return kv[k];
  };
  if (head == "eval") return LinearFunctional::evaluation(point(to_double(need("x"))));
  if (head == "deriv") return LinearFunctional::derivative(point(to_double(need("x0"))));
  if (head == "error") {
    std::vector<double> cs;
    for (const auto& c : split(need("centers"), '|')) cs.push_back(to_double(c));
    return LinearFunctional::interpolation_error(kernel, point(to_double(need("x"))), points_1d(cs));
  }
  if (head == "pw") {
    const std::string g = need("g");
    return LinearFunctional::paley_wiener(named_g(g).g, g, parse_rule(kv.count("rule") ? kv["rule"] : "left"));
  }
  throw InputError("unknown functional '" + head + "'");
}

// ---- output -----------------------------------------------------------------

std::string option_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  std::string out;
  for (const auto& r : opt->results()) out += (out.empty() ? "" : "|") + r;
  return out;
}

// Metadata header: subcommand, full option echo, seed, version, RNG.
Table make_table(const CLI::App* sub, const Globals& g, std::vector<std::string> columns) {
  Table t(std::move(columns));
  t.meta("subcommand", sub->get_name());
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_lnames().empty()) continue;
    t.meta(opt->get_lnames().front(), option_value(opt));
  }
  t.meta("seed", std::to_string(g.seed));
  t.meta("version", GPK_VERSION);
  t.meta("rng", std::string(RngSpec::algorithm));
  return t;
}

void emit(const Table& t, const Globals& g) { write_table(t, g.out, g.format); }

Cell cell(std::size_t v) { return static_cast<std::int64_t>(v); }

// ---- subcommands ------------------------------------------------------------

struct FitOptions {
  std::string kernel;
  std::string data;
  std::string probes = "0:1:101";
  double noise = 0.0;
  double multiplier = 1.96;
};

int run_fit(const CLI::App* sub, const Globals& g, const FitOptions& o, bool regression) {
  const Kernel k = parse_kernel_spec(o.kernel);
  const auto rows = read_csv(o.data);
  if (rows.front().size() < 2) throw InputError("data CSV needs x columns and a y column");
  PointSet xs;
  Vector ys(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    xs.push_back(row_point(rows[i], 0, rows[i].size() - 1));
    ys[static_cast<Eigen::Index>(i)] = rows[i].back();
  }
  if (regression && !(o.noise > 0.0)) throw InputError("regress needs --noise-var > 0");
  const GPFit fit(k, xs, ys, regression ? o.noise : 0.0);
  Table t = make_table(sub, g, {"x", "mean", "var", "lo", "hi"});
  t.meta("jitter_applied", format_double(fit.jitter_applied()));
  if (regression) t.meta("krr_lambda", format_double(o.noise / static_cast<double>(xs.size())) + " (K + n*lambda*I)");
  for (const auto& x : parse_points(o.probes)) {
    if (x.size() != xs.front().size()) throw InputError("probe dimension differs from data");
    const auto [lo, hi] = fit.credible_interval(x, o.multiplier);
    Cell xc = x.size() == 1 ? Cell(x[0]) : Cell([&] {
      std::string s;
      for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? " " : "") + format_double(x[i]);
      return s;
    }());
    t.add_row({xc, fit.posterior_mean(x), fit.posterior_var(x), lo, hi});
  }
  emit(t, g);
  return kOk;
}

void add_fit(CLI::App& app, const Globals& g, std::function<int()>& action, const char* name, bool regression) {
  auto o = std::make_shared<FitOptions>();
  CLI::App* sub = app.add_subcommand(name, regression ? "GP regression (= KRR with lambda = noise/n)"
                                                      : "Noise-free GP interpolation (= minimum-norm interpolant)");
  sub->add_option("--kernel", o->kernel, "Kernel spec, e.g. se:gamma=0.3")->required();
  sub->add_option("--data", o->data, "CSV with x columns and y last")->required()->check(CLI::ExistingFile);
  sub->add_option("--probe-grid", o->probes, "a:b:n grid or CSV of probe points");
  if (regression) sub->add_option("--noise-var", o->noise, "Noise variance sigma^2")->required();
  sub->add_option("--ci", o->multiplier, "Credible-interval multiplier");
  sub->callback([&action, &g, o, sub, regression] { action = [=, &g] { return run_fit(sub, g, *o, regression); }; });
}

void add_equivalence(CLI::App& app, const Globals& g, std::function<int()>& action) {
  auto count = std::make_shared<std::size_t>(100);
  auto max_n = std::make_shared<std::size_t>(40);
  auto probes = std::make_shared<std::size_t>(50);
  CLI::App* sub = app.add_subcommand("equivalence", "GP/RKHS duality battery");
  sub->add_option("--instances", *count)->check(CLI::Range(1, 100000));
  sub->add_option("--max-n", *max_n)->check(CLI::Range(1, 2000));
  sub->add_option("--probes", *probes)->check(CLI::Range(1, 100000));
  sub->callback([&action, &g, sub, count, max_n, probes] {
    action = [=, &g] {
      const auto s = run_equivalence(equivalence_instances(g.seed, *count, *max_n, *probes));
      Table t = make_table(sub, g,
                           {"instance", "kernel", "n", "interp", "gpr_krr", "reg_mean", "reg_var", "reg_train",
                            "krr_train_gap", "worst_case", "jitter_relative", "cond_estimate", "flagged"});
      auto add = [&](Cell id, const EquivalenceRow& r) {
        t.add_row({id, r.kernel, cell(r.n), r.interp, r.gpr_krr, r.reg_mean, r.reg_var, r.reg_train, r.krr_train_gap,
                   r.worst_case, r.jitter_relative, r.cond_estimate, r.flagged});
      };
      for (const auto& r : s.rows) add(static_cast<std::int64_t>(r.id), r);
      add(std::string("max"), s.maxima);
      t.meta("flagged_rows", std::to_string(s.flagged));
      emit(t, g);
      return kOk;
    };
  });
}

void add_sample(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::string kernel, grid = "0:1:101";
    std::size_t replicates = 1, modes = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("sample", "GP sample paths (exact Cholesky, or KL for periodic kernels)");
  sub->add_option("--kernel", o->kernel)->required();
  sub->add_option("--grid", o->grid, "a:b:n grid or CSV of points");
  sub->add_option("--replicates", o->replicates)->check(CLI::Range(1, 1000000));
  sub->add_option("--modes", o->modes, "KL truncation M (0: exact joint draw)");
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      const Kernel k = parse_kernel_spec(o->kernel);
      const PointSet xs = parse_points(o->grid);
      const RngSpec base{g.seed, 0x5a};
      Table t = make_table(sub, g, {"replicate", "x", "value"});
      auto put = [&](std::size_t r, const Point& x, double v) {
        t.add_row({cell(r), x.size() == 1 ? Cell(x[0]) : Cell(std::string("multi")), v});
      };
      if (o->modes > 0) {
        const auto* ps = std::get_if<PeriodicSobolev>(&k.family());
        if (!ps) throw UnsupportedError("KL sampling needs a periodic kernel (analytic eigensystem)");
        const EigenSystem sys = periodic_sobolev_eigensystem(ps->order, o->modes);
        for (std::size_t r = 0; r < o->replicates; ++r) {
          const KlPath path = kl_sample(sys, o->modes, base.replicate(r));
          for (const auto& x : xs) put(r, x, path(x));
        }
      } else {
        const GaussianSampler sampler(k, xs);
        t.meta("jitter_applied", format_double(sampler.factor().jitter_applied()));
        for (std::size_t r = 0; r < o->replicates; ++r) {
          const Vector v = sampler.draw(base.replicate(r));
          for (std::size_t i = 0; i < xs.size(); ++i) put(r, xs[i], v[static_cast<Eigen::Index>(i)]);
        }
      }
      emit(t, g);
      return kOk;
    };
  });
}

void add_mercer(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::string kernel;
    std::vector<std::size_t> modes{50, 200};
    std::size_t nodes = 1000;
    int grid = 21;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("mercer", "Eigenvalues and truncated Mercer residuals on [0,1]");
  sub->add_option("--kernel", o->kernel)->required();
  sub->add_option("--modes", o->modes, "Truncation levels M");
  sub->add_option("--nodes", o->nodes, "Nystrom nodes for non-periodic kernels")->check(CLI::Range(2, 5000));
  sub->add_option("--grid", o->grid, "Residual grid size per axis")->check(CLI::Range(2, 1000));
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      const Kernel k = parse_kernel_spec(o->kernel);
      const std::size_t m_max = *std::max_element(o->modes.begin(), o->modes.end());
      const auto* ps = std::get_if<PeriodicSobolev>(&k.family());
      const EigenSystem sys = ps ? periodic_sobolev_eigensystem(ps->order, m_max)
                                 : nystrom_eigensystem(k, Measure::uniform(0.0, 1.0), o->nodes);
      Table t = make_table(sub, g, {"kind", "i", "lambda_i", "x", "x_prime", "residual", "M"});
      t.meta("eigensystem", ps ? "analytic" : "nystrom");
      const std::string blank;
      const std::size_t count = std::min(m_max, sys.eigenvalues().size());
      for (std::size_t i = 0; i < count; ++i) {
        t.add_row({std::string("eigen"), cell(i + 1), sys.eigenvalues()[i], blank, blank, blank, blank});
      }
      const PointSet grid = linspace(0.0, 1.0, o->grid);
      for (std::size_t m : o->modes) {
        const std::size_t use = std::min(m, sys.eigenvalues().size());
        if (ps) t.meta("tail_bound_M" + std::to_string(m), format_double(periodic_mercer_tail_bound(ps->order, m)));
        for (const auto& x : grid) {
          for (const auto& y : grid) {
            t.add_row({std::string("residual"), blank, blank, x[0], y[0], mercer_residual(sys, k, x, y, use), cell(m)});
          }
        }
      }
      emit(t, g);
      return kOk;
    };
  });
}

void add_rate_rows(Table& t, const RateStudy& st) {
  for (std::size_t i = 0; i < st.n.size(); ++i) {
    t.add_row({static_cast<std::int64_t>(st.n[i]), st.metric[i], i < st.extra.size() ? Cell(st.extra[i]) : Cell(std::string())});
  }
  t.add_row({std::string("slope"), st.slope, std::string()});
  t.meta("slope", format_double(st.slope));
  t.meta("monotone_decreasing", st.monotone_decreasing ? "true" : "false");
  t.meta("within_jitter_gate", st.within_gate ? "true" : "false");
}

void add_contraction(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::string kernel = "matern:m=1,h=0.1";
    int lo = 4, hi = 9;
    double probe = 0.5, rho = 0.25;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("contraction", "Posterior variance at a probe over doubling grids");
  sub->add_option("--kernel", o->kernel);
  sub->add_option("--log2-lo", o->lo)->check(CLI::Range(1, 14));
  sub->add_option("--log2-hi", o->hi)->check(CLI::Range(1, 14));
  sub->add_option("--probe", o->probe);
  sub->add_option("--rho", o->rho);
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      if (o->hi <= o->lo) throw InputError("need log2-hi > log2-lo");
      const Kernel k = parse_kernel_spec(o->kernel);
      std::vector<std::size_t> ns;
      for (int e = o->lo; e <= o->hi; ++e) ns.push_back(std::size_t{1} << e);
      const auto rows = contraction_sweep(k, ns, o->probe, o->rho);
      Table t = make_table(sub, g, {"n", "fill_distance", "posterior_var_at_probe", "power_function", "jitter_relative"});
      std::vector<double> n, v;
      for (const auto& r : rows) {
        t.add_row({cell(r.n), r.fill_distance, r.posterior_var, r.power_function, r.jitter_relative});
        n.push_back(static_cast<double>(r.n));
        v.push_back(r.posterior_var);
      }
      const double slope = loglog_slope_top_half(n, v);
      t.add_row({std::string("slope"), slope, std::string(), std::string(), std::string()});
      t.meta("slope", format_double(slope));
      emit(t, g);
      return kOk;
    };
  });
}

void add_rates(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::string kind;
    double bandwidth = -1;
    int lo = -1, hi = -1;
    std::size_t seeds = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("rates", "Desk-scale rate studies");
  sub->add_option("--kind", o->kind)->required()->check(CLI::IsMember({"contraction", "krr", "mc_mean"}));
  sub->add_option("--bandwidth", o->bandwidth, "Kernel bandwidth (-1: study default)");
  sub->add_option("--log2-lo", o->lo, "-1: study default");
  sub->add_option("--log2-hi", o->hi, "-1: study default");
  sub->add_option("--seeds", o->seeds, "0: study default");
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      RateStudy st;
      std::vector<std::string> cols{"n", "metric", "extra"};
      if (o->kind == "contraction") {
        const double h = o->bandwidth > 0 ? o->bandwidth : 0.1;
        st = contraction_study(Kernel::matern(1, h), o->lo > 0 ? o->lo : 4, o->hi > 0 ? o->hi : 9);
        cols = {"n", "posterior_var_at_probe", "fill_distance"};
      } else if (o->kind == "krr") {
        KrrStudyConfig c;
        if (o->bandwidth > 0) c.bandwidth = o->bandwidth;
        if (o->lo > 0) c.log2_lo = o->lo;
        if (o->hi > 0) c.log2_hi = o->hi;
        if (o->seeds > 0) c.seeds = o->seeds;
        st = krr_rate_study(g.seed, c);
        cols = {"n", "median_sq_l2_error", "extra"};
      } else {
        McMeanConfig c;
        if (o->bandwidth > 0) c.bandwidth = o->bandwidth;
        if (o->lo > 0) c.log2_lo = o->lo;
        if (o->hi > 0) c.log2_hi = o->hi;
        if (o->seeds > 0) c.seeds = o->seeds;
        st = mc_mean_rate_study(g.seed, c);
        cols = {"n", "median_mmd", "extra"};
      }
      Table t = make_table(sub, g, cols);
      add_rate_rows(t, st);
      emit(t, g);
      return kOk;
    };
  });
}

// Points from a CSV; a trailing weight column is used when `weighted`.
Measure sample_measure(const std::string& path, bool weighted) {
  const auto rows = read_csv(path);
  PointSet pts;
  std::vector<double> w;
  for (const auto& r : rows) {
    if (weighted && r.size() < 2) throw InputError("weighted CSV needs a weight column");
    pts.push_back(row_point(r, 0, weighted ? r.size() - 1 : r.size()));
    if (weighted) w.push_back(r.back());
  }
  return weighted ? Measure::finite(std::move(pts), std::move(w)) : Measure::empirical(std::move(pts));
}

void add_mmd(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::string kernel, p, q;
    bool weighted = false;
    std::size_t replicates = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("mmd", "MMD^2 between two samples / finite measures, with optional GPD check");
  sub->add_option("--kernel", o->kernel)->required();
  sub->add_option("--p", o->p, "CSV of points (first sample)")->required()->check(CLI::ExistingFile);
  sub->add_option("--q", o->q, "CSV of points (second sample)")->required()->check(CLI::ExistingFile);
  sub->add_flag("--weighted", o->weighted, "Last CSV column is a probability weight");
  sub->add_option("--replicates", o->replicates, "GP draws for the Monte-Carlo discrepancy (0: skip)");
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      const Kernel k = parse_kernel_spec(o->kernel);
      const Measure p = sample_measure(o->p, o->weighted), q = sample_measure(o->q, o->weighted);
      const double exact = mmd_squared_exact(k, p, q);
      double ustat = std::nan("");
      if (!o->weighted) {
        const auto& ps = p.as<FiniteMeasure>()->points;
        const auto& qs = q.as<FiniteMeasure>()->points;
        if (ps.size() >= 2 && qs.size() >= 2) ustat = mmd_u_statistic(k, ps, qs);
      }
      Table t = make_table(sub, g, {"mmd2_exact", "mmd", "u_statistic", "gpd_rms", "gpd_std_err", "gpd_z", "gpd_pass"});
      if (o->replicates > 0) {
        const auto r = gpd_mc(k, p, q, RngSpec{g.seed, 0x3d}, o->replicates);
        t.add_row({exact, std::sqrt(exact), ustat, r.rms, r.std_err, r.z, r.pass});
      } else {
        const double nan = std::nan("");
        t.add_row({exact, std::sqrt(exact), ustat, nan, nan, nan, std::string()});
      }
      emit(t, g);
      return kOk;
    };
  });
}

void add_hsic(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::string kx, ky, joint, samples;
    std::size_t replicates = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("hsic", "HSIC of a finite joint (exact) or of paired samples (estimator)");
  sub->add_option("--kernel-x", o->kx)->required();
  sub->add_option("--kernel-y", o->ky)->required();
  auto* j = sub->add_option("--joint", o->joint, "CSV rows x,y,p")->check(CLI::ExistingFile);
  auto* s = sub->add_option("--samples", o->samples, "CSV rows x,y")->check(CLI::ExistingFile);
  j->excludes(s);
  sub->add_option("--replicates", o->replicates, "GP draws for the Monte-Carlo criterion (joint mode)");
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      const Kernel k = parse_kernel_spec(o->kx), l = parse_kernel_spec(o->ky);
      const double nan = std::nan("");
      if (!o->joint.empty()) {
        const auto rows = read_csv(o->joint);
        if (rows.front().size() != 3) throw InputError("joint CSV rows are x,y,p");
        PointSet xs, ys;
        std::vector<double> ps;
        for (const auto& r : rows) {
          xs.push_back(point(r[0]));
          ys.push_back(point(r[1]));
          ps.push_back(r[2]);
        }
        const auto joint = JointFiniteDistribution::from_triples(xs, ys, ps);
        Table t = make_table(sub, g, {"mode", "hsic", "gpic_mean_sq_cov", "gpic_std_err", "gpic_z", "status"});
        const double pop = hsic_population(k, l, joint);
        if (o->replicates > 0) {
          const auto r = gpic_mc(k, l, joint, RngSpec{g.seed, 0x451c}, o->replicates);
          t.add_row({std::string("joint"), pop, r.mean_sq_cov, r.std_err, r.z, r.status});
        } else {
          t.add_row({std::string("joint"), pop, nan, nan, nan, std::string("ok")});
        }
        emit(t, g);
        return kOk;
      }
      if (o->samples.empty()) throw InputError("hsic needs --joint or --samples");
      const auto rows = read_csv(o->samples);
      if (rows.front().size() != 2) throw InputError("samples CSV rows are x,y");
      PointSet xs, ys;
      for (const auto& r : rows) {
        xs.push_back(point(r[0]));
        ys.push_back(point(r[1]));
      }
      Table t = make_table(sub, g, {"mode", "hsic", "n"});
      t.add_row({std::string("estimator"), hsic_estimator(k, l, xs, ys), cell(xs.size())});
      emit(t, g);
      return kOk;
    };
  });
}

void add_quadrature(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::string kernel, measure = "uniform01", nodes, values, candidates = "0:1:201";
    std::size_t greedy = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("quadrature", "Bayesian quadrature estimate and variance (= MMD^2 of the rule)");
  sub->add_option("--kernel", o->kernel)->required();
  sub->add_option("--measure", o->measure, "uniform01 | uniform:a,b | box:d | gauss:mu,var | finite:<CSV>");
  sub->add_option("--nodes", o->nodes, "a:b:n grid or CSV of nodes");
  sub->add_option("--values", o->values, "CSV of integrand values at the nodes")->check(CLI::ExistingFile);
  sub->add_option("--greedy", o->greedy, "Pick this many nodes greedily from --candidates instead of --nodes");
  sub->add_option("--candidates", o->candidates, "Candidate grid for --greedy");
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      const Kernel k = parse_kernel_spec(o->kernel);
      const Measure m = parse_measure(o->measure);
      PointSet nodes;
      if (o->greedy > 0) {
        const PointSet cand = parse_points(o->candidates);
        for (std::size_t i : greedy_bq_nodes(k, m, cand, o->greedy)) nodes.push_back(cand[i]);
      } else {
        if (o->nodes.empty()) throw InputError("quadrature needs --nodes or --greedy");
        nodes = parse_points(o->nodes);
      }
      const QuadratureRule rule = bq_rule(k, m, nodes);
      double estimate = std::nan("");
      if (!o->values.empty()) {
        const auto rows = read_csv(o->values);
        Vector v(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) v[static_cast<Eigen::Index>(i)] = rows[i].back();
        estimate = bq_estimate(rule, v);
      }
      const double mmd2 = mmd_squared_weighted(k, m, nodes, rule.weights);
      Table t = make_table(sub, g, {"estimate", "posterior_variance", "mmd_check_residual", "initial_variance", "n"});
      t.meta("jitter_applied", format_double(rule.jitter_applied));
      std::string ws;
      for (Eigen::Index i = 0; i < rule.weights.size(); ++i) ws += (i ? " " : "") + format_double(rule.weights[i]);
      t.meta("weights", ws);
      t.add_row({estimate, rule.posterior_variance, std::abs(rule.posterior_variance - mmd2), rule.initial_variance,
                 cell(nodes.size())});
      emit(t, g);
      return kOk;
    };
  });
}

void add_ito(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::vector<std::string> gs{"one", "t", "sin2pi"};
    std::size_t grid = 2000, replicates = 20000;
    std::string rule = "left";
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("ito", "Mean square of Riemann-Stieltjes sums of Brownian paths vs \\int g^2");
  sub->add_option("--g", o->gs, "Integrands: one, t, t2, sin2pi, cos2pi");
  sub->add_option("--grid", o->grid)->check(CLI::Range(1, 100000));
  sub->add_option("--replicates", o->replicates)->check(CLI::Range(2, 10000000));
  sub->add_option("--rule", o->rule)->check(CLI::IsMember({"left", "right"}));
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      const Kernel bm = Kernel::brownian();
      Table t = make_table(sub, g, {"g", "mean_sq", "std_err", "ito_exact", "grid_bias_exact", "z"});
      std::uint64_t stream = 0;
      for (const auto& name : o->gs) {
        const NamedG ng = named_g(name);
        const auto a = LinearFunctional::paley_wiener(ng.g, name, parse_rule(o->rule));
        const auto vals = apply_mc(a, bm, RngSpec{g.seed, 0x170}.replicate(stream++), o->grid, o->replicates);
        std::vector<double> sq(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) sq[i] = vals[i] * vals[i];
        const double ms = mean(sq), se = standard_error(sq);
        const double expected = approximant_second_moment(approximant(a, bm, o->grid), bm);
        t.add_row({name, ms, se, ng.square_integral, expected - ng.square_integral,
                   se > 0 ? (ms - expected) / se : 0.0});
      }
      emit(t, g);
      return kOk;
    };
  });
}

void add_master(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::string kernel = "se:gamma=1", functional = "eval:x=0.3";
    std::size_t grid = 2000, replicates = 100000;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("master", "Monte-Carlo check of sqrt(E[A(F)^2]) = ||representer||");
  sub->add_option("--kernel", o->kernel);
  sub->add_option("--functional", o->functional,
                  "eval:x=.. | error:x=..,centers=a|b|c | pw:g=t[,rule=right] | integral:<measure> | deriv:x0=..");
  sub->add_option("--grid", o->grid)->check(CLI::Range(1, 100000));
  sub->add_option("--replicates", o->replicates)->check(CLI::Range(2, 10000000));
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      const Kernel k = parse_kernel_spec(o->kernel);
      const LinearFunctional a = parse_functional(o->functional, k);
      const auto r = master_equivalence_check(a, k, RngSpec{g.seed, 0x3a5}, o->grid, o->replicates);
      Table t = make_table(sub, g,
                           {"functional", "rms_mc", "riesz_norm", "std_err", "z", "grid_bias", "mean_sq",
                            "mean_sq_std_err", "increase_grid", "pass", "jitter_applied"});
      t.add_row({a.name(), r.rms_mc, r.riesz_norm, r.mc_std_err, r.z, r.grid_bias, r.mean_sq, r.mean_sq_std_err,
                 r.increase_grid, r.pass, r.jitter_applied});
      emit(t, g);
      return r.pass ? kOk : kCriterionFailure;
    };
  });
}

void add_verify(CLI::App& app, const Globals& g, std::function<int()>& action) {
  struct Opts {
    std::vector<int> only;
    int inject = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("verify", "Run the acceptance criteria; exit 0 iff all pass");
  sub->add_option("--only", o->only, "Criterion ids to run (default: all)")->check(CLI::Range(1, kCriterionCount));
  sub->add_option("--inject-failure", o->inject, "Corrupt the tolerances of this criterion")
      ->check(CLI::Range(0, kCriterionCount));
  sub->callback([&action, &g, sub, o] {
    action = [=, &g] {
      AcceptanceOptions opts;
      opts.seed = g.seed;
      opts.only = o->only;
      opts.inject_failure = o->inject;
      // Timings go to stderr only so the report stays byte-identical.
      const auto results = run_acceptance(opts, [](const CriterionResult& r) {
        std::cerr << (r.pass ? "PASS " : "FAIL ") << r.id << " " << r.name << " (" << format_double(r.seconds)
                  << " s)\n";
      });
      Table t = make_table(sub, g, {"id", "name", "pass", "metric", "threshold", "detail"});
      std::vector<std::string> failed;
      for (const auto& r : results) {
        t.add_row({static_cast<std::int64_t>(r.id), r.name, r.pass, r.metric, r.threshold, r.detail});
        if (!r.pass) failed.push_back(r.name);
      }
      emit(t, g);
      if (failed.empty()) return kOk;
      std::cerr << "failed criteria:";
      for (const auto& f : failed) std::cerr << " " << f;
      std::cerr << "\n";
      return kCriterionFailure;
    };
  });
}

}  // namespace

void register_commands(CLI::App& app, const Globals& g, std::function<int()>& action) {
  add_fit(app, g, action, "interpolate", false);
  add_fit(app, g, action, "regress", true);
  add_equivalence(app, g, action);
  add_sample(app, g, action);
  add_mercer(app, g, action);
  add_contraction(app, g, action);
  add_rates(app, g, action);
  add_mmd(app, g, action);
  add_hsic(app, g, action);
  add_quadrature(app, g, action);
  add_ito(app, g, action);
  add_master(app, g, action);
  add_verify(app, g, action);
}

}  // namespace gpk::cli
