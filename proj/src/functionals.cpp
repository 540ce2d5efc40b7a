#include "gpk/functionals.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "gpk/embeddings.hpp"
#include "gpk/error.hpp"
#include "gpk/linalg.hpp"
#include "gpk/stats.hpp"

namespace gpk {

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-12, &err);
}

const SquaredExponential& require_se(const Kernel& kernel) {
  const auto* se = std::get_if<SquaredExponential>(&kernel.family());
  if (!se) {
    throw UnsupportedError("derivative functionals need a squared-exponential kernel (closed-form derivative)");
  }
  return *se;
}

void require_brownian(const Kernel& kernel) {
  if (!kernel.is<Brownian>()) throw UnsupportedError("Paley-Wiener functionals need the Brownian kernel");
}

void check_derivative(const Derivative& d) {
  if (d.coordinate < 0 || d.coordinate >= d.x0.size()) throw InputError("derivative coordinate out of range");
}

// d/dx0_c k(y, x0) for the SE kernel.
double se_derivative_section(double gamma, const Point& y, const Point& x0, int c) {
  const double g2 = gamma * gamma;
  return 2.0 * (y[c] - x0[c]) / g2 * std::exp(-(y - x0).squaredNorm() / g2);
}

void check_error_functional(const ErrorFunctional& e) {
  if (static_cast<std::size_t>(e.weights.size()) != e.centers.size()) {
    throw InputError("error functional weights and centers differ in length");
  }
}

}  // namespace

LinearFunctional LinearFunctional::interpolation_error(const Kernel& kernel, const Point& x, const PointSet& centers) {
  if (centers.empty()) return ErrorFunctional{x, {}, Vector(0), 1.0};
  const PowerFunction pf(kernel, centers);
  return ErrorFunctional{x, centers, pf.optimal_weights(x), 1.0};
}

std::string LinearFunctional::name() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Evaluation>) return "evaluation";
        if constexpr (std::is_same_v<T, Integral>) return "integral";
        if constexpr (std::is_same_v<T, Derivative>) return "derivative";
        if constexpr (std::is_same_v<T, PaleyWiener>) return "paley_wiener:" + v.label;
        if constexpr (std::is_same_v<T, ErrorFunctional>) return "error";
      },
      v_);
}

ScalarFunction riesz_representer(const LinearFunctional& a, const Kernel& kernel) {
  if (const auto* e = a.as<Evaluation>()) {
    return [kernel, x = e->x](const Point& y) { return eval(kernel, y, x); };
  }
  if (const auto* in = a.as<Integral>()) {
    if (!has_kernel_mean(kernel, in->measure)) {
      throw UnsupportedError("integral functional: (kernel, measure) pair not in the kernel-mean table");
    }
    return [kernel, m = in->measure](const Point& y) { return kernel_mean(kernel, m, y); };
  }
  if (const auto* d = a.as<Derivative>()) {
    const double gamma = require_se(kernel).bandwidth;
    check_derivative(*d);
    return [gamma, x0 = d->x0, c = d->coordinate](const Point& y) { return se_derivative_section(gamma, y, x0, c); };
  }
  if (const auto* pw = a.as<PaleyWiener>()) {
    require_brownian(kernel);
    return [g = pw->g](const Point& y) {
      if (y.size() != 1 || y[0] < 0.0) throw DomainError("Paley-Wiener representer lives on [0, inf)");
      return integrate(g, 0.0, std::min(y[0], 1.0));
    };
  }
  const auto& e = std::get<ErrorFunctional>(a.variant());
  check_error_functional(e);
  return [kernel, e](const Point& y) {
    double acc = e.lead * eval(kernel, y, e.x);
    for (std::size_t i = 0; i < e.centers.size(); ++i) {
      acc -= e.weights[static_cast<Eigen::Index>(i)] * eval(kernel, y, e.centers[i]);
    }
    return acc;
  };
}

double functional_norm(const LinearFunctional& a, const Kernel& kernel) {
  if (const auto* e = a.as<Evaluation>()) return std::sqrt(eval(kernel, e->x, e->x));
  if (const auto* in = a.as<Integral>()) {
    return std::sqrt(std::max(0.0, kernel_double_integral(kernel, in->measure, in->measure)));
  }
  if (const auto* d = a.as<Derivative>()) {
    check_derivative(*d);
    return std::sqrt(2.0) / require_se(kernel).bandwidth;
  }
  if (const auto* pw = a.as<PaleyWiener>()) {
    require_brownian(kernel);
    return std::sqrt(integrate([&](double t) { return pw->g(t) * pw->g(t); }, 0.0, 1.0));
  }
  const auto& e = std::get<ErrorFunctional>(a.variant());
  check_error_functional(e);
  const double kxx = eval(kernel, e.x, e.x);
  double sq = e.lead * e.lead * kxx;
  if (!e.centers.empty()) {
    sq += e.weights.dot(gram(kernel, e.centers) * e.weights) -
          2.0 * e.lead * e.weights.dot(kernel_vector(kernel, e.centers, e.x));
  }
  const double scale = e.lead * e.lead * kxx + e.weights.squaredNorm() * kxx;
  if (sq < 0.0) {
    if (sq < -1e-10 * std::max(scale, 1e-300)) throw NumericalError("error functional has a negative squared norm");
    return 0.0;
  }
  return std::sqrt(sq);
}

double apply_to_span(const LinearFunctional& a, const SpanElement& f) {
  const auto& c = f.coefficients();
  const auto& z = f.centers();
  if (const auto* e = a.as<Evaluation>()) return f(e->x);
  if (const auto* in = a.as<Integral>()) {
    if (const auto* fm = in->measure.as<FiniteMeasure>()) {
      double acc = 0.0;
      for (std::size_t j = 0; j < fm->points.size(); ++j) acc += fm->weights[j] * f(fm->points[j]);
      return acc;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      acc += c[static_cast<Eigen::Index>(i)] * kernel_mean(f.kernel(), in->measure, z[i]);
    }
    return acc;
  }
  if (const auto* d = a.as<Derivative>()) {
    const double gamma = require_se(f.kernel()).bandwidth;
    check_derivative(*d);
    const double g2 = gamma * gamma;
    // d/dx sum_i c_i exp(-|x - z_i|^2 / g^2) at x0
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const Point diff = d->x0 - z[i];
      acc += c[static_cast<Eigen::Index>(i)] * (-2.0 * diff[d->coordinate] / g2) * std::exp(-diff.squaredNorm() / g2);
    }
    return acc;
  }
  if (const auto* pw = a.as<PaleyWiener>()) {
    require_brownian(f.kernel());
    // \int_0^1 g d min(., z) = \int_0^{min(z,1)} g
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i].size() != 1 || z[i][0] < 0.0) throw DomainError("Brownian span centers must be nonnegative scalars");
      acc += c[static_cast<Eigen::Index>(i)] * integrate(pw->g, 0.0, std::min(z[i][0], 1.0));
    }
    return acc;
  }
  const auto& e = std::get<ErrorFunctional>(a.variant());
  check_error_functional(e);
  double acc = e.lead * f(e.x);
  for (std::size_t i = 0; i < e.centers.size(); ++i) acc -= e.weights[static_cast<Eigen::Index>(i)] * f(e.centers[i]);
  return acc;
}

Approximant approximant(const LinearFunctional& a, const Kernel& kernel, std::size_t grid_size) {
  if (const auto* e = a.as<Evaluation>()) return {{e->x}, Vector::Ones(1), true};
  if (const auto* e = a.as<ErrorFunctional>()) {
    check_error_functional(*e);
    Approximant ap{{e->x}, Vector(static_cast<Eigen::Index>(e->centers.size() + 1)), true};
    ap.points.insert(ap.points.end(), e->centers.begin(), e->centers.end());
    ap.weights << e->lead, -e->weights;
    return ap;
  }
  if (const auto* in = a.as<Integral>()) {
    if (const auto* fm = in->measure.as<FiniteMeasure>()) {
      return {fm->points, Eigen::Map<const Vector>(fm->weights.data(), static_cast<Eigen::Index>(fm->weights.size())),
              true};
    }
    if (grid_size < 2) throw InputError("integral approximants need grid_size >= 2");
    if (const auto* u = in->measure.as<UniformInterval>()) {
      const double h = (u->b - u->a) / static_cast<double>(grid_size);
      Approximant ap{{}, Vector::Constant(static_cast<Eigen::Index>(grid_size), 1.0 / static_cast<double>(grid_size)),
                     false};
      for (std::size_t j = 0; j < grid_size; ++j) ap.points.push_back(point(u->a + (static_cast<double>(j) + 0.5) * h));
      return ap;
    }
    if (const auto* b = in->measure.as<UniformBox>()) {
      const double cells = std::pow(static_cast<double>(grid_size), b->dim);
      if (cells > 16384) throw InputError("midpoint grid on the box exceeds 16384 cells");
      const auto total = static_cast<std::size_t>(cells);
      Approximant ap{{}, Vector::Constant(static_cast<Eigen::Index>(total), 1.0 / cells), false};
      for (std::size_t flat = 0; flat < total; ++flat) {
        Point p(b->dim);
        std::size_t rest = flat;
        for (int k = 0; k < b->dim; ++k) {
          p[k] = (static_cast<double>(rest % grid_size) + 0.5) / static_cast<double>(grid_size);
          rest /= grid_size;
        }
        ap.points.push_back(std::move(p));
      }
      return ap;
    }
    throw UnsupportedError("Monte-Carlo integral functionals support finite and uniform measures");
  }
  if (const auto* d = a.as<Derivative>()) {
    require_se(kernel);
    check_derivative(*d);
    if (grid_size < 2) throw InputError("derivative approximants need grid_size >= 2");
    const double h = 1.0 / static_cast<double>(grid_size);
    Point lo = d->x0, hi = d->x0;
    lo[d->coordinate] -= h;
    hi[d->coordinate] += h;
    Approximant ap{{hi, lo}, Vector(2), false};
    ap.weights << 0.5 / h, -0.5 / h;
    return ap;
  }
  const auto& pw = std::get<PaleyWiener>(a.variant());
  require_brownian(kernel);
  if (grid_size < 2) throw InputError("Paley-Wiener approximants need grid_size >= 2");
  const auto n = grid_size;
  auto t = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n); };
  // sum_i g(s_i) (F(t_i) - F(t_{i-1})) regrouped by F(t_j), j = 1..n.
  auto tag = [&](std::size_t i) { return pw.g(pw.rule == StieltjesPoint::left ? t(i - 1) : t(i)); };
  Approximant ap{{}, Vector(static_cast<Eigen::Index>(n)), false};
  for (std::size_t j = 1; j <= n; ++j) {
    ap.points.push_back(point(t(j)));
    ap.weights[static_cast<Eigen::Index>(j - 1)] = j < n ? tag(j) - tag(j + 1) : tag(j);
  }
  return ap;
}

double approximant_second_moment(const Approximant& ap, const Kernel& kernel) {
  // Row sums without materialising the Gram matrix, so grids of several
  // thousand points stay cheap.
  const std::size_t n = ap.points.size();
  std::vector<double> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = ap.weights[static_cast<Eigen::Index>(i)];
    double acc = 0.5 * wi * eval(kernel, ap.points[i], ap.points[i]);
    for (std::size_t j = 0; j < i; ++j) acc += ap.weights[static_cast<Eigen::Index>(j)] * eval(kernel, ap.points[i], ap.points[j]);
    rows[i] = 2.0 * wi * acc;
  }
  return tree_sum(rows);
}

namespace {

std::vector<double> realizations(const Approximant& ap, const Kernel& kernel, const RngSpec& rng,
                                 std::size_t n_reps, double* jitter) {
  const CholFactor chol = cholesky_with_jitter(gram(kernel, ap.points));
  if (jitter) *jitter = chol.jitter_applied();
  // A_n(F) = w^T L z = (L^T w)^T z: identical to applying the weights to the
  // drawn vector F = L z, without forming it.
  const Vector v = chol.lower().triangularView<Eigen::Lower>().transpose() * ap.weights;
  std::vector<double> out(n_reps);
  for (std::size_t r = 0; r < n_reps; ++r) {
    auto engine = make_engine(rng.replicate(r));
    out[r] = v.dot(standard_normals(engine, v.size()));
  }
  return out;
}

}  // namespace

std::vector<double> apply_mc(const LinearFunctional& a, const Kernel& kernel, const RngSpec& rng,
                             std::size_t grid_size, std::size_t n_reps) {
  return realizations(approximant(a, kernel, grid_size), kernel, rng, n_reps, nullptr);
}

MasterReport master_equivalence_check(const LinearFunctional& a, const Kernel& kernel, const RngSpec& rng,
                                      std::size_t grid_size, std::size_t n_reps) {
  if (n_reps < 2) throw InputError("need at least two replicates");
  MasterReport out{};
  out.riesz_norm = functional_norm(a, kernel);
  const Approximant ap = approximant(a, kernel, grid_size);
  const std::vector<double> vals = realizations(ap, kernel, rng, n_reps, &out.jitter_applied);
  std::vector<double> sq(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) sq[i] = vals[i] * vals[i];
  out.mean_sq = mean(sq);
  out.mean_sq_std_err = standard_error(sq);
  out.rms_mc = std::sqrt(out.mean_sq);
  out.mc_std_err = out.rms_mc > 0.0 ? out.mean_sq_std_err / (2.0 * out.rms_mc) : 0.0;

  if (!ap.exact) {
    const double coarse = std::sqrt(std::max(0.0, approximant_second_moment(ap, kernel)));
    const double fine =
        std::sqrt(std::max(0.0, approximant_second_moment(approximant(a, kernel, 2 * grid_size), kernel)));
    out.grid_bias = 2.0 * std::abs(coarse - fine);
  }
  const double diff = out.rms_mc - out.riesz_norm;
  const double tol = 1e-12 * std::max(1.0, out.riesz_norm);
  out.z = out.mc_std_err > 0.0 ? diff / out.mc_std_err : (std::abs(diff) <= tol ? 0.0 : INFINITY);
  out.increase_grid = out.grid_bias > 0.5 * out.mc_std_err;
  out.pass = std::abs(out.z) <= 3.0 && !out.increase_grid;
  return out;
}

}  // namespace gpk
