#include "gpk/embeddings.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <numbers>

#include "gpk/error.hpp"
#include "gpk/sampling.hpp"
#include "gpk/stats.hpp"

namespace gpk {

namespace {

const char* kTable =
    "registered pairs: any x finite, SE x Gaussian, SE x uniform, Matern x uniform interval, "
    "Brownian x uniform interval (a >= 0), periodic x uniform[0,1]";

bool is_continuous(const Measure& m) { return !m.as<FiniteMeasure>(); }

bool same_measure(const Measure& p, const Measure& q) {
  if (const auto* a = p.as<UniformInterval>()) {
    const auto* b = q.as<UniformInterval>();
    return b && a->a == b->a && a->b == b->b;
  }
  if (const auto* a = p.as<UniformBox>()) {
    const auto* b = q.as<UniformBox>();
    return b && a->dim == b->dim;
  }
  if (const auto* a = p.as<IsotropicGaussian>()) {
    const auto* b = q.as<IsotropicGaussian>();
    return b && a->variance == b->variance && a->mean.size() == b->mean.size() && a->mean == b->mean;
  }
  return false;
}

// \int_0^D r^j e^{-c r} dr
double gamma_moment(int j, double c, double d) {
  if (d <= 0.0) return 0.0;
  return boost::math::tgamma_lower(j + 1.0, c * d) / std::pow(c, j + 1.0);
}

// Matern k(r) = e^{-c r} sum_j a_j r^j with c = sqrt(2m+1)/h.
struct MaternRadial {
  double c;
  std::vector<double> a;

  explicit MaternRadial(const MaternHalfInteger& p) : c(std::sqrt(2.0 * p.m + 1.0) / p.bandwidth) {
    a.resize(static_cast<std::size_t>(p.m) + 1);
    for (int j = 0; j <= p.m; ++j) {
      a[static_cast<std::size_t>(j)] = p.coefficients[static_cast<std::size_t>(p.m - j)] * std::pow(2.0 * c, j);
    }
  }
  // \int_0^D k(r) dr
  double integral(double d) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * gamma_moment(static_cast<int>(j), c, d);
    return acc;
  }
  // \int_0^L (L - r) k(r) dr
  double weighted_integral(double l) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const int jj = static_cast<int>(j);
      acc += a[j] * (l * gamma_moment(jj, c, l) - gamma_moment(jj + 1, c, l));
    }
    return acc;
  }
};

// \int_a^b exp(-(x - t)^2 / g^2) dt
double se_segment(double g, double x, double a, double b) {
  return 0.5 * g * std::sqrt(std::numbers::pi) * (std::erf((b - x) / g) - std::erf((a - x) / g));
}

// \int_a^b \int_a^b exp(-(s - t)^2 / g^2) ds dt
double se_square(double g, double l) {
  return g * std::sqrt(std::numbers::pi) * l * std::erf(l / g) - g * g * (1.0 - std::exp(-l * l / (g * g)));
}

bool continuous_supported(const Kernel& kernel, const Measure& m) {
  const auto& f = kernel.family();
  if (const auto* s = std::get_if<Sum>(&f)) {
    return continuous_supported(*s->left, m) && continuous_supported(*s->right, m);
  }
  if (const auto* r = std::get_if<Regularized>(&f)) return continuous_supported(*r->base, m);
  if (std::holds_alternative<KroneckerDelta>(f)) return true;
  if (std::holds_alternative<SquaredExponential>(f)) {
    return m.as<IsotropicGaussian>() || m.as<UniformInterval>() || m.as<UniformBox>();
  }
  if (std::holds_alternative<MaternHalfInteger>(f)) return m.as<UniformInterval>() != nullptr;
  if (std::holds_alternative<Brownian>(f)) {
    const auto* u = m.as<UniformInterval>();
    return u && u->a >= 0.0;
  }
  if (std::holds_alternative<PeriodicSobolev>(f)) {
    const auto* u = m.as<UniformInterval>();
    return u && u->a == 0.0 && u->b == 1.0;
  }
  return false;
}

double continuous_mean(const Kernel& kernel, const Measure& m, const Point& x) {
  const auto& f = kernel.family();
  if (!x.allFinite()) throw InputError("kernel mean input has non-finite coordinates");
  if (const auto* s = std::get_if<Sum>(&f)) return continuous_mean(*s->left, m, x) + continuous_mean(*s->right, m, x);
  if (const auto* r = std::get_if<Regularized>(&f)) return continuous_mean(*r->base, m, x);
  if (std::holds_alternative<KroneckerDelta>(f)) return 0.0;

  if (x.size() != m.dimension()) throw DomainError("kernel mean input dimension differs from the measure's");
  if (const auto* se = std::get_if<SquaredExponential>(&f)) {
    const double g = se->bandwidth;
    if (const auto* gm = m.as<IsotropicGaussian>()) {
      const double s = g * g + 2.0 * gm->variance;
      return std::pow(g * g / s, 0.5 * static_cast<double>(x.size())) * std::exp(-(x - gm->mean).squaredNorm() / s);
    }
    if (const auto* u = m.as<UniformInterval>()) return se_segment(g, x[0], u->a, u->b) / (u->b - u->a);
    if (m.as<UniformBox>()) {
      double acc = 1.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) acc *= se_segment(g, x[i], 0.0, 1.0);
      return acc;
    }
  }
  if (const auto* mt = std::get_if<MaternHalfInteger>(&f)) {
    if (const auto* u = m.as<UniformInterval>()) {
      const MaternRadial rad(*mt);
      const double t = x[0], l = u->b - u->a;
      if (t < u->a) return (rad.integral(u->b - t) - rad.integral(u->a - t)) / l;
      if (t > u->b) return (rad.integral(t - u->a) - rad.integral(t - u->b)) / l;
      return (rad.integral(t - u->a) + rad.integral(u->b - t)) / l;
    }
  }
  if (std::holds_alternative<Brownian>(f)) {
    const auto* u = m.as<UniformInterval>();
    const double t = x[0];
    if (t < 0.0) throw DomainError("Brownian kernel requires nonnegative inputs");
    if (t <= u->a) return t;
    if (t >= u->b) return 0.5 * (u->a + u->b);
    return (0.5 * (t * t - u->a * u->a) + t * (u->b - t)) / (u->b - u->a);
  }
  if (std::holds_alternative<PeriodicSobolev>(f)) {
    if (x[0] < 0.0 || x[0] > 1.0) throw DomainError("periodic Sobolev kernel requires inputs in [0, 1]");
    return 1.0;
  }
  throw UnsupportedError(std::string("no closed-form kernel mean; ") + kTable);
}

double continuous_double(const Kernel& kernel, const Measure& p, const Measure& q) {
  const auto& f = kernel.family();
  if (const auto* s = std::get_if<Sum>(&f)) {
    return continuous_double(*s->left, p, q) + continuous_double(*s->right, p, q);
  }
  if (const auto* r = std::get_if<Regularized>(&f)) return continuous_double(*r->base, p, q);
  if (std::holds_alternative<KroneckerDelta>(f)) return 0.0;

  if (const auto* se = std::get_if<SquaredExponential>(&f)) {
    const double g = se->bandwidth;
    const auto* gp = p.as<IsotropicGaussian>();
    const auto* gq = q.as<IsotropicGaussian>();
    if (gp && gq) {
      if (gp->mean.size() != gq->mean.size()) throw InputError("Gaussian measures differ in dimension");
      const double s = g * g + 2.0 * (gp->variance + gq->variance);
      return std::pow(g * g / s, 0.5 * static_cast<double>(gp->mean.size())) *
             std::exp(-(gp->mean - gq->mean).squaredNorm() / s);
    }
  }
  if (!same_measure(p, q)) {
    throw UnsupportedError("double integrals between different continuous measures are available for SE x Gaussian only");
  }
  if (const auto* se = std::get_if<SquaredExponential>(&f)) {
    const double g = se->bandwidth;
    if (const auto* u = p.as<UniformInterval>()) {
      const double l = u->b - u->a;
      return se_square(g, l) / (l * l);
    }
    if (const auto* b = p.as<UniformBox>()) return std::pow(se_square(g, 1.0), b->dim);
  }
  if (const auto* mt = std::get_if<MaternHalfInteger>(&f)) {
    if (const auto* u = p.as<UniformInterval>()) {
      const double l = u->b - u->a;
      return 2.0 * MaternRadial(*mt).weighted_integral(l) / (l * l);
    }
  }
  if (std::holds_alternative<Brownian>(f)) {
    if (const auto* u = p.as<UniformInterval>(); u && u->a >= 0.0) return u->a + (u->b - u->a) / 3.0;
  }
  if (std::holds_alternative<PeriodicSobolev>(f)) {
    if (const auto* u = p.as<UniformInterval>(); u && u->a == 0.0 && u->b == 1.0) return 1.0;
  }
  throw UnsupportedError(std::string("no closed-form double integral; ") + kTable);
}

PointSet concat(const Point& x, const Point& y, std::size_t) {
  Point p(x.size() + y.size());
  p << x, y;
  return {p};
}

}  // namespace

bool has_kernel_mean(const Kernel& kernel, const Measure& measure) {
  return !is_continuous(measure) || continuous_supported(kernel, measure);
}

double kernel_mean(const Kernel& kernel, const Measure& measure, const Point& x) {
  if (const auto* fm = measure.as<FiniteMeasure>()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < fm->points.size(); ++i) acc += fm->weights[i] * eval(kernel, x, fm->points[i]);
    return acc;
  }
  if (!continuous_supported(kernel, measure)) {
    throw UnsupportedError(std::string("no closed-form kernel mean for kernel ") + kernel.spec() + "; " + kTable);
  }
  return continuous_mean(kernel, measure, x);
}

double kernel_double_integral(const Kernel& kernel, const Measure& p, const Measure& q) {
  if (const auto* fp = p.as<FiniteMeasure>()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < fp->points.size(); ++i) acc += fp->weights[i] * kernel_mean(kernel, q, fp->points[i]);
    return acc;
  }
  if (const auto* fq = q.as<FiniteMeasure>()) {
    double acc = 0.0;
    for (std::size_t j = 0; j < fq->points.size(); ++j) acc += fq->weights[j] * kernel_mean(kernel, p, fq->points[j]);
    return acc;
  }
  if (!continuous_supported(kernel, p) || !continuous_supported(kernel, q)) {
    throw UnsupportedError(std::string("no closed-form double integral for kernel ") + kernel.spec() + "; " + kTable);
  }
  return continuous_double(kernel, p, q);
}

double mmd_squared_exact(const Kernel& kernel, const Measure& p, const Measure& q) {
  const double pp = kernel_double_integral(kernel, p, p);
  const double qq = kernel_double_integral(kernel, q, q);
  // Averaging both orders keeps the result bit-identical under swapping P and Q.
  const double pq = 0.5 * (kernel_double_integral(kernel, p, q) + kernel_double_integral(kernel, q, p));
  const double value = (pp + qq) - 2.0 * pq;
  const double scale = std::max({1.0, std::abs(pp), std::abs(qq)});
  if (value < 0.0 && value >= -1e-12 * scale) return 0.0;
  return value;
}

double mmd_squared_weighted(const Kernel& kernel, const Measure& p, const PointSet& nodes, const Vector& weights) {
  if (static_cast<std::size_t>(weights.size()) != nodes.size()) throw InputError("weights and nodes differ in length");
  const double pp = kernel_double_integral(kernel, p, p);
  if (nodes.empty()) return pp;
  Vector mu(weights.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) mu[static_cast<Eigen::Index>(i)] = kernel_mean(kernel, p, nodes[i]);
  return pp - 2.0 * weights.dot(mu) + weights.dot(gram(kernel, nodes) * weights);
}

double mmd_u_statistic(const Kernel& kernel, const PointSet& xs, const PointSet& ys) {
  const double n = static_cast<double>(xs.size()), m = static_cast<double>(ys.size());
  if (xs.size() < 2 || ys.size() < 2) throw InputError("U-statistic needs at least two samples per side");
  const Matrix kxx = gram(kernel, xs), kyy = gram(kernel, ys);
  const double sxx = kxx.sum() - kxx.trace();
  const double syy = kyy.sum() - kyy.trace();
  const double sxy = cross_gram(kernel, xs, ys).sum();
  return sxx / (n * (n - 1.0)) + syy / (m * (m - 1.0)) - 2.0 * sxy / (n * m);
}

DiscrepancyReport gpd_mc(const Kernel& kernel, const Measure& p, const Measure& q, const RngSpec& rng,
                         std::size_t replicates) {
  const auto* fp = p.as<FiniteMeasure>();
  const auto* fq = q.as<FiniteMeasure>();
  if (!fp || !fq) throw InputError("GPD Monte Carlo needs two finite measures");
  if (replicates < 2) throw InputError("need at least two replicates");

  // Union support with the signed weight difference P - Q.
  PointSet support;
  std::vector<double> diff;
  auto add = [&](const Point& x, double w) {
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i].size() == x.size() && support[i] == x) {
        diff[i] += w;
        return;
      }
    }
    support.push_back(x);
    diff.push_back(w);
  };
  for (std::size_t i = 0; i < fp->points.size(); ++i) add(fp->points[i], fp->weights[i]);
  for (std::size_t j = 0; j < fq->points.size(); ++j) add(fq->points[j], -fq->weights[j]);
  const Vector d = Eigen::Map<const Vector>(diff.data(), static_cast<Eigen::Index>(diff.size()));

  const GaussianSampler sampler(kernel, support);
  std::vector<double> sq(replicates);
  constexpr std::uint64_t kBlock = 4096;
  for (std::uint64_t first = 0; first < replicates; first += kBlock) {
    const std::uint64_t count = std::min<std::uint64_t>(kBlock, replicates - first);
    const Matrix draws = sampler.draw_batch(rng, first, count);
    const Vector a = draws.transpose() * d;
    for (std::uint64_t r = 0; r < count; ++r) sq[first + r] = a[static_cast<Eigen::Index>(r)] * a[static_cast<Eigen::Index>(r)];
  }

  DiscrepancyReport out{};
  const double m2 = mean(sq);
  out.rms = std::sqrt(m2);
  out.exact_mmd = std::sqrt(std::max(0.0, mmd_squared_exact(kernel, p, q)));
  out.std_err = out.rms > 0.0 ? standard_error(sq) / (2.0 * out.rms) : 0.0;
  const double diffv = out.rms - out.exact_mmd;
  out.z = out.std_err > 0.0 ? diffv / out.std_err : (std::abs(diffv) <= 1e-12 ? 0.0 : INFINITY);
  out.pass = std::abs(out.z) <= 3.0;
  out.jitter_applied = sampler.factor().jitter_applied();
  return out;
}

JointFiniteDistribution::JointFiniteDistribution(PointSet xs, PointSet ys, Matrix probs)
    : xs_(std::move(xs)), ys_(std::move(ys)), probs_(std::move(probs)) {
  if (xs_.empty() || ys_.empty()) throw InputError("joint distribution needs nonempty supports");
  if (probs_.rows() != static_cast<Eigen::Index>(xs_.size()) || probs_.cols() != static_cast<Eigen::Index>(ys_.size())) {
    throw InputError("probability table shape does not match the supports");
  }
  if (!probs_.allFinite() || (probs_.array() < 0.0).any()) throw InputError("probabilities must be nonnegative");
  if (std::abs(probs_.sum() - 1.0) > 1e-12) throw InputError("joint probabilities must sum to 1");
}

JointFiniteDistribution JointFiniteDistribution::from_triples(const PointSet& x, const PointSet& y,
                                                              const std::vector<double>& p) {
  if (x.size() != y.size() || x.size() != p.size()) throw InputError("joint triples differ in length");
  PointSet xs, ys;
  auto index_of = [](PointSet& set, const Point& v) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i].size() == v.size() && set[i] == v) return i;
    }
    set.push_back(v);
    return set.size() - 1;
  };
  std::vector<std::tuple<std::size_t, std::size_t, double>> cells;
  for (std::size_t r = 0; r < p.size(); ++r) cells.emplace_back(index_of(xs, x[r]), index_of(ys, y[r]), p[r]);
  Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  for (const auto& [i, j, w] : cells) probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w;
  return JointFiniteDistribution(std::move(xs), std::move(ys), std::move(probs));
}

Measure JointFiniteDistribution::joint_measure() const {
  PointSet pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    for (std::size_t j = 0; j < ys_.size(); ++j) {
      const double pij = probs_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (pij == 0.0) continue;
      pts.push_back(concat(xs_[i], ys_[j], 0).front());
      w.push_back(pij);
    }
  }
  const double total = tree_sum(w);
  for (auto& v : w) v /= total;
  return Measure::finite(std::move(pts), std::move(w));
}

Measure JointFiniteDistribution::product_measure() const {
  const Vector px = marginal_x(), py = marginal_y();
  PointSet pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    for (std::size_t j = 0; j < ys_.size(); ++j) {
      const double pij = px[static_cast<Eigen::Index>(i)] * py[static_cast<Eigen::Index>(j)];
      if (pij == 0.0) continue;
      pts.push_back(concat(xs_[i], ys_[j], 0).front());
      w.push_back(pij);
    }
  }
  const double total = tree_sum(w);
  for (auto& v : w) v /= total;
  return Measure::finite(std::move(pts), std::move(w));
}

std::pair<Point, Point> JointFiniteDistribution::sample(std::mt19937_64& engine) const {
  std::discrete_distribution<Eigen::Index> pick(probs_.data(), probs_.data() + probs_.size());
  const Eigen::Index flat = pick(engine);  // column-major storage
  const Eigen::Index i = flat % probs_.rows(), j = flat / probs_.rows();
  return {xs_[static_cast<std::size_t>(i)], ys_[static_cast<std::size_t>(j)]};
}

double hsic_population(const Kernel& k, const Kernel& l, const JointFiniteDistribution& joint) {
  const Matrix kx = gram(k, joint.xs()), ly = gram(l, joint.ys());
  const Matrix& p = joint.probs();
  const Vector px = joint.marginal_x(), py = joint.marginal_y();
  const double t1 = p.cwiseProduct(kx * p * ly).sum();
  const double t2 = px.dot(kx * px) * py.dot(ly * py);
  const double t3 = p.cwiseProduct((kx * px) * (ly * py).transpose()).sum();
  return t1 + t2 - 2.0 * t3;
}

double hsic_estimator(const Kernel& k, const Kernel& l, const PointSet& xs, const PointSet& ys) {
  if (xs.size() != ys.size()) throw InputError("paired samples differ in length");
  if (xs.size() < 3) throw InputError("the GPIC estimator needs at least three pairs");
  const double n = static_cast<double>(xs.size());
  Matrix kx = gram(k, xs), ly = gram(l, ys);
  kx.diagonal().setZero();
  ly.diagonal().setZero();
  const double t1 = kx.cwiseProduct(ly).sum() / (n * (n - 1.0));
  const double t2 = (kx.sum() / (n * (n - 1.0))) * (ly.sum() / (n * (n - 1.0)));
  const Vector rk = kx.rowwise().sum() / (n - 1.0);
  const Vector rl = ly.rowwise().sum() / (n - 1.0);
  const double t3 = 2.0 / n * rk.dot(rl);
  return t1 + t2 - t3;
}

IndependenceReport gpic_mc(const Kernel& k, const Kernel& l, const JointFiniteDistribution& joint,
                           const RngSpec& rng, std::size_t replicates) {
  if (replicates < 2) throw InputError("need at least two replicates");
  IndependenceReport out{};
  out.population = hsic_population(k, l, joint);

  // Without a positive semidefinite Gram there is no Gaussian process to draw.
  auto make = [](const Kernel& kern, const PointSet& pts) -> std::optional<GaussianSampler> {
    try {
      GaussianSampler s(kern, pts);
      if (!s.factor().jitter_within_gate()) return std::nullopt;
      return s;
    } catch (const SingularMatrixError&) {
      return std::nullopt;
    }
  };
  const auto fx = make(k, joint.xs());
  const auto gy = make(l, joint.ys());
  if (!fx || !gy) {
    out.mean_sq_cov = out.std_err = out.z = NAN;
    out.pass = false;
    out.status = "kernel_not_psd";
    return out;
  }

  const Matrix& p = joint.probs();
  const Vector px = joint.marginal_x(), py = joint.marginal_y();
  const RngSpec f_streams{rng.seed, splitmix64(rng.stream ^ 0x5eedf00dULL)};
  const RngSpec g_streams{rng.seed, splitmix64(rng.stream ^ 0xbadc0ffeULL)};
  std::vector<double> sq(replicates);
  constexpr std::uint64_t kBlock = 4096;
  for (std::uint64_t first = 0; first < replicates; first += kBlock) {
    const std::uint64_t count = std::min<std::uint64_t>(kBlock, replicates - first);
    const Matrix f = fx->draw_batch(f_streams, first, count);
    const Matrix g = gy->draw_batch(g_streams, first, count);
    for (std::uint64_t r = 0; r < count; ++r) {
      const auto c = static_cast<Eigen::Index>(r);
      const double cov = f.col(c).dot(p * g.col(c)) - px.dot(f.col(c)) * py.dot(g.col(c));
      sq[first + r] = cov * cov;
    }
  }
  out.mean_sq_cov = mean(sq);
  out.std_err = standard_error(sq);
  const double diffv = out.mean_sq_cov - out.population;
  out.z = out.std_err > 0.0 ? diffv / out.std_err : (std::abs(diffv) <= 1e-12 ? 0.0 : INFINITY);
  out.pass = std::abs(out.z) <= 3.0;
  out.status = "ok";
  return out;
}

JointFiniteDistribution indicator_dependence_joint() {
  const PointSet support = points_1d({-1.0, 0.0, 1.0});
  Matrix p = Matrix::Zero(3, 3);
  // rows: X in {-1, 0, 1}; columns: Y in {-1, 0, 1}
  p(2, 1) = 0.25;  // Z in [0, 1):  X = 1,  Y = 0
  p(0, 1) = 0.25;  // Z in (-1, 0): X = -1, Y = 0
  p(1, 0) = 0.25;  // Z in [1, 2]:  X = 0,  Y = -1
  p(1, 2) = 0.25;  // Z in [-2,-1]: X = 0,  Y = 1
  return JointFiniteDistribution(support, support, p);
}

}  // namespace gpk
