#pragma once

#include <functional>
#include <string>
#include <type_traits>
#include <variant>

#include "gpk/kernels.hpp"
#include "gpk/measure.hpp"
#include "gpk/random.hpp"
#include "gpk/rkhs.hpp"

namespace gpk {

/// f -> f(x)
struct Evaluation {
  Point x;
};

/// f -> \int f dP
struct Integral {
  Measure measure;
};

/// f -> d f / d x_c at x0 (first order; squared-exponential kernels only).
struct Derivative {
  Point x0;
  int coordinate = 0;
};

/// Which end of each partition cell weights the increment F(t_i) - F(t_{i-1}).
enum class StieltjesPoint { left, right };

/// f -> \int_0^1 g df for the Brownian kernel; the representer is h(x) = \int_0^x g.
struct PaleyWiener {
  std::function<double(double)> g;
  std::string label;
  StieltjesPoint rule = StieltjesPoint::left;
};

/// f -> lead * f(x) - sum_i weights_i f(centers_i). With lead = 1 and
/// weights = K^{-1} k_n(x) this is the interpolation error at x.
struct ErrorFunctional {
  Point x;
  PointSet centers;
  Vector weights;
  double lead = 1.0;
};

class LinearFunctional {
 public:
  using Variant = std::variant<Evaluation, Integral, Derivative, PaleyWiener, ErrorFunctional>;

  template <class T>
    requires std::is_constructible_v<Variant, T>
  LinearFunctional(T v) : v_(std::move(v)) {}  // NOLINT: implicit from any alternative

  static LinearFunctional evaluation(const Point& x) { return Evaluation{x}; }
  static LinearFunctional integral(const Measure& m) { return Integral{m}; }
  static LinearFunctional derivative(const Point& x0, int coordinate = 0) { return Derivative{x0, coordinate}; }
  static LinearFunctional paley_wiener(std::function<double(double)> g, std::string label = "g",
                                       StieltjesPoint rule = StieltjesPoint::left) {
    return PaleyWiener{std::move(g), std::move(label), rule};
  }
  /// Interpolation error at x with the optimal weights K^{-1} k_n(x).
  static LinearFunctional interpolation_error(const Kernel& kernel, const Point& x, const PointSet& centers);

  const Variant& variant() const { return v_; }
  std::string name() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }

 private:
  Variant v_;
};

/// Riesz representer f_A with A(f) = <f, f_A>. Throws UnsupportedError for
/// pairs outside: Derivative x SE, PaleyWiener x Brownian, Integral x the
/// kernel-mean table.
ScalarFunction riesz_representer(const LinearFunctional& a, const Kernel& kernel);

/// sup_{||f|| <= 1} A(f) = ||f_A||.
double functional_norm(const LinearFunctional& a, const Kernel& kernel);

/// A applied to a span element by the functional's own definition (not via
/// the representer).
double apply_to_span(const LinearFunctional& a, const SpanElement& f);

/// Finite weighted sum A_n(f) = sum_i w_i f(p_i) approximating A.
struct Approximant {
  PointSet points;
  Vector weights;
  bool exact;  // A_n = A on every function (no grid bias)
};

/// Evaluation and ErrorFunctional are exact; Integral uses the atoms of a
/// finite measure or the midpoint rule (grid_size cells per axis); Derivative
/// uses central differences with step 1/grid_size; PaleyWiener uses the
/// Riemann-Stieltjes sum on t_i = i/grid_size (F(0) = 0 drops out).
Approximant approximant(const LinearFunctional& a, const Kernel& kernel, std::size_t grid_size);

/// Exact second moment E[A_n(F)^2] = w^T K w of the approximant under GP(0, k).
double approximant_second_moment(const Approximant& ap, const Kernel& kernel);

/// A_n(F) for n_reps independent F ~ GP(0, k), each drawn exactly at the
/// approximant's points. Replicate r uses rng.replicate(r).
std::vector<double> apply_mc(const LinearFunctional& a, const Kernel& kernel, const RngSpec& rng,
                             std::size_t grid_size, std::size_t n_reps);

struct MasterReport {
  double rms_mc;      // sqrt(mean A_n(F)^2)
  double riesz_norm;  // functional_norm
  double mc_std_err;  // delta-method standard error of rms_mc
  double z;
  double grid_bias;   // 2 |sqrt(E A_n^2) - sqrt(E A_2n^2)|, 0 for exact approximants
  double mean_sq;     // mean A_n(F)^2
  double mean_sq_std_err;
  bool increase_grid;  // grid_bias > mc_std_err / 2
  bool pass;           // |z| <= 3 and the grid bias is below mc_std_err / 2
  double jitter_applied;
};

/// Monte-Carlo check of sqrt(E[A(F)^2]) = ||f_A||.
MasterReport master_equivalence_check(const LinearFunctional& a, const Kernel& kernel, const RngSpec& rng,
                                      std::size_t grid_size, std::size_t n_reps);

}  // namespace gpk
