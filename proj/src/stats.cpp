#include "gpk/stats.hpp"

#include <algorithm>
#include <cmath>

#include "gpk/error.hpp"

namespace gpk {

double tree_sum(const double* data, std::size_t count) {
  if (count == 0) return 0.0;
  if (count <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = count / 2;
  return tree_sum(data, half) + tree_sum(data + half, count - half);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw InputError("mean of an empty sample");
  return tree_sum(v) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw InputError("variance needs at least two values");
  const double m = mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return tree_sum(sq) / static_cast<double>(v.size() - 1);
}

double standard_error(const std::vector<double>& v) {
  return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

double median(std::vector<double> v) {
  if (v.empty()) throw InputError("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope fit needs two or more paired values");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InputError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

double loglog_slope_top_half(const std::vector<double>& n, const std::vector<double>& metric) {
  if (n.size() != metric.size() || n.size() < 3) throw InputError("rate ladder needs three or more rungs");
  const std::size_t take = (n.size() + 1) / 2;
  std::vector<double> lx, ly;
  for (std::size_t i = n.size() - take; i < n.size(); ++i) {
    if (!(metric[i] > 0.0)) throw NumericalError("rate metric must be positive to fit a log-log slope");
    lx.push_back(std::log2(n[i]));
    ly.push_back(std::log2(metric[i]));
  }
  return ols_slope(lx, ly);
}

}  // namespace gpk
