#pragma once

#include <vector>

namespace gpk {

double mean(const std::vector<double>& v);

/// Unbiased sample variance (n - 1 denominator).
double sample_variance(const std::vector<double>& v);

/// Standard error of the sample mean.
double standard_error(const std::vector<double>& v);

double median(std::vector<double> v);

/// Ordinary least-squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

/// OLS slope of log2(metric) on log2(n) over the top half of the ladder
/// (the last ceil(size / 2) rungs).
double loglog_slope_top_half(const std::vector<double>& n, const std::vector<double>& metric);

/// Pairwise (indexed tree) summation; the association order depends only on the size.
double tree_sum(const double* data, std::size_t count);

inline double tree_sum(const std::vector<double>& v) { return tree_sum(v.data(), v.size()); }

}  // namespace gpk
