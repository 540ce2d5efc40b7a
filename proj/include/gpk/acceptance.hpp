#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gpk {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  double metric;     // headline quantity compared against `threshold`
  double threshold;
  std::string detail;  // sub-check summary; deterministic for a fixed seed
  double seconds;
  double budget_seconds;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240917;
  std::vector<int> only;   // empty: all criteria
  int inject_failure = 0;  // criterion id whose tolerances are corrupted (negated)
};

inline constexpr int kCriterionCount = 13;

std::string criterion_name(int id);

/// Runs the selected criteria in order, calling `on_result` after each.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace gpk
