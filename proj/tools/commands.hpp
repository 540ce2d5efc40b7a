#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "CLI11.hpp"

namespace gpk::cli {

struct Globals {
  std::uint64_t seed = 20240917;
  std::string out = "-";
  std::string format = "csv";
};

// Exit status of a finished subcommand.
enum Exit : int { kOk = 0, kCriterionFailure = 1, kUsage = 2, kNumerical = 3 };

/// Adds every subcommand to `app`. When one is selected, `action` is set to
/// the function that runs it.
void register_commands(CLI::App& app, const Globals& globals, std::function<int()>& action);

}  // namespace gpk::cli
