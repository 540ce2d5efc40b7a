#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "gpk/types.hpp"

namespace gpk {

/// Seed and stream of a replicate. Engines are std::mt19937_64 seeded through a
/// SplitMix64 mix of (seed, stream); normals come from std::normal_distribution,
/// so draws are bit-reproducible for one build.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  static constexpr std::string_view algorithm = "mt19937_64+splitmix64";

  /// Stream for the replicate with the given index, derived from (seed, stream, index)
  /// so serial and parallel runs draw identical values.
  RngSpec replicate(std::uint64_t index) const;
};

std::uint64_t splitmix64(std::uint64_t x);

std::mt19937_64 make_engine(const RngSpec& spec);

/// n i.i.d. standard normals.
Vector standard_normals(std::mt19937_64& engine, Eigen::Index n);

}  // namespace gpk
