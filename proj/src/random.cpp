#include "gpk/random.hpp"

namespace gpk {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSpec RngSpec::replicate(std::uint64_t index) const {
  return RngSpec{seed, splitmix64(stream ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

std::mt19937_64 make_engine(const RngSpec& spec) {
  return std::mt19937_64(splitmix64(spec.seed ^ splitmix64(spec.stream)));
}

Vector standard_normals(std::mt19937_64& engine, Eigen::Index n) {
  std::normal_distribution<double> z(0.0, 1.0);
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = z(engine);
  return out;
}

}  // namespace gpk
