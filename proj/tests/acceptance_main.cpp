// Runs acceptance criteria 1-13 and prints one PASS/FAIL line each.
// Optional arguments: criterion ids to run (default: all).
#include <cstdio>
#include <cstdlib>
#include <string>

#include "gpk/acceptance.hpp"

int main(int argc, char** argv) {
  gpk::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) opts.only.push_back(std::atoi(argv[i]));

  int failed = 0;
  double total = 0.0;
  gpk::run_acceptance(opts, [&](const gpk::CriterionResult& r) {
    std::printf("%s criterion %2d %-34s metric=%-24.17g threshold=%-10.3g %7.2fs/%.0fs  %s\n", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.metric, r.threshold, r.seconds, r.budget_seconds, r.detail.c_str());
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
    total += r.seconds;
  });
  std::printf("%d failed, total %.1f s\n", failed, total);
  return failed == 0 ? 0 : 1;
}
