#include <iostream>

#include "commands.hpp"
#include "gpk/error.hpp"

int main(int argc, char** argv) {
  using namespace gpk::cli;
  CLI::App app{"Gaussian-process / RKHS equivalence toolkit"};
  app.set_version_flag("--version", std::string(GPK_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--out", g.out, "Output path ('-' for stdout)")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::function<int()> action;
  register_commands(app, g, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const gpk::SingularMatrixError& e) {
    std::cerr << "numerical error: " << e.what() << " (last jitter " << e.last_jitter() << ")\n";
    return kNumerical;
  } catch (const gpk::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const gpk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
