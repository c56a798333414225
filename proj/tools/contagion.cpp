// Command-line front end: contagion {simulate|limit|analyze|compare} --config PATH --out DIR

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "contagion/config.hpp"
#include "contagion/error.hpp"
#include "contagion/parallel.hpp"
#include "contagion/report.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitReciprocity = 4;

int exit_code_for(contagion::ErrorCode code) {
  using contagion::ErrorCode;
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::EmptyEnvironment:
    case ErrorCode::NonPositiveWeight:
    case ErrorCode::WeightsDoNotSumToOne:
    case ErrorCode::NegativeParameter:
    case ErrorCode::NonFiniteParameter:
    case ErrorCode::ConflictingExposure:
    case ErrorCode::InvalidArgument:
      return kExitConfig;
    case ErrorCode::ReciprocityViolated:
    case ErrorCode::ReciprocityRequired:
    case ErrorCode::AllAlphasZero:
      return kExitReciprocity;
    default:
      return kExitNumerical;
  }
}

using Runner = std::function<std::vector<std::filesystem::path>(
    const contagion::ScenarioConfig&, const std::filesystem::path&)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Credit contagion: finite-portfolio simulation, large-portfolio limit and "
               "Gaussian loss approximations"};
  app.set_version_flag("--version", std::string(contagion::kToolVersion));
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, Runner>> commands = {
      {"simulate", {"Monte Carlo of the finite-N default process (mc.csv)", contagion::run_simulate}},
      {"limit", {"Solve the large-portfolio limit equation (limit.csv)", contagion::run_limit}},
      {"analyze", {"Asymptotic loss variance and excess-loss curves (clt.csv)", contagion::run_analyze}},
      {"compare", {"Limit vs Monte Carlo on a shared grid (compare.csv)", contagion::run_compare}},
  };

  std::string config_path;
  std::string out_dir;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (auto workers = contagion::worker_count_from_env()) contagion::set_worker_count(*workers);
    const auto cfg = contagion::load_config(config_path);
    const auto& name = app.get_subcommands().front()->get_name();
    for (const auto& path : commands.at(name).second(cfg, out_dir)) {
      std::cout << path.string() << '\n';
    }
  } catch (const contagion::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return EXIT_SUCCESS;
}
