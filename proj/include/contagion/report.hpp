#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "contagion/config.hpp"

namespace contagion {

inline constexpr std::string_view kToolVersion = CONTAGION_VERSION;

/// Shortest decimal that round-trips to the same double; "nan"/"inf"/"-inf"
/// for non-finite values.
std::string format_number(double x);

/// Minimal CSV writer: a fixed header, then rows of numbers. Output uses '\n'.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

/// Each run writes its data file plus manifest.json into out_dir (created if
/// needed) and returns the paths written, data first.
std::vector<std::filesystem::path> run_limit(const ScenarioConfig& cfg,
                                             const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> run_simulate(const ScenarioConfig& cfg,
                                                const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> run_analyze(const ScenarioConfig& cfg,
                                               const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> run_compare(const ScenarioConfig& cfg,
                                               const std::filesystem::path& out_dir);

/// Reciprocity check used by analyze and compare: tolerance 1e-12 (1 + max beta).
ReciprocityCertificate scenario_reciprocity(const Environment& env);

}  // namespace contagion
