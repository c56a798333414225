#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "contagion/model.hpp"

namespace contagion {

/// A scenario as read from its JSON document, with defaults filled in.
struct ScenarioConfig {
  std::vector<FirmClass> classes;  // as written, before merging
  Environment environment;
  std::size_t n = 0;
  double horizon = 0.0;
  std::size_t grid_size = 0;
  std::size_t replicas = 0;
  std::vector<double> thresholds;  // ascending, unique
  std::uint64_t seed = 0;
  AssignmentMode assignment_mode = AssignmentMode::DeterministicProportions;
  double ode_tolerance = 0.0;

  /// Canonical JSON (sorted keys, defaults applied, thresholds normalized).
  /// The free-text "description" field is not part of it.
  std::string canonical;
};

/// Parses and validates a scenario document. Throws Error{ParseError} for
/// syntax problems, missing or mistyped fields (message names line or field)
/// and Error{ValidationError} when the classes do not form a valid environment.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::string& path);

/// 64-bit FNV-1a of the canonical document, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

std::string_view to_string(AssignmentMode mode) noexcept;

}  // namespace contagion
