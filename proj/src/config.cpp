#include "contagion/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "contagion/error.hpp"
#include "contagion/limit.hpp"

namespace contagion {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& problem) {
  throw Error(ErrorCode::ParseError, "field '" + field + "': " + problem);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path + key, "missing required field");
  return *it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) field_error(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) field_error(field, "must be finite");
  return x;
}

std::uint64_t unsigned_integer(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) field_error(field, "must be nonnegative");
  field_error(field, "expected an integer");
}

std::size_t positive_integer(const json& v, const std::string& field) {
  const auto x = unsigned_integer(v, field);
  if (x == 0) field_error(field, "must be positive");
  return static_cast<std::size_t>(x);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      field_error(path + key, "unknown field");
    }
  }
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

std::string_view to_string(AssignmentMode mode) noexcept {
  return mode == AssignmentMode::IidSample ? "iid_sample" : "deterministic_proportions";
}

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "line " << line_of(text, e.byte == 0 ? 0 : e.byte - 1) << ": " << e.what();
    throw Error(ErrorCode::ParseError, msg.str());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "top level must be an object");
  reject_unknown(doc,
                 {"classes", "n", "horizon", "grid_size", "replicas", "thresholds", "seed",
                  "assignment_mode", "ode_tolerance", "description"},
                 "");

  if (auto it = doc.find("description"); it != doc.end() && !it->is_string()) {
    field_error("description", "expected a string");
  }

  const json& classes = require(doc, "classes", "");
  if (!classes.is_array() || classes.empty()) field_error("classes", "expected a non-empty array");
  std::vector<FirmClass> parsed;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const std::string path = "classes[" + std::to_string(k) + "].";
    const json& c = classes[k];
    if (!c.is_object()) field_error(path.substr(0, path.size() - 1), "expected an object");
    reject_unknown(c, {"alpha", "beta", "gamma", "exposure", "weight"}, path);
    parsed.push_back({number(require(c, "alpha", path), path + "alpha"),
                      number(require(c, "beta", path), path + "beta"),
                      number(require(c, "gamma", path), path + "gamma"),
                      number(require(c, "exposure", path), path + "exposure"),
                      number(require(c, "weight", path), path + "weight")});
  }

  const std::size_t n = positive_integer(require(doc, "n", ""), "n");
  const double horizon = number(require(doc, "horizon", ""), "horizon");
  if (!(horizon > 0)) field_error("horizon", "must be positive");
  const std::size_t replicas = positive_integer(require(doc, "replicas", ""), "replicas");
  const std::uint64_t seed = unsigned_integer(require(doc, "seed", ""), "seed");

  const json& raw_thresholds = require(doc, "thresholds", "");
  if (!raw_thresholds.is_array() || raw_thresholds.empty()) {
    field_error("thresholds", "expected a non-empty array of numbers");
  }
  std::set<double> unique;
  for (std::size_t j = 0; j < raw_thresholds.size(); ++j) {
    unique.insert(number(raw_thresholds[j], "thresholds[" + std::to_string(j) + "]") + 0.0);
  }

  std::size_t grid_size = kDefaultGridSize;
  if (auto it = doc.find("grid_size"); it != doc.end()) {
    grid_size = positive_integer(*it, "grid_size");
    if (grid_size < 2) field_error("grid_size", "must be at least 2");
  }
  double tolerance = kDefaultOdeTolerance;
  if (auto it = doc.find("ode_tolerance"); it != doc.end()) {
    tolerance = number(*it, "ode_tolerance");
    if (!(tolerance > 0)) field_error("ode_tolerance", "must be positive");
  }
  AssignmentMode mode = AssignmentMode::DeterministicProportions;
  if (auto it = doc.find("assignment_mode"); it != doc.end()) {
    if (!it->is_string()) field_error("assignment_mode", "expected a string");
    const auto value = it->get<std::string>();
    if (value == "iid_sample") {
      mode = AssignmentMode::IidSample;
    } else if (value != "deterministic_proportions") {
      field_error("assignment_mode", "expected deterministic_proportions or iid_sample");
    }
  }

  Environment env = [&] {
    try {
      return validate_environment(parsed);
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationError, e.what());
    }
  }();

  ScenarioConfig cfg{parsed,    std::move(env), n,    horizon, grid_size, replicas,
                     {unique.begin(), unique.end()}, seed, mode, tolerance, {}};

  json canonical = json::object();
  canonical["classes"] = json::array();
  for (const auto& c : cfg.classes) {
    canonical["classes"].push_back({{"alpha", c.alpha},
                                    {"beta", c.beta},
                                    {"gamma", c.gamma},
                                    {"exposure", c.exposure},
                                    {"weight", c.weight}});
  }
  canonical["n"] = cfg.n;
  canonical["horizon"] = cfg.horizon;
  canonical["grid_size"] = cfg.grid_size;
  canonical["replicas"] = cfg.replicas;
  canonical["thresholds"] = cfg.thresholds;
  canonical["seed"] = cfg.seed;
  canonical["assignment_mode"] = std::string(to_string(cfg.assignment_mode));
  canonical["ode_tolerance"] = cfg.ode_tolerance;
  cfg.canonical = canonical.dump();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_hash(const ScenarioConfig& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.canonical) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

}  // namespace contagion
