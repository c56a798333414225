#include "contagion/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "contagion/clt.hpp"
#include "contagion/ctmc.hpp"
#include "contagion/error.hpp"
#include "contagion/limit.hpp"
#include "contagion/parallel.hpp"

namespace contagion {

namespace fs = std::filesystem;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw Error(ErrorCode::DimensionMismatch, "csv row width");
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << (i ? "," : "") << format_number(values[i]);
  }
  out_ << '\n';
}

ReciprocityCertificate scenario_reciprocity(const Environment& env) {
  double max_beta = 0.0;
  for (const auto& c : env.classes()) max_beta = std::max(max_beta, c.beta);
  return check_reciprocity(env, 1e-12 * (1.0 + max_beta));
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Run {
 public:
  Run(const ScenarioConfig& cfg, fs::path out_dir, std::string command)
      : cfg_(cfg), dir_(std::move(out_dir)), command_(std::move(command)), started_(utc_now()) {
    fs::create_directories(dir_);
  }

  std::ofstream open(const std::string& name) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    files_.push_back(path);
    return out;
  }

  std::vector<fs::path> finish() {
    nlohmann::json manifest = {
        {"command", command_},
        {"config_hash", config_hash(cfg_)},
        {"config", nlohmann::json::parse(cfg_.canonical)},
        {"tool_version", std::string(kToolVersion)},
        {"seed", cfg_.seed},
        {"started_utc", started_},
        {"finished_utc", utc_now()},
        {"workers", worker_count()},
    };
    manifest["outputs"] = nlohmann::json::array();
    for (const auto& f : files_) manifest["outputs"].push_back(f.filename().string());

    const fs::path path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << manifest.dump(2) << '\n';
    files_.push_back(path);
    return files_;
  }

 private:
  const ScenarioConfig& cfg_;
  fs::path dir_;
  std::string command_;
  std::string started_;
  std::vector<fs::path> files_;
};

LimitSolution solve(const ScenarioConfig& cfg) {
  return solve_limit(cfg.environment, cfg.horizon, cfg.grid_size, cfg.ode_tolerance);
}

EnsembleStats simulate(const ScenarioConfig& cfg, const std::vector<double>& grid) {
  const auto portfolio = build_portfolio(cfg.environment, cfg.n, cfg.assignment_mode, cfg.seed);
  return monte_carlo(portfolio, cfg.horizon, grid, cfg.replicas, cfg.thresholds, cfg.seed);
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t k = 1; k <= count; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

std::vector<double> variance_column(const LimitSolution& sol, const Environment& env,
                                    const ReciprocityCertificate& cert) {
  std::vector<double> v(sol.t_grid.size());
  for (std::size_t g = 0; g < v.size(); ++g) {
    v[g] = variance_horizon(sol, env, sol.t_grid[g], cert).total;
  }
  return v;
}

}  // namespace

std::vector<fs::path> run_limit(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const auto sol = solve(cfg);
  const auto loss = limit_loss(sol, cfg.environment);
  const std::size_t k_count = cfg.environment.size();

  Run run(cfg, out_dir, "limit");
  auto out = run.open("limit.csv");
  std::vector<std::string> header{"t"};
  append(header, numbered("q_", k_count));
  header.insert(header.end(), {"m", "l"});
  append(header, numbered("hazard_", k_count));
  CsvWriter csv(out, header);
  for (std::size_t g = 0; g < sol.t_grid.size(); ++g) {
    std::vector<double> row{sol.t_grid[g]};
    for (std::size_t k = 0; k < k_count; ++k) row.push_back(sol.q(g, k));
    row.push_back(sol.m[g]);
    row.push_back(loss[g]);
    for (std::size_t k = 0; k < k_count; ++k) row.push_back(sol.hazard(g, k));
    csv.row(row);
  }
  out.close();
  return run.finish();
}

std::vector<fs::path> run_simulate(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const auto grid = uniform_grid(cfg.horizon, cfg.grid_size);
  const auto stats = simulate(cfg, grid);
  const std::size_t k_count = cfg.environment.size();

  Run run(cfg, out_dir, "simulate");
  auto out = run.open("mc.csv");
  std::vector<std::string> header{"t"};
  append(header, numbered("mean_frac_", k_count));
  header.insert(header.end(), {"mean_loss", "var_scaled_loss"});
  for (double x : cfg.thresholds) header.push_back("excess_emp_" + format_number(x));
  CsvWriter csv(out, header);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> row{grid[g]};
    for (std::size_t k = 0; k < k_count; ++k) row.push_back(stats.mean_class_fractions(g, k));
    row.push_back(stats.mean_loss_fraction[g]);
    row.push_back(stats.var_scaled_loss[g]);
    for (std::size_t j = 0; j < cfg.thresholds.size(); ++j) {
      row.push_back(stats.excess_prob_empirical(g, j));
    }
    csv.row(row);
  }
  out.close();
  return run.finish();
}

std::vector<fs::path> run_analyze(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const auto cert = scenario_reciprocity(cfg.environment);
  const auto sol = solve(cfg);
  const auto loss = limit_loss(sol, cfg.environment);
  const auto variance = variance_column(sol, cfg.environment, cert);
  const auto excess = excess_curve(sol, cfg.environment, cert, cfg.n, cfg.thresholds, sol.t_grid);

  Run run(cfg, out_dir, "analyze");
  auto out = run.open("clt.csv");
  std::vector<std::string> header{"t", "l", "V"};
  for (double x : cfg.thresholds) header.push_back("excess_" + format_number(x));
  CsvWriter csv(out, header);
  for (std::size_t g = 0; g < sol.t_grid.size(); ++g) {
    std::vector<double> row{sol.t_grid[g], loss[g], variance[g]};
    for (std::size_t j = 0; j < cfg.thresholds.size(); ++j) row.push_back(excess(g, j));
    csv.row(row);
  }
  out.close();
  return run.finish();
}

std::vector<fs::path> run_compare(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const auto cert = scenario_reciprocity(cfg.environment);
  const auto sol = solve(cfg);
  const auto loss = limit_loss(sol, cfg.environment);
  const auto variance = variance_column(sol, cfg.environment, cert);
  const auto stats = simulate(cfg, sol.t_grid);
  const std::size_t k_count = cfg.environment.size();

  Run run(cfg, out_dir, "compare");
  auto out = run.open("compare.csv");
  std::vector<std::string> header{"t"};
  append(header, numbered("q_", k_count));
  append(header, numbered("emp_frac_", k_count));
  append(header, numbered("abs_gap_", k_count));
  header.insert(header.end(),
                {"l", "mean_loss", "V", "var_scaled_loss", "var_scaled_loss_gap"});
  CsvWriter csv(out, header);
  for (std::size_t g = 0; g < sol.t_grid.size(); ++g) {
    std::vector<double> row{sol.t_grid[g]};
    for (std::size_t k = 0; k < k_count; ++k) row.push_back(sol.q(g, k));
    for (std::size_t k = 0; k < k_count; ++k) row.push_back(stats.mean_class_fractions(g, k));
    for (std::size_t k = 0; k < k_count; ++k) {
      row.push_back(std::abs(stats.mean_class_fractions(g, k) - sol.q(g, k)));
    }
    row.insert(row.end(), {loss[g], stats.mean_loss_fraction[g], variance[g],
                           stats.var_scaled_loss[g], stats.var_scaled_loss[g] - variance[g]});
    csv.row(row);
  }
  out.close();
  return run.finish();
}

}  // namespace contagion
