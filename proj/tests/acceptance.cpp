// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "contagion/clt.hpp"
#include "contagion/config.hpp"
#include "contagion/ctmc.hpp"
#include "contagion/limit.hpp"
#include "contagion/parallel.hpp"
#include "contagion/report.hpp"
#include "linear_noise.hpp"
#include "master_equation.hpp"

using namespace contagion;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Environment two_type(double a1, double b1, double g1, double a2, double b2, double g2, double p) {
  return validate_environment({{a1, b1, g1, 1, p}, {a2, b2, g2, 1, 1 - p}});
}

std::string scenario_document(double p, std::size_t replicas, std::size_t grid) {
  return fmt(R"({"classes": [
      {"alpha": 4, "beta": 4, "gamma": 3, "exposure": 1, "weight": %.17g},
      {"alpha": 0.1, "beta": 0.1, "gamma": 3, "exposure": 1, "weight": %.17g}],
    "n": 125, "horizon": 5, "grid_size": %zu, "replicas": %zu,
    "thresholds": [0.05, 0.15, 0.25], "seed": 20240601})",
             p, 1 - p, grid, replicas);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Value in column `name` of the CSV row whose first field equals t.
double csv_lookup(const fs::path& file, const std::string& name, double t) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  std::stringstream hs(line);
  std::size_t col = 0, index = 0;
  bool found = false;
  for (std::string cell; std::getline(hs, cell, ','); ++index) {
    if (cell == name) {
      col = index;
      found = true;
    }
  }
  if (!found) return NAN;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));  // stod rejects subnormals
    if (row[0] == t) return row[col];
  }
  return NAN;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("contagion_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

// 1. Excess probability P(L/N >= 0.15) at t = 2.5, N = 125, from the analyze output.
Outcome scenario_reproduction() {
  const auto start = std::chrono::steady_clock::now();
  const auto b_file = run_analyze(parse_config(scenario_document(0.4, 10, 4096)), scratch("1b"))[0];
  const auto a_file = run_analyze(parse_config(scenario_document(0.2, 10, 4096)), scratch("1a"))[0];
  const double b = csv_lookup(b_file, "excess_0.15", 2.5);
  const double a = csv_lookup(a_file, "excess_0.15", 2.5);
  const double elapsed = seconds_since(start);
  const bool b_ok = b >= 0.45 && b <= 0.65;
  const bool a_ok = a <= 0.05;
  return {b_ok && a_ok && elapsed < 5.0,
          fmt("40%% type-1: %.4f in [0.45, 0.65] %s; 20%% type-1: %.4f <= 0.05 %s; %.2fs < 5s",
              b, b_ok ? "ok" : "NO", a, a_ok ? "ok" : "NO", elapsed)};
}

// 2. Law of large numbers on the equal-weight mixture.
Outcome law_of_large_numbers() {
  const auto start = std::chrono::steady_clock::now();
  const auto env = two_type(3, 3, 3, 0.1, 0.1, 1, 0.5);
  const auto sol = solve_limit(env, 5.0, kDefaultGridSize, kDefaultOdeTolerance);
  const auto portfolio = build_portfolio(env, 125, AssignmentMode::DeterministicProportions, 7);
  const auto stats = monte_carlo(portfolio, 5.0, sol.t_grid, 1000, std::vector<double>{}, 7);
  double gap[2] = {0, 0};
  for (std::size_t g = 0; g < sol.t_grid.size(); ++g) {
    for (std::size_t k = 0; k < 2; ++k) {
      gap[k] = std::max(gap[k], std::abs(stats.mean_class_fractions(g, k) - sol.q(g, k)));
    }
  }
  const double elapsed = seconds_since(start);
  // Diagnostic: the exact N = 125 expectation, i.e. the gap left at infinite M.
  const auto counts = portfolio.class_counts();
  const auto exact = testing::master_equation_means(env, counts[0], counts[1], 5.0,
                                                    sol.intervals());
  double bias = 0;
  for (std::size_t g = 0; g < exact.size(); ++g) {
    bias = std::max(bias, std::abs(exact[g][0] - sol.q(g, 0)));
  }
  return {gap[0] <= 0.02 && gap[1] <= 0.02 && elapsed < 60.0,
          fmt("sup gap class 1 %.4f, class 2 %.4f (<= 0.02); %.2fs < 60s "
              "[exact finite-N bias, class 1: %.4f]",
              gap[0], gap[1], elapsed, bias)};
}

// 3. Finite-N variance against the closed-form V(2.5).
Outcome clt_consistency() {
  const auto start = std::chrono::steady_clock::now();
  const auto env = two_type(4, 4, 3, 0.1, 0.1, 3, 0.4);
  const auto sol = solve_limit(env, 5.0, kDefaultGridSize, kDefaultOdeTolerance);
  const auto report = variance_horizon(sol, env, 2.5, check_reciprocity(env, 1e-12));
  const auto portfolio = build_portfolio(env, 500, AssignmentMode::DeterministicProportions, 3);
  const std::vector<double> grid{0.0, 2.5};
  const auto stats = monte_carlo(portfolio, 2.5, grid, 20000, std::vector<double>{}, 3);
  const double sample = stats.var_scaled_loss[1];
  const double rel = std::abs(sample - report.total) / report.total;
  const double elapsed = seconds_since(start);
  const auto lna = testing::linear_noise(env, 2.5);
  return {rel <= 0.10 && elapsed < 300.0,
          fmt("sample %.4f vs V %.4f: rel. gap %.1f%% (<= 10%%); %.2fs < 300s "
              "[linear-noise variance %.4f]",
              sample, report.total, 100 * rel, elapsed, lna.scaled_variance)};
}

// 4. Decoupled single class: ODE, variance and Monte Carlo against closed forms.
Outcome decoupled_oracle() {
  const auto env = validate_environment({{1, 0, 0, 1, 1.0}});
  const auto sol = solve_limit(env, 1.0, kDefaultGridSize, kDefaultOdeTolerance);
  const double q_exact = 1 - std::exp(-1.0);
  const double q = sol.q(sol.intervals(), 0);
  const auto report = variance_horizon(sol, env, 1.0, check_reciprocity(env, 0.0));
  const double v_exact = q_exact * (1 - q_exact);
  const auto portfolio = build_portfolio(env, 125, AssignmentMode::DeterministicProportions, 1);
  const std::vector<double> grid{0.0, 1.0};
  const auto stats = monte_carlo(portfolio, 1.0, grid, 10000, std::vector<double>{}, 1);
  const double se = std::sqrt(stats.var_scaled_loss[1] / 125.0 / 10000.0);
  const double mc_gap = std::abs(stats.mean_loss_fraction[1] - q_exact);
  const bool ok = std::abs(q - q_exact) < 1e-9 && std::abs(report.total - v_exact) < 1e-12 &&
                  mc_gap < 3 * se;
  return {ok, fmt("|q(1) - (1-e^-1)| = %.2e (< 1e-9); |V(1) - q(1-q)| = %.2e (< 1e-12); "
                  "MC gap %.2e < 3 SE = %.2e",
                  std::abs(q - q_exact), std::abs(report.total - v_exact), mc_gap, 3 * se)};
}

// 5. Fourth-order convergence of the limit solver.
Outcome ode_order() {
  const auto env = two_type(4, 4, 3, 0.1, 0.1, 3, 0.4);
  const std::size_t fine = 1 << 16;
  const auto reference = solve_limit(env, 5.0, fine, kDefaultOdeTolerance);
  auto error = [&](std::size_t grid) {
    const auto sol = solve_limit(env, 5.0, grid, kDefaultOdeTolerance);
    double e = 0;
    for (std::size_t k = 0; k < 2; ++k) {
      e = std::max(e, std::abs(sol.q(grid, k) - reference.q(fine, k)));
    }
    return e;
  };
  bool ok = true;
  std::string ratios;
  double previous = error(512);
  for (std::size_t grid : {1024u, 2048u, 4096u}) {
    const double current = error(grid);
    const double ratio = previous / current;
    ok = ok && ratio >= 12.0 && ratio <= 20.0;
    ratios += fmt(" %.2f", ratio);
    previous = current;
  }
  return {ok, "error ratios" + ratios + " (each in [12, 20])"};
}

// 6. Martingale representation against the closed form.
Outcome representation_agreement() {
  std::string detail;
  bool ok = true;
  const struct {
    const char* name;
    Environment env;
  } cases[] = {{"scenario B", two_type(4, 4, 3, 0.1, 0.1, 3, 0.4)},
               {"b=3 mixture", two_type(2, 6, 4, 1, 3, 5, 0.4)}};
  for (const auto& c : cases) {
    const auto sol = solve_limit(c.env, 5.0, kDefaultGridSize, kDefaultOdeTolerance);
    const auto cert = check_reciprocity(c.env, 1e-12);
    const auto report = variance_horizon(sol, c.env, 2.5, cert);
    const auto est = mc_validate_covdiag(sol, c.env, cert, 2.5, 100000, 6);
    const double z = std::abs(est.estimate - report.total) / est.std_error;
    ok = ok && z <= 3.0;
    detail += fmt("%s: MC %.5f +- %.5f vs V %.5f (%.1f SE); ", c.name, est.estimate,
                  est.std_error, report.total, z);
  }
  return {ok, detail + "limit 3 SE"};
}

// 7. Sampled default times reproduce q_k(t).
Outcome sampler_law() {
  const auto env = two_type(4, 4, 3, 0.1, 0.1, 3, 0.4);
  const auto sol = solve_limit(env, 5.0, kDefaultGridSize, kDefaultOdeTolerance);
  double worst = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> times;
    for (std::size_t i = 0; i < 100000; ++i) {
      Rng rng(777 + k, i);
      if (auto tau = sample_limit_default_time(sol, k, rng)) times.push_back(*tau);
    }
    std::sort(times.begin(), times.end());
    for (std::size_t g = 0; g < sol.t_grid.size(); ++g) {
      const auto below = std::upper_bound(times.begin(), times.end(), sol.t_grid[g]) - times.begin();
      worst = std::max(worst, std::abs(static_cast<double>(below) / 1e5 - sol.q(g, k)));
    }
  }
  return {worst <= 0.01, fmt("max |ECDF - q_k| = %.4f (<= 0.01)", worst)};
}

// 8. Byte-identical CSVs for every subcommand at two worker counts.
Outcome determinism() {
  const auto cfg = parse_config(scenario_document(0.4, 2000, 4096));
  using Runner = std::function<std::vector<fs::path>(const ScenarioConfig&, const fs::path&)>;
  const std::pair<const char*, Runner> commands[] = {{"simulate", run_simulate},
                                                     {"limit", run_limit},
                                                     {"analyze", run_analyze},
                                                     {"compare", run_compare}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, run] : commands) {
    std::string outputs[2];
    const char* threads[2] = {"1", "4"};
    for (int i = 0; i < 2; ++i) {
      ::setenv("CONTAGION_THREADS", threads[i], 1);
      set_worker_count(*worker_count_from_env());
      outputs[i] = slurp(run(cfg, scratch(std::string(name) + threads[i]))[0]);
    }
    const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
    ok = ok && same;
    detail += fmt("%s %s; ", name, same ? "identical" : "DIFFERENT");
  }
  ::unsetenv("CONTAGION_THREADS");
  return {ok, detail + "CONTAGION_THREADS=1 vs 4"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 scenario reproduction", scenario_reproduction},
      {"2 law of large numbers", law_of_large_numbers},
      {"3 CLT consistency", clt_consistency},
      {"4 decoupled exact oracle", decoupled_oracle},
      {"5 ODE order", ode_order},
      {"6 representation agreement", representation_agreement},
      {"7 sampler law", sampler_law},
      {"8 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
