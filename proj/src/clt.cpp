#include "contagion/clt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contagion/error.hpp"
#include "contagion/parallel.hpp"
#include "contagion/rng.hpp"

namespace contagion {

namespace {

void require_consistent(const LimitSolution& sol, const Environment& env) {
  if (sol.classes() != env.size()) {
    throw Error(ErrorCode::DimensionMismatch, "solution and environment differ in classes");
  }
}

const ReciprocityCertificate& require_certificate(
    const Environment& env, const std::optional<ReciprocityCertificate>& cert) {
  if (!cert) throw Error(ErrorCode::ReciprocityRequired, "no reciprocity certificate given");
  for (const auto& c : env.classes()) {
    const double residual = std::abs(c.beta - cert->b * c.alpha);
    if (residual > cert->max_residual + 1e-12 * (1.0 + c.beta)) {
      throw Error(ErrorCode::ReciprocityRequired, "certificate does not hold for environment");
    }
  }
  return *cert;
}

std::size_t grid_index(const LimitSolution& sol, double t) {
  if (!(t >= 0.0) || t > sol.horizon() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::NotAGridPoint, "time outside the solution grid");
  }
  const auto g = static_cast<std::size_t>(std::llround(t / sol.step));
  if (g >= sol.t_grid.size() ||
      std::abs(sol.t_grid[g] - t) > 1e-9 * std::max(1.0, sol.horizon())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t = " << t << " is not a multiple of the step " << sol.step;
    throw Error(ErrorCode::NotAGridPoint, msg.str());
  }
  return g;
}

/// Per-grid ingredients of A and B that do not depend on the horizon.
struct Integrand {
  std::vector<double> loss_impact;  // sum_k p_k alpha_k e_k q_k(s)
  std::vector<double> impact;       // m(s)
  std::vector<double> noise;        // B(s)
  std::vector<double> loss;         // l(s)
  std::vector<double> loss_square;  // sum_k p_k e_k^2 q_k(s)

  Integrand(const LimitSolution& sol, const Environment& env) {
    const std::size_t grid = sol.t_grid.size();
    loss_impact.assign(grid, 0.0);
    noise.assign(grid, 0.0);
    loss.assign(grid, 0.0);
    loss_square.assign(grid, 0.0);
    impact = sol.m;
    for (std::size_t g = 0; g < grid; ++g) {
      for (std::size_t k = 0; k < env.size(); ++k) {
        const auto& c = env[k];
        const double q = sol.q(g, k);
        loss_impact[g] += c.weight * c.alpha * c.exposure * q;
        noise[g] += c.weight * c.beta * c.beta * (1.0 - q) * sol.hazard(g, k);
        loss[g] += c.weight * c.exposure * q;
        loss_square[g] += c.weight * c.exposure * c.exposure * q;
      }
    }
  }

  double a(std::size_t s, double l_t) const { return loss_impact[s] - l_t * impact[s]; }
};

VarianceReport report_at(const LimitSolution& sol, const Integrand& in, std::size_t g,
                         double b) {
  VarianceReport r;
  r.horizon = sol.t_grid[g];
  r.b = b;
  r.l = in.loss[g];
  r.static_var = std::max(0.0, in.loss_square[g] - r.l * r.l);
  double integral = 0.0;
  for (std::size_t s = 0; s < g; ++s) {
    const double a0 = in.a(s, r.l), a1 = in.a(s + 1, r.l);
    integral += 0.5 * sol.step * (a0 * a0 * in.noise[s] + a1 * a1 * in.noise[s + 1]);
  }
  r.contagion_var = integral;
  r.total = r.static_var + r.contagion_var;
  return r;
}

template <class Driver>
CovDiagEstimate covdiag(const LimitSolution& sol, const Environment& env,
                        const std::optional<ReciprocityCertificate>& cert, double t,
                        std::size_t replicas, std::uint64_t seed, Driver&& driver) {
  require_consistent(sol, env);
  const double b = require_certificate(env, cert).b;
  if (replicas < 100) throw Error(ErrorCode::InvalidArgument, "need at least 100 replicas");
  const std::size_t gt = grid_index(sol, t);
  const Integrand in(sol, env);
  const double l_t = in.loss[gt];
  const std::size_t k_count = env.size();
  const double h = sol.step;

  std::vector<double> a(gt + 1);
  for (std::size_t s = 0; s <= gt; ++s) a[s] = in.a(s, l_t);
  // comp(s, k) = int_0^{t_s} A(u) hazard_k(u) du by the trapezoid rule.
  Matrix comp(gt + 1, k_count);
  for (std::size_t s = 1; s <= gt; ++s) {
    for (std::size_t k = 0; k < k_count; ++k) {
      comp(s, k) = comp(s - 1, k) +
                   0.5 * h * (a[s - 1] * sol.hazard(s - 1, k) + a[s] * sol.hazard(s, k));
    }
  }
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : env.classes()) cumulative.push_back(acc += c.weight);

  auto sample = [&](std::size_t r) {
    Rng rng(seed, r);
    const double u = rng.uniform() * acc;
    const auto k = std::min<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin(),
        k_count - 1);
    const auto tau = sample_limit_default_time(sol, k, rng);
    const bool defaulted = tau && *tau <= sol.t_grid[gt];
    const double stop = defaulted ? *tau : sol.t_grid[gt];

    // Cell [t_s, t_{s+1}] holding `stop`, then linear pieces inside it.
    auto s = static_cast<std::size_t>(std::floor(stop / h));
    if (s >= gt) s = gt == 0 ? 0 : gt - 1;
    const double frac = gt == 0 ? 0.0 : std::clamp((stop - sol.t_grid[s]) / h, 0.0, 1.0);
    double a_stop = a[s], compensator = 0.0;
    if (gt > 0) {
      a_stop = a[s] + frac * (a[s + 1] - a[s]);
      const double hz_stop = sol.hazard(s, k) + frac * (sol.hazard(s + 1, k) - sol.hazard(s, k));
      compensator =
          comp(s, k) + 0.5 * frac * h * (a[s] * sol.hazard(s, k) + a_stop * hz_stop);
    }
    const double jump = defaulted ? a_stop : 0.0;
    const double scale = b * env[k].alpha;
    const double x = (defaulted ? env[k].exposure : 0.0) - l_t - scale * (jump - compensator);
    return x * x;
  };

  std::size_t count = 0;
  double mean = 0.0, m2 = 0.0;
  driver(replicas, sample, [&](double x2) {
    ++count;
    const double delta = x2 - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x2 - mean);
  });
  const double var = m2 / static_cast<double>(count - 1);
  return {mean, std::sqrt(var / static_cast<double>(count))};
}

}  // namespace

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

VarianceReport variance_horizon(const LimitSolution& sol, const Environment& env, double t,
                                const std::optional<ReciprocityCertificate>& cert) {
  require_consistent(sol, env);
  const double b = require_certificate(env, cert).b;
  const std::size_t g = grid_index(sol, t);
  return report_at(sol, Integrand(sol, env), g, b);
}

double excess_prob(const VarianceReport& report, std::size_t n, double x) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "portfolio size must be positive");
  if (!(report.total >= 0)) throw Error(ErrorCode::InvalidArgument, "negative variance");
  // Losses are nonnegative, so a nonpositive threshold is always reached.
  if (x <= 0.0) return 1.0;
  if (report.total == 0.0) return x <= report.l ? 1.0 : 0.0;
  const double z = (x - report.l) * std::sqrt(static_cast<double>(n)) / std::sqrt(report.total);
  return normal_upper_tail(z);
}

Matrix excess_curve(const LimitSolution& sol, const Environment& env,
                    const std::optional<ReciprocityCertificate>& cert, std::size_t n,
                    std::span<const double> thresholds, std::span<const double> t_grid) {
  require_consistent(sol, env);
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "no thresholds given");
  const double b = require_certificate(env, cert).b;
  const Integrand in(sol, env);
  Matrix out(t_grid.size(), thresholds.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const auto report = report_at(sol, in, grid_index(sol, t_grid[i]), b);
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
      out(i, j) = excess_prob(report, n, thresholds[j]);
    }
  }
  return out;
}

CovDiagEstimate mc_validate_covdiag(const LimitSolution& sol, const Environment& env,
                                    const std::optional<ReciprocityCertificate>& cert,
                                    double t, std::size_t replicas, std::uint64_t seed) {
  return covdiag(sol, env, cert, t, replicas, seed,
                 [](std::size_t count, auto&& make, auto&& consume) {
                   for_each_replica_parallel(count, make, consume);
                 });
}

CovDiagEstimate mc_validate_covdiag_serial(const LimitSolution& sol, const Environment& env,
                                           const std::optional<ReciprocityCertificate>& cert,
                                           double t, std::size_t replicas,
                                           std::uint64_t seed) {
  return covdiag(sol, env, cert, t, replicas, seed,
                 [](std::size_t count, auto&& make, auto&& consume) {
                   for_each_replica_serial(count, make, consume);
                 });
}

}  // namespace contagion
