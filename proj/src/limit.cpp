#include "contagion/limit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contagion/error.hpp"

namespace contagion {

namespace {

struct Integration {
  Matrix q;
  double clamp = 0.0;
};

class Field {
 public:
  explicit Field(const Environment& env) : env_(env) {
    for (const auto& c : env.classes()) impact_.push_back(c.weight * c.alpha);
  }

  double aggregate(std::span<const double> q) const {
    double m = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) m += impact_[k] * q[k];
    return m;
  }

  void eval(std::span<const double> q, std::span<double> dq) const {
    const double m = aggregate(q);
    for (std::size_t k = 0; k < q.size(); ++k) {
      dq[k] = std::exp(-env_[k].gamma + env_[k].beta * m) * (1.0 - q[k]);
    }
  }

 private:
  const Environment& env_;
  std::vector<double> impact_;
};

Integration integrate(const Environment& env, double horizon, std::size_t steps) {
  const std::size_t k_count = env.size();
  const Field field(env);
  const double h = horizon / static_cast<double>(steps);

  Integration out{Matrix(steps + 1, k_count), 0.0};
  std::vector<double> q(k_count, 0.0), k1(k_count), k2(k_count), k3(k_count), k4(k_count),
      tmp(k_count);
  for (std::size_t g = 0; g < steps; ++g) {
    field.eval(q, k1);
    for (std::size_t k = 0; k < k_count; ++k) tmp[k] = q[k] + 0.5 * h * k1[k];
    field.eval(tmp, k2);
    for (std::size_t k = 0; k < k_count; ++k) tmp[k] = q[k] + 0.5 * h * k2[k];
    field.eval(tmp, k3);
    for (std::size_t k = 0; k < k_count; ++k) tmp[k] = q[k] + h * k3[k];
    field.eval(tmp, k4);
    for (std::size_t k = 0; k < k_count; ++k) {
      const double next = q[k] + h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
      const double clamped = std::clamp(next, 0.0, 1.0);
      out.clamp = std::max(out.clamp, std::abs(next - clamped));
      q[k] = clamped;
      out.q(g + 1, k) = clamped;
    }
  }
  return out;
}

}  // namespace

LimitSolution solve_limit(const Environment& env, double horizon, std::size_t grid_size,
                          double tolerance) {
  if (!(horizon > 0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive and finite");
  }
  if (grid_size < 2) throw Error(ErrorCode::InvalidArgument, "grid_size must be at least 2");
  if (!(tolerance > 0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");

  const std::size_t k_count = env.size();
  auto coarse = integrate(env, horizon, grid_size);
  auto fine = integrate(env, horizon, 2 * grid_size);

  const double clamp = std::max(coarse.clamp, fine.clamp);
  if (clamp > tolerance) {
    std::ostringstream msg;
    msg << "clamped by " << clamp << " (tolerance " << tolerance << ")";
    throw Error(ErrorCode::ClampExceeded, msg.str());
  }
  double gap = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    gap = std::max(gap, std::abs(coarse.q(grid_size, k) - fine.q(2 * grid_size, k)));
  }
  if (gap > tolerance) {
    std::ostringstream msg;
    msg << "step-doubling gap " << gap << " exceeds tolerance " << tolerance << " at G="
        << grid_size;
    throw Error(ErrorCode::StepTooCoarse, msg.str());
  }

  LimitSolution sol;
  sol.t_grid.resize(grid_size + 1);
  sol.step = horizon / static_cast<double>(grid_size);
  for (std::size_t g = 0; g <= grid_size; ++g) sol.t_grid[g] = static_cast<double>(g) * sol.step;
  sol.t_grid.back() = horizon;
  sol.q = std::move(coarse.q);
  sol.richardson_gap = gap;

  const Field field(env);
  sol.m.resize(grid_size + 1);
  sol.hazard = Matrix(grid_size + 1, k_count);
  sol.cum_hazard = Matrix(grid_size + 1, k_count);
  for (std::size_t g = 0; g <= grid_size; ++g) {
    sol.m[g] = field.aggregate(sol.q.row(g));
    for (std::size_t k = 0; k < k_count; ++k) {
      sol.hazard(g, k) = std::exp(-env[k].gamma + env[k].beta * sol.m[g]);
      if (g > 0) {
        sol.cum_hazard(g, k) = sol.cum_hazard(g - 1, k) +
                               0.5 * sol.step * (sol.hazard(g - 1, k) + sol.hazard(g, k));
      }
    }
  }
  return sol;
}

std::vector<double> limit_loss(const LimitSolution& sol, const Environment& env) {
  if (sol.classes() != env.size()) {
    throw Error(ErrorCode::DimensionMismatch, "solution and environment differ in classes");
  }
  std::vector<double> loss(sol.t_grid.size(), 0.0);
  for (std::size_t g = 0; g < loss.size(); ++g) {
    for (std::size_t k = 0; k < env.size(); ++k) {
      loss[g] += env[k].weight * env[k].exposure * sol.q(g, k);
    }
  }
  return loss;
}

std::optional<double> invert_cumulative_hazard(const LimitSolution& sol, std::size_t k,
                                               double exp_draw) {
  if (k >= sol.classes()) throw Error(ErrorCode::InvalidArgument, "class index out of range");
  const std::size_t last = sol.intervals();
  if (!(exp_draw <= sol.cum_hazard(last, k))) return std::nullopt;

  // Smallest g with H(g) >= exp_draw; H(0) = 0 < exp_draw.
  std::size_t lo = 0, hi = last;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (sol.cum_hazard(mid, k) >= exp_draw) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double h_lo = sol.cum_hazard(lo, k);
  const double h_hi = sol.cum_hazard(hi, k);
  const double frac = h_hi > h_lo ? (exp_draw - h_lo) / (h_hi - h_lo) : 1.0;
  const double tau = sol.t_grid[lo] + std::clamp(frac, 0.0, 1.0) * (sol.t_grid[hi] - sol.t_grid[lo]);
  return std::max(tau, std::nextafter(0.0, 1.0));
}

std::optional<double> sample_limit_default_time(const LimitSolution& sol, std::size_t k,
                                                Rng& rng) {
  return invert_cumulative_hazard(sol, k, rng.exponential());
}

std::vector<double> off_support_default_probability(const LimitSolution& sol,
                                                    const Environment& env, double beta,
                                                    double gamma) {
  if (sol.classes() != env.size()) {
    throw Error(ErrorCode::DimensionMismatch, "solution and environment differ in classes");
  }
  const std::size_t grid = sol.t_grid.size();
  const double h = sol.step;

  // dm/dt = sum_k p_k alpha_k hazard_k (1 - q_k), exact along the solution.
  std::vector<double> slope(grid, 0.0);
  for (std::size_t g = 0; g < grid; ++g) {
    for (std::size_t k = 0; k < env.size(); ++k) {
      slope[g] += env[k].weight * env[k].alpha * sol.hazard(g, k) * (1.0 - sol.q(g, k));
    }
  }
  auto rate = [&](double m) { return std::exp(-gamma + beta * m); };

  std::vector<double> q(grid, 0.0);
  for (std::size_t g = 0; g + 1 < grid; ++g) {
    const double m0 = sol.m[g], m1 = sol.m[g + 1];
    const double mid = 0.5 * (m0 + m1) + h * (slope[g] - slope[g + 1]) / 8.0;
    const double r0 = rate(m0), rm = rate(mid), r1 = rate(m1);
    const double y = q[g];
    const double k1 = r0 * (1.0 - y);
    const double k2 = rm * (1.0 - (y + 0.5 * h * k1));
    const double k3 = rm * (1.0 - (y + 0.5 * h * k2));
    const double k4 = r1 * (1.0 - (y + h * k3));
    q[g + 1] = std::clamp(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0, 1.0);
  }
  return q;
}

}  // namespace contagion
