#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "contagion/matrix.hpp"
#include "contagion/model.hpp"
#include "contagion/rng.hpp"

namespace contagion {

/// Large-portfolio limit on a uniform grid, one column per class.
struct LimitSolution {
  std::vector<double> t_grid;
  Matrix q;           // default probability q_k(t)
  std::vector<double> m;  // aggregate variable sum_k p_k alpha_k q_k(t)
  Matrix hazard;      // exp(-gamma_k + beta_k m(t))
  Matrix cum_hazard;  // trapezoidal integral of hazard from 0
  double step = 0.0;
  double richardson_gap = 0.0;  // max_k |q_k(T) on G steps - q_k(T) on 2G steps|

  std::size_t classes() const noexcept { return q.cols(); }
  std::size_t intervals() const noexcept { return t_grid.empty() ? 0 : t_grid.size() - 1; }
  double horizon() const noexcept { return t_grid.back(); }
};

inline constexpr std::size_t kDefaultGridSize = 4096;
inline constexpr double kDefaultOdeTolerance = 1e-8;

/// Integrates dq_k/dt = exp(-gamma_k + beta_k sum_j p_j alpha_j q_j) (1 - q_k),
/// q(0) = 0, with classic RK4 on `grid_size` steps. The run is repeated with
/// half the step and rejected (StepTooCoarse) if q(T) moves by more than
/// `tolerance`. Clamping into [0, 1] larger than `tolerance` is ClampExceeded.
LimitSolution solve_limit(const Environment& env, double horizon, std::size_t grid_size,
                          double tolerance);

/// Expected loss per firm l(t) = sum_k p_k e_k q_k(t) on the solution grid.
std::vector<double> limit_loss(const LimitSolution& sol, const Environment& env);

/// Default time of one class-k firm under the limit law, by inverting the
/// piecewise-linear cumulative hazard against an Exponential(1) draw.
/// nullopt means the firm survives past the horizon.
std::optional<double> sample_limit_default_time(const LimitSolution& sol, std::size_t k,
                                                Rng& rng);

/// Same inversion for a given Exponential(1) value.
std::optional<double> invert_cumulative_hazard(const LimitSolution& sol, std::size_t k,
                                               double exp_draw);

/// Default probability on the solution grid for a firm of type (beta, gamma)
/// that is not in the support: the aggregate variable is taken from `sol` and
/// the scalar linear equation dq/dt = exp(-gamma + beta m(t)) (1 - q) is
/// integrated by RK4, with m between grid points from a cubic Hermite fit.
std::vector<double> off_support_default_probability(const LimitSolution& sol,
                                                    const Environment& env, double beta,
                                                    double gamma);

}  // namespace contagion
