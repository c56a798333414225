#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "contagion/limit.hpp"
#include "contagion/matrix.hpp"
#include "contagion/model.hpp"

namespace contagion {

/// Asymptotic variance of sqrt(N) (L^N(t)/N - l(t)) for the loss e_k * y(t),
/// split into its static and contagion parts.
struct VarianceReport {
  double horizon = 0.0;
  double l = 0.0;
  double static_var = 0.0;     // Var(e y(t)) under the limit law
  double contagion_var = 0.0;  // int_0^t A(s)^2 B(s) ds
  double total = 0.0;
  double b = 0.0;
};

/// Closed-form variance at grid time t:
///   A(s) = sum_k p_k alpha_k q_k(s) (e_k - l(t))
///   B(s) = sum_k p_k beta_k^2 (1 - q_k(s)) exp(-gamma_k + beta_k m(s))
/// with the time integral taken by the trapezoid rule on the solution grid.
/// Requires a reciprocity certificate for env; t must be a grid point.
VarianceReport variance_horizon(const LimitSolution& sol, const Environment& env, double t,
                                const std::optional<ReciprocityCertificate>& cert);

/// Gaussian approximation of P(L^N(t)/N >= x). Zero variance degenerates to
/// the indicator of x <= l.
double excess_prob(const VarianceReport& report, std::size_t n, double x);

/// Rows follow t_grid, columns follow thresholds.
Matrix excess_curve(const LimitSolution& sol, const Environment& env,
                    const std::optional<ReciprocityCertificate>& cert, std::size_t n,
                    std::span<const double> thresholds, std::span<const double> t_grid);

struct CovDiagEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of E[X^2] with
///   X = e_k y(t) - l(t) - int_0^t (1 - y(s)) b alpha_k A(s) dM(s),
/// where M is the compensated default martingale of a single firm drawn from
/// the limit law. Replica r uses Rng(seed, r); runs on the OpenMP pool.
CovDiagEstimate mc_validate_covdiag(const LimitSolution& sol, const Environment& env,
                                    const std::optional<ReciprocityCertificate>& cert,
                                    double t, std::size_t replicas, std::uint64_t seed);

/// Single-threaded reference for mc_validate_covdiag; bit-identical results.
CovDiagEstimate mc_validate_covdiag_serial(const LimitSolution& sol, const Environment& env,
                                           const std::optional<ReciprocityCertificate>& cert,
                                           double t, std::size_t replicas, std::uint64_t seed);

/// Upper tail of the standard normal, 1 - Phi(z).
double normal_upper_tail(double z);

}  // namespace contagion
