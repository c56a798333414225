#pragma once

// Test-only oracle: exact forward (master) equation of the two-class chain.
// State (i, j) = defaults in each class; P is integrated by fixed-step RK4.
// Returns E[fraction defaulted] per class at every grid point.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "contagion/model.hpp"

namespace contagion::testing {

inline std::vector<std::array<double, 2>> master_equation_means(const Environment& env,
                                                                std::size_t n1, std::size_t n2,
                                                                double horizon,
                                                                std::size_t intervals) {
  const double n = static_cast<double>(n1 + n2);
  const std::size_t width = n2 + 1, states = (n1 + 1) * width;
  std::vector<double> r1(states), r2(states);
  for (std::size_t i = 0; i <= n1; ++i) {
    for (std::size_t j = 0; j <= n2; ++j) {
      const double m = (env[0].alpha * i + env[1].alpha * j) / n;
      r1[i * width + j] = (n1 - i) * std::exp(env[0].beta * m - env[0].gamma);
      r2[i * width + j] = (n2 - j) * std::exp(env[1].beta * m - env[1].gamma);
    }
  }
  auto rhs = [&](const std::vector<double>& p, std::vector<double>& dp) {
    for (std::size_t s = 0; s < states; ++s) dp[s] = -(r1[s] + r2[s]) * p[s];
    for (std::size_t i = 0; i <= n1; ++i) {
      for (std::size_t j = 0; j <= n2; ++j) {
        const std::size_t s = i * width + j;
        if (i > 0) dp[s] += r1[s - width] * p[s - width];
        if (j > 0) dp[s] += r2[s - 1] * p[s - 1];
      }
    }
  };
  auto means = [&](const std::vector<double>& p) {
    std::array<double, 2> e{0, 0};
    for (std::size_t i = 0; i <= n1; ++i) {
      for (std::size_t j = 0; j <= n2; ++j) {
        e[0] += i * p[i * width + j];
        e[1] += j * p[i * width + j];
      }
    }
    return std::array<double, 2>{e[0] / n1, e[1] / n2};
  };

  const double h = horizon / static_cast<double>(intervals);
  std::vector<double> p(states, 0.0), k1(states), k2(states), k3(states), k4(states), tmp(states);
  p[0] = 1.0;
  std::vector<std::array<double, 2>> out{means(p)};
  for (std::size_t step = 0; step < intervals; ++step) {
    rhs(p, k1);
    for (std::size_t s = 0; s < states; ++s) tmp[s] = p[s] + 0.5 * h * k1[s];
    rhs(tmp, k2);
    for (std::size_t s = 0; s < states; ++s) tmp[s] = p[s] + 0.5 * h * k2[s];
    rhs(tmp, k3);
    for (std::size_t s = 0; s < states; ++s) tmp[s] = p[s] + h * k3[s];
    rhs(tmp, k4);
    for (std::size_t s = 0; s < states; ++s) {
      p[s] += h / 6.0 * (k1[s] + 2 * k2[s] + 2 * k3[s] + k4[s]);
    }
    out.push_back(means(p));
  }
  return out;
}

}  // namespace contagion::testing
