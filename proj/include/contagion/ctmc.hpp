#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "contagion/matrix.hpp"
#include "contagion/model.hpp"
#include "contagion/rng.hpp"

namespace contagion {

struct DefaultEvent {
  double time = 0.0;
  std::size_t firm = 0;

  friend bool operator==(const DefaultEvent&, const DefaultEvent&) = default;
};

/// Default events of one finite-N path, in increasing time order.
struct EventLog {
  std::vector<DefaultEvent> events;
  double horizon = 0.0;
  std::size_t firms = 0;  // size of the simulated portfolio

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Default intensity of every firm: zero once defaulted, otherwise
/// exp(beta * m - gamma) with m the impact-weighted defaulted fraction.
std::vector<double> intensities(const Portfolio& portfolio, const std::vector<bool>& defaulted);

/// Exact (Gillespie) simulation from the all-alive state up to `horizon`.
///
/// Rates depend on a firm only through its class, so the sampler keeps one
/// survivor list per class: draw the waiting time from the total rate, pick the
/// class proportionally to its aggregate rate, then a survivor uniformly.
EventLog simulate_path(const Portfolio& portfolio, double horizon, Rng& rng);

/// Path statistics sampled on a time grid. Values at t include defaults at t.
struct PathGrid {
  std::vector<double> t_grid;
  Matrix class_fraction;  // (grid x K), defaults in class k over class size
  std::vector<double> loss_fraction;
};

PathGrid loss_process(const EventLog& log, const Portfolio& portfolio,
                      std::span<const double> t_grid);

/// 0 = t_0 < ... < t_intervals = horizon.
std::vector<double> uniform_grid(double horizon, std::size_t intervals);

struct EnsembleStats {
  std::vector<double> t_grid;
  std::vector<double> mean_loss_fraction;
  std::vector<double> var_scaled_loss;  // N * sample variance of L/N
  Matrix mean_class_fractions;          // (grid x K)
  std::vector<double> thresholds;
  Matrix excess_prob_empirical;  // (grid x thresholds), fraction with L/N >= x
  std::size_t replicas = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

/// Order-sensitive single-pass reduction of PathGrids (Welford per grid point).
/// Feeding the same paths in the same order gives bit-identical stats.
class EnsembleAccumulator {
 public:
  EnsembleAccumulator(std::vector<double> t_grid, std::size_t classes, std::size_t firms,
                      std::vector<double> thresholds);

  void add(const PathGrid& path);
  std::size_t count() const noexcept { return count_; }

  /// Sample variance uses M-1; a single replica reports zero variance.
  EnsembleStats finish(std::uint64_t seed) const;

 private:
  std::vector<double> t_grid_;
  std::vector<double> thresholds_;
  std::size_t firms_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
  Matrix class_sum_;
  std::vector<std::uint64_t> exceed_;  // (grid x thresholds)
};

/// M independent paths, replica r driven by Rng(seed, r). Runs replicas on the
/// OpenMP pool; the result does not depend on the number of workers.
EnsembleStats monte_carlo(const Portfolio& portfolio, double horizon,
                          std::span<const double> t_grid, std::size_t replicas,
                          std::span<const double> thresholds, std::uint64_t seed);

/// Single-threaded reference for monte_carlo; results are bit-identical.
EnsembleStats monte_carlo_serial(const Portfolio& portfolio, double horizon,
                                 std::span<const double> t_grid, std::size_t replicas,
                                 std::span<const double> thresholds, std::uint64_t seed);

}  // namespace contagion
