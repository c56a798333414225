#include "contagion/ctmc.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/error.hpp"
#include "contagion/parallel.hpp"

namespace contagion {

std::vector<double> intensities(const Portfolio& portfolio, const std::vector<bool>& defaulted) {
  const std::size_t n = portfolio.size();
  if (defaulted.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "defaulted flags must match portfolio size");
  }
  const auto& env = portfolio.environment();
  double impact = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (defaulted[i]) impact += env[portfolio.class_of(i)].alpha;
  }
  const double m = impact / static_cast<double>(n);

  std::vector<double> rates(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (defaulted[i]) continue;
    const auto& c = env[portfolio.class_of(i)];
    rates[i] = std::exp(c.beta * m - c.gamma);
  }
  return rates;
}

EventLog simulate_path(const Portfolio& portfolio, double horizon, Rng& rng) {
  if (!(horizon > 0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive and finite");
  }
  const auto& env = portfolio.environment();
  const std::size_t n = portfolio.size();
  const std::size_t k_count = env.size();

  std::vector<std::vector<std::size_t>> survivors(k_count);
  for (std::size_t k = 0; k < k_count; ++k) survivors[k].reserve(portfolio.class_counts()[k]);
  for (std::size_t i = 0; i < n; ++i) survivors[portfolio.class_of(i)].push_back(i);
  std::vector<std::size_t> defaulted(k_count, 0);
  std::vector<double> class_rate(k_count);

  EventLog log{{}, horizon, n};
  double t = 0.0;
  while (true) {
    double impact = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      impact += env[k].alpha * static_cast<double>(defaulted[k]);
    }
    const double m = impact / static_cast<double>(n);

    double total = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      class_rate[k] = survivors[k].empty()
                          ? 0.0
                          : static_cast<double>(survivors[k].size()) *
                                std::exp(env[k].beta * m - env[k].gamma);
      total += class_rate[k];
    }
    if (!(total > 0)) break;

    const double dt = rng.exponential() / total;
    if (t + dt > horizon) break;
    t = std::max(t + dt, std::nextafter(t, horizon + 1.0));
    if (t > horizon) break;

    const double pick = rng.uniform() * total;
    std::size_t k = 0;
    double acc = class_rate[0];
    while ((pick >= acc || survivors[k].empty()) && k + 1 < k_count) acc += class_rate[++k];
    // Round-off can land past the last nonempty class; walk back to one.
    while (survivors[k].empty()) --k;

    auto& pool = survivors[k];
    const auto slot = static_cast<std::size_t>(rng.below(pool.size()));
    const std::size_t firm = pool[slot];
    pool[slot] = pool.back();
    pool.pop_back();
    ++defaulted[k];
    log.events.push_back({t, firm});
  }
  return log;
}

PathGrid loss_process(const EventLog& log, const Portfolio& portfolio,
                      std::span<const double> t_grid) {
  if (log.firms != portfolio.size()) {
    throw Error(ErrorCode::DimensionMismatch, "event log was produced for another portfolio");
  }
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    if (!(t_grid[g] >= 0.0) || t_grid[g] > log.horizon || (g > 0 && t_grid[g] < t_grid[g - 1])) {
      throw Error(ErrorCode::GridOutOfRange, "grid must be sorted and lie within [0, horizon]");
    }
  }
  const auto& env = portfolio.environment();
  const std::size_t k_count = env.size();
  const double n = static_cast<double>(portfolio.size());

  PathGrid out{{t_grid.begin(), t_grid.end()}, Matrix(t_grid.size(), k_count),
               std::vector<double>(t_grid.size(), 0.0)};
  std::vector<std::size_t> counts(k_count, 0);
  double loss = 0.0;
  std::size_t next = 0;
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    while (next < log.events.size() && log.events[next].time <= t_grid[g]) {
      const std::size_t k = portfolio.class_of(log.events[next].firm);
      ++counts[k];
      loss += env[k].exposure;
      ++next;
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      const std::size_t size = portfolio.class_counts()[k];
      out.class_fraction(g, k) =
          size == 0 ? 0.0 : static_cast<double>(counts[k]) / static_cast<double>(size);
    }
    out.loss_fraction[g] = loss / n;
  }
  return out;
}

std::vector<double> uniform_grid(double horizon, std::size_t intervals) {
  if (intervals == 0) throw Error(ErrorCode::InvalidArgument, "grid needs an interval");
  std::vector<double> grid(intervals + 1);
  const double step = horizon / static_cast<double>(intervals);
  for (std::size_t g = 0; g <= intervals; ++g) grid[g] = static_cast<double>(g) * step;
  grid.back() = horizon;
  return grid;
}

EnsembleAccumulator::EnsembleAccumulator(std::vector<double> t_grid, std::size_t classes,
                                         std::size_t firms, std::vector<double> thresholds)
    : t_grid_(std::move(t_grid)),
      thresholds_(std::move(thresholds)),
      firms_(firms),
      mean_(t_grid_.size(), 0.0),
      m2_(t_grid_.size(), 0.0),
      class_sum_(t_grid_.size(), classes),
      exceed_(t_grid_.size() * thresholds_.size(), 0) {}

void EnsembleAccumulator::add(const PathGrid& path) {
  if (path.loss_fraction.size() != t_grid_.size() ||
      path.class_fraction.cols() != class_sum_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "path grid does not match accumulator");
  }
  ++count_;
  const double m = static_cast<double>(count_);
  for (std::size_t g = 0; g < t_grid_.size(); ++g) {
    const double x = path.loss_fraction[g];
    const double delta = x - mean_[g];
    mean_[g] += delta / m;
    m2_[g] += delta * (x - mean_[g]);
    for (std::size_t k = 0; k < class_sum_.cols(); ++k) class_sum_(g, k) += path.class_fraction(g, k);
    for (std::size_t j = 0; j < thresholds_.size(); ++j) {
      if (x >= thresholds_[j]) ++exceed_[g * thresholds_.size() + j];
    }
  }
}

EnsembleStats EnsembleAccumulator::finish(std::uint64_t seed) const {
  const std::size_t grid = t_grid_.size();
  EnsembleStats s;
  s.t_grid = t_grid_;
  s.thresholds = thresholds_;
  s.replicas = count_;
  s.seed = seed;
  s.mean_loss_fraction = mean_;
  s.var_scaled_loss.assign(grid, 0.0);
  s.mean_class_fractions = Matrix(grid, class_sum_.cols());
  s.excess_prob_empirical = Matrix(grid, thresholds_.size());
  if (count_ == 0) return s;
  const double m = static_cast<double>(count_);
  for (std::size_t g = 0; g < grid; ++g) {
    if (count_ > 1) {
      s.var_scaled_loss[g] = static_cast<double>(firms_) * std::max(0.0, m2_[g] / (m - 1.0));
    }
    for (std::size_t k = 0; k < class_sum_.cols(); ++k) {
      s.mean_class_fractions(g, k) = class_sum_(g, k) / m;
    }
    for (std::size_t j = 0; j < thresholds_.size(); ++j) {
      s.excess_prob_empirical(g, j) =
          static_cast<double>(exceed_[g * thresholds_.size() + j]) / m;
    }
  }
  return s;
}

namespace {

template <class Driver>
EnsembleStats run_ensemble(const Portfolio& portfolio, double horizon,
                           std::span<const double> t_grid, std::size_t replicas,
                           std::span<const double> thresholds, std::uint64_t seed,
                           Driver&& driver) {
  if (replicas == 0) throw Error(ErrorCode::InvalidArgument, "need at least one replica");
  EnsembleAccumulator acc({t_grid.begin(), t_grid.end()}, portfolio.environment().size(),
                          portfolio.size(), {thresholds.begin(), thresholds.end()});
  // Validates the grid once up front so workers never throw.
  (void)loss_process(EventLog{{}, horizon, portfolio.size()}, portfolio, t_grid);
  driver(
      replicas,
      [&](std::size_t r) {
        Rng rng(seed, r);
        return loss_process(simulate_path(portfolio, horizon, rng), portfolio, t_grid);
      },
      [&](const PathGrid& path) { acc.add(path); });
  return acc.finish(seed);
}

}  // namespace

EnsembleStats monte_carlo_serial(const Portfolio& portfolio, double horizon,
                                 std::span<const double> t_grid, std::size_t replicas,
                                 std::span<const double> thresholds, std::uint64_t seed) {
  return run_ensemble(portfolio, horizon, t_grid, replicas, thresholds, seed,
                      [](std::size_t count, auto&& make, auto&& consume) {
                        for_each_replica_serial(count, make, consume);
                      });
}

EnsembleStats monte_carlo(const Portfolio& portfolio, double horizon,
                          std::span<const double> t_grid, std::size_t replicas,
                          std::span<const double> thresholds, std::uint64_t seed) {
  return run_ensemble(portfolio, horizon, t_grid, replicas, thresholds, seed,
                      [](std::size_t count, auto&& make, auto&& consume) {
                        for_each_replica_parallel(count, make, consume);
                      });
}

}  // namespace contagion
