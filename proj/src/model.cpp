#include "contagion/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "contagion/error.hpp"
#include "contagion/rng.hpp"

namespace contagion {

namespace {

// Stream reserved for portfolio sampling; Monte Carlo replicas use streams 0..M-1.
constexpr std::uint64_t kPortfolioStream = ~std::uint64_t{0};

void check_class(const FirmClass& c, std::size_t index) {
  auto fail = [index](ErrorCode code, const char* field) {
    std::ostringstream msg;
    msg << "class " << index << " field '" << field << "'";
    throw Error(code, msg.str());
  };
  const std::pair<const char*, double> fields[] = {{"alpha", c.alpha},
                                                   {"beta", c.beta},
                                                   {"gamma", c.gamma},
                                                   {"exposure", c.exposure},
                                                   {"weight", c.weight}};
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value)) fail(ErrorCode::NonFiniteParameter, name);
  }
  if (c.alpha < 0) fail(ErrorCode::NegativeParameter, "alpha");
  if (c.beta < 0) fail(ErrorCode::NegativeParameter, "beta");
  if (c.exposure < 0) fail(ErrorCode::NegativeParameter, "exposure");
  if (!(c.weight > 0)) fail(ErrorCode::NonPositiveWeight, "weight");
}

}  // namespace

double Environment::max_impact() const noexcept {
  double total = 0.0;
  for (const auto& c : classes_) total += c.weight * c.alpha;
  return total;
}

Environment validate_environment(std::vector<FirmClass> classes) {
  if (classes.empty()) throw Error(ErrorCode::EmptyEnvironment, "no classes given");
  for (std::size_t k = 0; k < classes.size(); ++k) check_class(classes[k], k);

  double sum = 0.0;
  for (const auto& c : classes) sum += c.weight;
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << sum;
    throw Error(ErrorCode::WeightsDoNotSumToOne, msg.str());
  }

  std::vector<FirmClass> merged;
  merged.reserve(classes.size());
  for (const auto& c : classes) {
    auto same = std::find_if(merged.begin(), merged.end(), [&](const FirmClass& m) {
      return m.alpha == c.alpha && m.beta == c.beta && m.gamma == c.gamma;
    });
    if (same == merged.end()) {
      merged.push_back(c);
      continue;
    }
    if (same->exposure != c.exposure) {
      throw Error(ErrorCode::ConflictingExposure,
                  "classes with identical (alpha, beta, gamma) carry different exposures");
    }
    same->weight += c.weight;
  }
  return Environment(std::move(merged));
}

ReciprocityCertificate check_reciprocity(const Environment& env, double tol) {
  if (!(tol >= 0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be nonnegative");
  const auto& classes = env.classes();
  auto first = std::find_if(classes.begin(), classes.end(),
                            [](const FirmClass& c) { return c.alpha > 0; });
  if (first == classes.end()) {
    throw Error(ErrorCode::AllAlphasZero, "reciprocity constant undefined");
  }
  const double b = first->beta / first->alpha;

  double residual = 0.0;
  for (const auto& c : classes) residual = std::max(residual, std::abs(c.beta - b * c.alpha));

  if (residual > tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "max |beta - b*alpha| = " << residual << " exceeds " << tol << " (b = " << b << ")";
    throw ReciprocityViolated(residual, msg.str());
  }
  return {b, residual};
}

Portfolio::Portfolio(Environment env, std::vector<std::size_t> class_of)
    : env_(std::move(env)), class_of_(std::move(class_of)), counts_(env_.size(), 0) {
  if (class_of_.empty()) throw Error(ErrorCode::InvalidArgument, "portfolio must hold a firm");
  for (auto k : class_of_) {
    if (k >= env_.size()) throw Error(ErrorCode::InvalidArgument, "class index out of range");
    ++counts_[k];
  }
}

std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& weights,
                                                  std::size_t n) {
  const std::size_t k = weights.size();
  std::vector<std::size_t> counts(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double quota = static_cast<double>(n) * weights[i];
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  // Rounding in n*w can push the floor sum past n by one in pathological inputs.
  while (assigned > n) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % k) {
    ++counts[order[i]];
    ++assigned;
  }
  return counts;
}

Portfolio build_portfolio(const Environment& env, std::size_t n, AssignmentMode mode,
                          std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "portfolio size must be positive");
  std::vector<std::size_t> class_of;
  class_of.reserve(n);

  if (mode == AssignmentMode::DeterministicProportions) {
    std::vector<double> weights;
    for (const auto& c : env.classes()) weights.push_back(c.weight);
    const auto counts = largest_remainder_counts(weights, n);
    for (std::size_t k = 0; k < counts.size(); ++k) class_of.insert(class_of.end(), counts[k], k);
  } else {
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& c : env.classes()) cumulative.push_back(acc += c.weight);
    Rng rng(seed, kPortfolioStream);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      class_of.push_back(std::min<std::size_t>(it - cumulative.begin(), env.size() - 1));
    }
  }
  return Portfolio(env, std::move(class_of));
}

}  // namespace contagion
