#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace contagion {

/// One support point of the environment law: a firm type together with its
/// default exposure and mixture probability.
struct FirmClass {
  double alpha = 0.0;     // impact weight in the aggregate variable
  double beta = 0.0;      // sensitivity to the aggregate variable
  double gamma = 0.0;     // robustness (log-rate offset)
  double exposure = 1.0;  // loss on default
  double weight = 1.0;    // mixture probability

  friend bool operator==(const FirmClass&, const FirmClass&) = default;
};

/// Validated finite mixture of firm classes. Construct through
/// validate_environment; instances are immutable.
class Environment {
 public:
  const std::vector<FirmClass>& classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return classes_.size(); }
  const FirmClass& operator[](std::size_t k) const noexcept { return classes_[k]; }

  /// Sum of weight * alpha: the largest value the aggregate variable can reach.
  double max_impact() const noexcept;

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  friend Environment validate_environment(std::vector<FirmClass> classes);
  explicit Environment(std::vector<FirmClass> classes) : classes_(std::move(classes)) {}

  std::vector<FirmClass> classes_;
};

inline constexpr double kWeightSumTolerance = 1e-12;

/// Checks finiteness, signs and normalization, then merges classes with equal
/// (alpha, beta, gamma) by summing their weights. First occurrence fixes the
/// position of a merged class.
Environment validate_environment(std::vector<FirmClass> classes);

struct ReciprocityCertificate {
  double b = 0.0;
  double max_residual = 0.0;
};

/// Verifies beta_k = b * alpha_k for a single b, taken from the first class
/// with alpha > 0. Throws ReciprocityViolated (carrying the residual) or
/// Error{AllAlphasZero}.
ReciprocityCertificate check_reciprocity(const Environment& env, double tol);

enum class AssignmentMode { DeterministicProportions, IidSample };

class Portfolio {
 public:
  Portfolio(Environment env, std::vector<std::size_t> class_of);

  std::size_t size() const noexcept { return class_of_.size(); }
  const Environment& environment() const noexcept { return env_; }
  const std::vector<std::size_t>& class_of() const noexcept { return class_of_; }
  std::size_t class_of(std::size_t firm) const noexcept { return class_of_[firm]; }
  const std::vector<std::size_t>& class_counts() const noexcept { return counts_; }

  friend bool operator==(const Portfolio&, const Portfolio&) = default;

 private:
  Environment env_;
  std::vector<std::size_t> class_of_;
  std::vector<std::size_t> counts_;
};

/// Largest-remainder apportionment of n seats to the given weights; ties in the
/// fractional part go to the lower index.
std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& weights,
                                                  std::size_t n);

/// Materializes n firms. DeterministicProportions lays out class blocks in
/// order with largest-remainder counts; IidSample draws each firm's class from
/// the weights on a dedicated stream of `seed`.
Portfolio build_portfolio(const Environment& env, std::size_t n, AssignmentMode mode,
                          std::uint64_t seed);

}  // namespace contagion
