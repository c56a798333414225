#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace contagion {

/// Worker cap for the OpenMP kernels. Does not affect results.
void set_worker_count(int workers);
int worker_count();

/// Reads CONTAGION_THREADS; nullopt when unset. Throws Error{InvalidArgument}
/// when set to anything but a positive integer.
std::optional<int> worker_count_from_env();

inline constexpr std::size_t kReplicaBlock = 256;

/// Runs make(r) for r in [0, count) and feeds the results to consume in
/// increasing r. Replicas inside a block run concurrently; consumption is
/// serial, so any order-sensitive reduction in consume is reproducible.
template <class Make, class Consume>
void for_each_replica_parallel(std::size_t count, Make&& make, Consume&& consume) {
  using Result = decltype(make(std::size_t{0}));
  std::vector<Result> block;
  for (std::size_t start = 0; start < count; start += kReplicaBlock) {
    const std::size_t n = std::min(kReplicaBlock, count - start);
    block.assign(n, Result{});
    const auto n_signed = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n_signed; ++i) {
      block[static_cast<std::size_t>(i)] = make(start + static_cast<std::size_t>(i));
    }
    for (auto& result : block) consume(result);
  }
}

template <class Make, class Consume>
void for_each_replica_serial(std::size_t count, Make&& make, Consume&& consume) {
  for (std::size_t r = 0; r < count; ++r) {
    auto result = make(r);
    consume(result);
  }
}

}  // namespace contagion
