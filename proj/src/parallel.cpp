#include "contagion/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "contagion/error.hpp"

namespace contagion {

void set_worker_count(int workers) {
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "worker count must be positive");
  omp_set_num_threads(workers);
}

int worker_count() { return omp_get_max_threads(); }

std::optional<int> worker_count_from_env() {
  const char* raw = std::getenv("CONTAGION_THREADS");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || value < 1 || value > 4096) {
    throw Error(ErrorCode::InvalidArgument, "CONTAGION_THREADS must be a positive integer");
  }
  return static_cast<int>(value);
}

}  // namespace contagion
