#include "carfi/common.hpp"

#include <bit>
#include <cstdlib>
#include <omp.h>

namespace carfi {

std::uint64_t hash_values(std::span<const double> values) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (double v : values) {
    // +0.0 and -0.0 must hash equally.
    const double canon = v == 0.0 ? 0.0 : v;
    h = mix64(h ^ std::bit_cast<std::uint64_t>(canon));
  }
  return h;
}

int max_threads() { return omp_get_max_threads(); }

void set_num_threads(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

void configure_threads_from_env() {
  if (const char* env = std::getenv("CARFI_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) set_num_threads(n);
  }
}

}  // namespace carfi
