#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace carfi {

// User-facing input problems (bad files, unknown columns, invalid queries).
// The CLI maps these to exit code 2; anything else is an internal failure.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// splitmix64 generator. Seeding is free, so every (instance, replicate)
// pair can own an independent stream.
class Rng {
 public:
  using result_type = std::uint64_t;
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    const auto out = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t derive_seed(std::uint64_t seed) { return mix64(seed); }

// Order-sensitive combination of a master seed with stream identifiers, so
// that (seed, a, b) and (seed, b, a) give unrelated streams.
template <typename... Ids>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id, Ids... rest) {
  return derive_seed(mix64(seed ^ mix64(id + 0x632be59bd9b4e019ULL)), static_cast<std::uint64_t>(rest)...);
}

// Hash of the bit patterns of a row, used to key per-instance random streams
// by content instead of position.
std::uint64_t hash_values(std::span<const double> values);

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

int max_threads();
void set_num_threads(int n);

// Reads CARFI_NUM_THREADS (falls back to the OpenMP default when unset).
void configure_threads_from_env();

}  // namespace carfi
