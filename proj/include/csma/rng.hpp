#pragma once

#include <cmath>
#include <cstdint>

namespace csma {

// Counter-based stream: output i is a bijective 64-bit finalizer applied to
// key + i * gamma, with the key derived from (seed, sample index). Every
// sample owns an independent stream addressed purely by its index, so batch
// results cannot depend on how samples are divided among workers.
class CounterRng {
 public:
  [[nodiscard]] static CounterRng stream(std::uint64_t seed, std::uint64_t sample_index) {
    return CounterRng(finalize(finalize(seed ^ kSeedSalt) + sample_index * kGamma));
  }

  std::uint64_t next_u64() { return finalize(key_ + ++counter_ * kGamma); }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double next_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Exponential with the given rate.
  double next_exponential(double rate) { return -std::log(next_unit()) / rate; }

 private:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSeedSalt = 0xD1B54A32D192ED03ULL;

  [[nodiscard]] static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace csma
