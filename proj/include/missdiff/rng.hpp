#pragma once

#include <cstdint>
#include <vector>

namespace missdiff {

// Counter-style generator built on the splitmix64 finalizer: next_u64()
// advances the state by the golden-ratio increment and returns mix(state).
// Same seed, same stream, on every platform.
//
// Sub-streams come from fork(tag): the child seed is
// mix(state ^ mix(tag ^ salt)). fork() does not advance the parent, so
// fork(a) and fork(b) are reproducible regardless of call order.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (cosine branch, two uniforms per draw).
  double normal();

  // Uniform integer in [0, n). n must be > 0.
  uint64_t next_below(uint64_t n);

  Rng fork(uint64_t tag) const {
    return Rng(mix(state_ ^ mix(tag ^ 0xD1B54A32D192ED03ull)));
  }

  static uint64_t mix(uint64_t z);

 private:
  uint64_t state_;
};

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace missdiff
