#include "missdiff/rng.hpp"

#include <cmath>

namespace missdiff {

uint64_t Rng::mix(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

double Rng::normal() {
  const double u1 = uniform();  // in [0,1), so 1-u1 in (0,1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

uint64_t Rng::next_below(uint64_t n) {
  // Debiased modulo: reject draws from the final partial block.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

}  // namespace missdiff
