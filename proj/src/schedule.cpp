#include "missdiff/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace missdiff {

NoiseSchedule build_vp_schedule(int T, double beta_min, double beta_max) {
  if (T < 2) throw std::invalid_argument("schedule: T must be >= 2");
  if (!(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0))
    throw std::invalid_argument("schedule: need 0 < beta_min < beta_max < 1");

  NoiseSchedule s;
  s.T = T;
  s.beta.resize(static_cast<size_t>(T));
  s.alpha.resize(static_cast<size_t>(T));
  s.alpha_bar.resize(static_cast<size_t>(T));

  const double lo = std::sqrt(beta_min);
  const double hi = std::sqrt(beta_max);
  for (int t = 1; t <= T; ++t) {
    const double wl = static_cast<double>(T - t) / (T - 1);
    const double wh = static_cast<double>(t - 1) / (T - 1);
    s.beta[static_cast<size_t>(t - 1)] = (wl * lo + wh * hi) * (wl * lo + wh * hi);
  }
  // Pin the endpoints so they are exact rather than sqrt-squared.
  s.beta.front() = beta_min;
  s.beta.back() = beta_max;

  double prod = 1.0;
  for (int t = 1; t <= T; ++t) {
    s.alpha[static_cast<size_t>(t - 1)] = 1.0 - s.beta[static_cast<size_t>(t - 1)];
    prod *= s.alpha[static_cast<size_t>(t - 1)];
    s.alpha_bar[static_cast<size_t>(t - 1)] = prod;
  }
  return s;
}

}  // namespace missdiff
