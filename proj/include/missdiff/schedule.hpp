#pragma once

#include <vector>

namespace missdiff {

// Discrete variance-preserving noise schedule over steps t = 1..T.
// Arrays are 0-indexed: beta[t-1] belongs to step t.
struct NoiseSchedule {
  int T = 0;
  std::vector<double> beta;
  std::vector<double> alpha;      // 1 - beta
  std::vector<double> alpha_bar;  // running product of alpha

  double beta_at(int t) const { return beta[static_cast<size_t>(t - 1)]; }
  double alpha_at(int t) const { return alpha[static_cast<size_t>(t - 1)]; }
  double alpha_bar_at(int t) const { return alpha_bar[static_cast<size_t>(t - 1)]; }
};

// Quadratic schedule between sqrt(beta_min) and sqrt(beta_max):
//   beta_t = ((T-t)/(T-1) * sqrt(beta_min) + (t-1)/(T-1) * sqrt(beta_max))^2
// The endpoints are pinned to beta_min and beta_max exactly.
NoiseSchedule build_vp_schedule(int T, double beta_min, double beta_max);

}  // namespace missdiff
