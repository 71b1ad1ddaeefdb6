#pragma once

#include "missdiff/rng.hpp"
#include "missdiff/table.hpp"

namespace missdiff {

// Synthetic mixed-type table sampled from a small Bayesian network with two
// continuous columns (C1, C2) and three categorical ones (D1, D2, D3):
//
//   C1 ~ Normal(25, sd 2)
//   C2 | C1 ~ Normal(0.1*C1 + 50, sd 5)
//   D1 ~ Bernoulli(0.3)
//   D2 | C1, C2, D1: three-way categorical chosen by the (C1 > 26, C2 > 55)
//     quadrant when D1 = 1, and (0.05, 0.05, 0.9) when D1 = 0; boundary ties
//     take the <= branch
//   D3 | D2 ~ Bernoulli(0.2 / 0.4 / 0.8) for D2 = 0 / 1 / 2
//
// Categorical cells hold the labels "0", "1", "2". The returned schema is
// unfitted.
Table generate_bayesian_network(int n, Rng& rng);

}  // namespace missdiff
