#include "missdiff/bayes_net.hpp"

#include <array>
#include <stdexcept>

namespace missdiff {

namespace {

int draw_categorical3(double p0, double p1, Rng& rng) {
  const double u = rng.uniform();
  if (u < p0) return 0;
  if (u < p0 + p1) return 1;
  return 2;
}

}  // namespace

Table generate_bayesian_network(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("generate_bayesian_network: n must be >= 1");

  Table table;
  table.schema.columns = {
      {"C1", ColumnKind::continuous, false, 0, 0, {}},
      {"C2", ColumnKind::continuous, false, 0, 0, {}},
      {"D1", ColumnKind::categorical, false, 0, 0, {}},
      {"D2", ColumnKind::categorical, false, 0, 0, {}},
      {"D3", ColumnKind::categorical, false, 0, 0, {}},
  };
  table.rows.reserve(static_cast<size_t>(n));

  for (int i = 0; i < n; ++i) {
    const double c1 = 25.0 + 2.0 * rng.normal();
    const double c2 = 0.1 * c1 + 50.0 + 5.0 * rng.normal();
    const int d1 = rng.uniform() < 0.3 ? 1 : 0;

    int d2;
    if (d1 == 0) {
      d2 = draw_categorical3(0.05, 0.05, rng);
    } else if (c1 > 26.0 && c2 > 55.0) {
      d2 = draw_categorical3(0.3, 0.6, rng);
    } else if (c1 > 26.0) {
      d2 = draw_categorical3(0.2, 0.3, rng);
    } else if (c2 > 55.0) {
      d2 = draw_categorical3(0.7, 0.1, rng);
    } else {
      d2 = draw_categorical3(0.1, 0.2, rng);
    }

    const std::array<double, 3> d3_prob = {0.2, 0.4, 0.8};
    const int d3 = rng.uniform() < d3_prob[static_cast<size_t>(d2)] ? 1 : 0;

    table.rows.push_back({Cell::number(c1), Cell::number(c2),
                          Cell::category(std::to_string(d1)),
                          Cell::category(std::to_string(d2)),
                          Cell::category(std::to_string(d3))});
  }
  return table;
}

}  // namespace missdiff
