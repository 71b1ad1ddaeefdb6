#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "missdiff/autodiff.hpp"
#include "missdiff/encode.hpp"
#include "missdiff/missingness.hpp"
#include "missdiff/network.hpp"
#include "missdiff/rng.hpp"
#include "missdiff/schedule.hpp"
#include "missdiff/table.hpp"

namespace missdiff {

// How missing values enter training: mask the loss directly, or complete the
// data first and train with a full mask.
enum class TrainMode { missdiff, mean_impute, row_delete };

TrainMode train_mode_from_string(const std::string& name);
std::string train_mode_to_string(TrainMode mode);

struct TrainConfig {
  int T = 100;
  double beta_min = 1e-4;
  double beta_max = 0.5;
  int epochs = 250;
  int batch = 64;
  double base_lr = 5e-4;
  TrainMode mode = TrainMode::missdiff;
  uint64_t seed = 0;
  int channels = 64;
  int embed_dim = 128;
  int num_blocks = 4;
};

// Self-contained training artifact: everything sampling needs.
struct Checkpoint {
  TrainConfig config;
  Schema schema;
  NetworkParams params;
  std::vector<float> loss_trace;        // mean loss per epoch
  std::vector<double> column_missing_rates;
  double max_missing_rate = 0.0;

  NoiseSchedule schedule() const;
  // J / (1 - max_missing_rate) for the final epoch loss; infinity when a
  // column was never observed.
  double nll_bound_coefficient() const;
};

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps, one step per row.
Tensor forward_perturb(const Tensor& x0, const std::vector<int>& t, const Tensor& eps,
                       const NoiseSchedule& schedule);

// Mean over rows of || (eps - net(x_t, t)) * mask ||^2, differentiable in the
// network parameters. Entries with mask 0 contribute nothing to the value or
// to any gradient.
Value masked_dsm_loss(const GraphNetwork& net, const Tensor& x_t, const Tensor& mask,
                      const std::vector<int>& t, const Tensor& eps, int horizon);

// Thrown by row-delete preprocessing when every row has a hole.
struct NoCompleteRows : std::runtime_error {
  NoCompleteRows() : std::runtime_error("row_delete: no complete rows remain") {}
};

using EpochCallback = std::function<void(int epoch, double mean_loss, double lr)>;

// Core loop on an already-encoded matrix and expanded mask. Deterministic
// given config.seed.
struct CoreResult {
  NetworkParams params;
  std::vector<float> loss_trace;
};
CoreResult train_core(const Tensor& x0, const Tensor& mask, const TrainConfig& config,
                      const EpochCallback& on_epoch = nullptr);

// Table-level entry: preprocesses per config.mode, fits the encoder on
// observed cells, and trains. The raw mask must agree with the table's NA
// pattern.
Checkpoint train(const Table& observed, const MaskMatrix& mask, const TrainConfig& config,
                 const EpochCallback& on_epoch = nullptr);
// Same, with the mask inferred from the table's NA pattern.
Checkpoint train(const Table& observed, const TrainConfig& config,
                 const EpochCallback& on_epoch = nullptr);

// Reverse ancestral pass from x_T ~ N(0, I). The predictor returns the
// noise estimate for a batch at step t. The final step adds no noise.
using EpsPredictor = std::function<Tensor(const Tensor& x, int t)>;
Tensor sample_encoded(const EpsPredictor& predictor, const NoiseSchedule& schedule, int n,
                      int width, Rng& rng);

// Draws n complete rows from a trained model.
Table sample(const Checkpoint& checkpoint, int n, Rng& rng);

// Conditional completion: at every reverse step the encoded coordinates of
// observed cells are replaced by a fresh forward perturbation of the
// observed values; the final table keeps observed cells verbatim. Returns k
// independent completions.
std::vector<Table> impute(const Checkpoint& checkpoint, const Table& observed, int k,
                          Rng& rng);

// Exact score of the VP-perturbed marginal when the data is N(mean, var):
// -(x - sqrt(alpha_bar_t) * mean) / (alpha_bar_t * var + 1 - alpha_bar_t).
double analytic_gaussian_score(double mean, double var, const NoiseSchedule& schedule, int t,
                               double x);

// Noise-prediction view of the same score: -sqrt(1 - alpha_bar_t) * score.
double analytic_gaussian_eps(double mean, double var, const NoiseSchedule& schedule, int t,
                             double x);

}  // namespace missdiff
