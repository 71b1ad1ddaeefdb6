#include "missdiff/diffusion.hpp"

#include "missdiff/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace missdiff {

namespace {

constexpr uint64_t kInitStream = 0x496E6974;    // parameter init
constexpr uint64_t kTrainStream = 0x547261696E; // epoch loop

// Column mean over observed continuous cells. The encoder fit guarantees at
// least one observed cell per continuous column.
double observed_mean(const Table& table, int j) {
  double acc = 0.0;
  int count = 0;
  for (int i = 0; i < table.n_rows(); ++i) {
    const Cell& c = table.at(i, j);
    if (c.is_na()) continue;
    acc += c.num;
    ++count;
  }
  return acc / count;
}

// Most frequent observed category; ties go to first appearance.
std::string observed_mode(const Table& table, int j) {
  std::unordered_map<std::string, int> counts;
  std::vector<std::string> order;
  for (int i = 0; i < table.n_rows(); ++i) {
    const Cell& c = table.at(i, j);
    if (c.is_na()) continue;
    if (counts.emplace(c.cat, 0).second) order.push_back(c.cat);
    counts[c.cat] += 1;
  }
  if (order.empty())
    throw std::invalid_argument("mean_impute: categorical column '" +
                                table.schema.columns[static_cast<size_t>(j)].name +
                                "' has no observed cells");
  std::string best = order.front();
  for (const std::string& cat : order)
    if (counts[cat] > counts[best]) best = cat;
  return best;
}

MaskMatrix mask_from_na_pattern(const Table& table) {
  MaskMatrix mask = MaskMatrix::ones(table.n_rows(), table.n_cols());
  for (int i = 0; i < table.n_rows(); ++i)
    for (int j = 0; j < table.n_cols(); ++j)
      if (table.at(i, j).is_na()) mask.set(i, j, 0);
  return mask;
}

Tensor select_rows(const Tensor& x, const std::vector<int>& rows) {
  const int64_t width = x.shape[1];
  Tensor out = Tensor::zeros({static_cast<int64_t>(rows.size()), width});
  for (size_t r = 0; r < rows.size(); ++r)
    std::copy_n(x.data.begin() + static_cast<int64_t>(rows[r]) * width, width,
                out.data.begin() + static_cast<int64_t>(r) * width);
  return out;
}

}  // namespace

TrainMode train_mode_from_string(const std::string& name) {
  if (name == "missdiff") return TrainMode::missdiff;
  if (name == "mean_impute") return TrainMode::mean_impute;
  if (name == "row_delete") return TrainMode::row_delete;
  throw std::invalid_argument("unknown train mode '" + name + "'");
}

std::string train_mode_to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::missdiff: return "missdiff";
    case TrainMode::mean_impute: return "mean_impute";
    case TrainMode::row_delete: return "row_delete";
  }
  throw std::logic_error("unreachable");
}

NoiseSchedule Checkpoint::schedule() const {
  return build_vp_schedule(config.T, config.beta_min, config.beta_max);
}

double Checkpoint::nll_bound_coefficient() const {
  if (loss_trace.empty()) return 0.0;
  if (max_missing_rate >= 1.0) return std::numeric_limits<double>::infinity();
  return loss_trace.back() / (1.0 - max_missing_rate);
}

Tensor forward_perturb(const Tensor& x0, const std::vector<int>& t, const Tensor& eps,
                       const NoiseSchedule& schedule) {
  if (!x0.same_shape(eps)) throw std::invalid_argument("forward_perturb: shape mismatch");
  if (x0.shape.size() != 2 || static_cast<int64_t>(t.size()) != x0.shape[0])
    throw std::invalid_argument("forward_perturb: one step per row required");
  Tensor out = x0;
  const int64_t width = x0.shape[1];
  for (int64_t i = 0; i < x0.shape[0]; ++i) {
    const int step = t[static_cast<size_t>(i)];
    if (step < 1 || step > schedule.T)
      throw std::out_of_range("forward_perturb: step outside [1, T]");
    const double drift = std::sqrt(schedule.alpha_bar_at(step));
    const double spread = std::sqrt(1.0 - schedule.alpha_bar_at(step));
    for (int64_t j = 0; j < width; ++j) {
      const size_t idx = static_cast<size_t>(i * width + j);
      out.data[idx] = static_cast<float>(drift * x0.data[idx] + spread * eps.data[idx]);
    }
  }
  return out;
}

Value masked_dsm_loss(const GraphNetwork& net, const Tensor& x_t, const Tensor& mask,
                      const std::vector<int>& t, const Tensor& eps, int horizon) {
  if (!x_t.same_shape(mask) || !x_t.same_shape(eps))
    throw std::invalid_argument("masked_dsm_loss: shape mismatch");
  for (float v : mask.data)
    if (v != 0.0f && v != 1.0f)
      throw std::invalid_argument("masked_dsm_loss: mask entries must be 0 or 1");
  const Tensor emb = time_embed_batch(t, horizon, net.config().embed_dim);
  const Value out = net.forward(constant(x_t), constant(emb));
  const Value residual = mul(sub(constant(eps), out), constant(mask));
  // Mean over rows of the per-row squared norm.
  return scale(sum_all(square(residual)), 1.0 / static_cast<double>(x_t.shape[0]));
}

CoreResult train_core(const Tensor& x0, const Tensor& mask, const TrainConfig& config,
                      const EpochCallback& on_epoch) {
  if (!x0.same_shape(mask)) throw std::invalid_argument("train_core: shape mismatch");
  if (x0.shape.size() != 2 || x0.shape[0] == 0)
    throw std::invalid_argument("train_core: nonempty 2-D data required");
  if (config.batch < 1 || config.epochs < 1)
    throw std::invalid_argument("train_core: batch and epochs must be positive");

  const int n = static_cast<int>(x0.shape[0]);
  const NoiseSchedule schedule = build_vp_schedule(config.T, config.beta_min, config.beta_max);

  NetworkConfig net_config;
  net_config.input_dim = static_cast<int>(x0.shape[1]);
  net_config.channels = config.channels;
  net_config.embed_dim = config.embed_dim;
  net_config.num_blocks = config.num_blocks;

  Rng root(config.seed);
  Rng init_rng = root.fork(kInitStream);
  Rng train_rng = root.fork(kTrainStream);

  NetworkParams params = init_params(net_config, init_rng);
  std::vector<Tensor*> tensors = params.tensors();
  AdamState adam = AdamState::init(tensors);
  LrSchedule lr_schedule{config.base_lr, config.epochs, 0.1};

  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<float> trace;
  trace.reserve(static_cast<size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = lr_at(lr_schedule, epoch);
    shuffle(perm, train_rng);
    double epoch_loss = 0.0;

    for (int start = 0; start < n; start += config.batch) {
      const int count = std::min(config.batch, n - start);
      std::vector<int> rows(perm.begin() + start, perm.begin() + start + count);
      const Tensor xb = select_rows(x0, rows);
      const Tensor mb = select_rows(mask, rows);

      std::vector<int> t(static_cast<size_t>(count));
      for (int& step : t)
        step = 1 + static_cast<int>(train_rng.next_below(static_cast<uint64_t>(config.T)));
      const Tensor eps = normal_tensor({count, xb.shape[1]}, train_rng);
      const Tensor xt = forward_perturb(xb, t, eps, schedule);

      GraphNetwork net(params);
      const Value loss = masked_dsm_loss(net, xt, mb, t, eps, config.T);
      const std::vector<Tensor> grads = backward(loss, net.leaves());
      adam_step(tensors, grads, adam, lr);

      epoch_loss += static_cast<double>(loss->out.data[0]) * count;
    }

    epoch_loss /= n;
    trace.push_back(static_cast<float>(epoch_loss));
    if (on_epoch) on_epoch(epoch, epoch_loss, lr);
  }

  return CoreResult{std::move(params), std::move(trace)};
}

Checkpoint train(const Table& observed, const MaskMatrix& mask, const TrainConfig& config,
                 const EpochCallback& on_epoch) {
  if (mask.n != observed.n_rows() || mask.d != observed.n_cols())
    throw std::invalid_argument("train: table/mask shape mismatch");
  for (int i = 0; i < mask.n; ++i)
    for (int j = 0; j < mask.d; ++j)
      if ((mask.at(i, j) == 0) != observed.at(i, j).is_na())
        throw std::invalid_argument("train: mask disagrees with the table's NA pattern");

  const MissingRateStats rates = missing_rate_stats(mask);

  Table training = observed;
  if (config.mode == TrainMode::row_delete) {
    Table complete;
    complete.schema = observed.schema;
    for (int i = 0; i < observed.n_rows(); ++i) {
      bool whole = true;
      for (int j = 0; j < observed.n_cols(); ++j)
        if (observed.at(i, j).is_na()) whole = false;
      if (whole) complete.rows.push_back(observed.rows[static_cast<size_t>(i)]);
    }
    if (complete.n_rows() == 0) throw NoCompleteRows();
    training = std::move(complete);
  }

  Schema fitted = fit_encoder(training, training.schema);

  if (config.mode == TrainMode::mean_impute) {
    for (int j = 0; j < training.n_cols(); ++j) {
      const bool continuous =
          fitted.columns[static_cast<size_t>(j)].kind == ColumnKind::continuous;
      Cell fill = continuous ? Cell::number(observed_mean(training, j))
                             : Cell::category(observed_mode(training, j));
      for (int i = 0; i < training.n_rows(); ++i)
        if (training.at(i, j).is_na()) training.at(i, j) = fill;
    }
  }

  const Encoded encoded = encode(training, fitted);
  const Tensor loss_mask = config.mode == TrainMode::missdiff
                               ? encoded.mask
                               : Tensor::full(encoded.mask.shape, 1.0f);
  CoreResult core = train_core(encoded.batch.matrix, loss_mask, config, on_epoch);

  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.schema = std::move(fitted);
  ckpt.params = std::move(core.params);
  ckpt.loss_trace = std::move(core.loss_trace);
  ckpt.column_missing_rates = rates.per_column;
  ckpt.max_missing_rate = rates.max_rate;
  return ckpt;
}

Checkpoint train(const Table& observed, const TrainConfig& config,
                 const EpochCallback& on_epoch) {
  return train(observed, mask_from_na_pattern(observed), config, on_epoch);
}

Tensor sample_encoded(const EpsPredictor& predictor, const NoiseSchedule& schedule, int n,
                      int width, Rng& rng) {
  Tensor x = normal_tensor({n, width}, rng);
  for (int t = schedule.T; t >= 1; --t) {
    const Tensor eps_hat = predictor(x, t);
    if (!eps_hat.same_shape(x))
      throw std::invalid_argument("sample: predictor output shape mismatch");
    const double a = schedule.alpha_at(t);
    const double ab = schedule.alpha_bar_at(t);
    const double inv_sqrt_a = 1.0 / std::sqrt(a);
    const double coef = (1.0 - a) / std::sqrt(1.0 - ab);
    const double sigma = std::sqrt(schedule.beta_at(t));
    // Noise is suppressed on the final step.
    const Tensor noise = t > 1 ? normal_tensor({n, width}, rng) : Tensor::zeros({n, width});
    for (size_t i = 0; i < x.data.size(); ++i)
      x.data[i] = static_cast<float>(
          inv_sqrt_a * (x.data[i] - coef * eps_hat.data[i]) + sigma * noise.data[i]);
    check_finite(x, "sample_encoded");
  }
  return x;
}

Table sample(const Checkpoint& checkpoint, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const NoiseSchedule schedule = checkpoint.schedule();
  const EpsPredictor predictor = [&](const Tensor& x, int t) {
    return forward(checkpoint.params, x,
                   std::vector<int>(static_cast<size_t>(x.shape[0]), t), schedule.T);
  };
  const Tensor x0 =
      sample_encoded(predictor, schedule, n, checkpoint.schema.encoded_width(), rng);
  return decode(x0, checkpoint.schema);
}

std::vector<Table> impute(const Checkpoint& checkpoint, const Table& observed, int k,
                          Rng& rng) {
  if (k < 1) throw std::invalid_argument("impute: k must be >= 1");
  if (observed.n_cols() != checkpoint.schema.n_cols())
    throw std::invalid_argument("impute: table does not match checkpoint schema");
  for (int j = 0; j < observed.n_cols(); ++j)
    if (observed.schema.columns[static_cast<size_t>(j)].kind !=
        checkpoint.schema.columns[static_cast<size_t>(j)].kind)
      throw std::invalid_argument("impute: column kinds do not match checkpoint schema");

  const NoiseSchedule schedule = checkpoint.schedule();
  const Encoded encoded = encode(observed, checkpoint.schema);
  const Tensor& x_obs = encoded.batch.matrix;
  const Tensor& mask = encoded.mask;
  const int n = observed.n_rows();
  const int width = checkpoint.schema.encoded_width();
  bool any_observed = false;
  for (float v : mask.data)
    if (v != 0.0f) any_observed = true;

  std::vector<Table> completions;
  completions.reserve(static_cast<size_t>(k));
  for (int rep = 0; rep < k; ++rep) {
    Tensor x = normal_tensor({n, width}, rng);
    for (int t = schedule.T; t >= 1; --t) {
      if (any_observed) {
        // Re-anchor observed coordinates at this noise level.
        const Tensor eps = normal_tensor({n, width}, rng);
        const Tensor anchored =
            forward_perturb(x_obs, std::vector<int>(static_cast<size_t>(n), t), eps, schedule);
        for (size_t i = 0; i < x.data.size(); ++i)
          if (mask.data[i] != 0.0f) x.data[i] = anchored.data[i];
      }
      const Tensor eps_hat = forward(checkpoint.params, x,
                                     std::vector<int>(static_cast<size_t>(n), t), schedule.T);
      const double a = schedule.alpha_at(t);
      const double ab = schedule.alpha_bar_at(t);
      const double inv_sqrt_a = 1.0 / std::sqrt(a);
      const double coef = (1.0 - a) / std::sqrt(1.0 - ab);
      const double sigma = std::sqrt(schedule.beta_at(t));
      const Tensor noise = t > 1 ? normal_tensor({n, width}, rng) : Tensor::zeros({n, width});
      for (size_t i = 0; i < x.data.size(); ++i)
        x.data[i] = static_cast<float>(
            inv_sqrt_a * (x.data[i] - coef * eps_hat.data[i]) + sigma * noise.data[i]);
      check_finite(x, "impute");
    }
    Table decoded = decode(x, checkpoint.schema);
    // Observed cells pass through untouched.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < observed.n_cols(); ++j)
        if (!observed.at(i, j).is_na()) decoded.at(i, j) = observed.at(i, j);
    completions.push_back(std::move(decoded));
  }
  return completions;
}

double analytic_gaussian_score(double mean, double var, const NoiseSchedule& schedule, int t,
                               double x) {
  if (var <= 0.0) throw std::invalid_argument("analytic_gaussian_score: var must be > 0");
  const double ab = schedule.alpha_bar_at(t);
  return -(x - std::sqrt(ab) * mean) / (ab * var + 1.0 - ab);
}

double analytic_gaussian_eps(double mean, double var, const NoiseSchedule& schedule, int t,
                             double x) {
  const double ab = schedule.alpha_bar_at(t);
  return -std::sqrt(1.0 - ab) * analytic_gaussian_score(mean, var, schedule, t, x);
}

}  // namespace missdiff
