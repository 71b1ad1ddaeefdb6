#include "missdiff/network.hpp"

#include <cmath>
#include <stdexcept>

namespace missdiff {

namespace {

Tensor xavier_uniform(int64_t fan_in, int64_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w = Tensor::zeros({fan_in, fan_out});
  for (float& v : w.data)
    v = static_cast<float>((2.0 * rng.uniform() - 1.0) * bound);
  return w;
}

void validate(const NetworkConfig& c) {
  if (c.input_dim <= 0 || c.channels <= 0 || c.embed_dim <= 0 || c.num_blocks <= 0)
    throw std::invalid_argument("network config: dimensions must be positive");
  if (c.embed_dim % 2 != 0)
    throw std::invalid_argument("network config: embed_dim must be even");
}

}  // namespace

std::vector<Tensor*> NetworkParams::tensors() {
  std::vector<Tensor*> out = {&w_in, &b_in};
  for (BlockParams& b : blocks) {
    out.push_back(&b.w1);
    out.push_back(&b.b1);
    out.push_back(&b.wt);
    out.push_back(&b.bt);
    out.push_back(&b.w2);
    out.push_back(&b.b2);
  }
  out.push_back(&w_out);
  out.push_back(&b_out);
  return out;
}

std::vector<const Tensor*> NetworkParams::tensors() const {
  auto mutable_list = const_cast<NetworkParams*>(this)->tensors();
  return std::vector<const Tensor*>(mutable_list.begin(), mutable_list.end());
}

std::vector<std::string> NetworkParams::tensor_names() const {
  std::vector<std::string> names = {"w_in", "b_in"};
  for (size_t i = 0; i < blocks.size(); ++i) {
    const std::string p = "block" + std::to_string(i) + ".";
    for (const char* leaf : {"w1", "b1", "wt", "bt", "w2", "b2"})
      names.push_back(p + leaf);
  }
  names.push_back("w_out");
  names.push_back("b_out");
  return names;
}

int64_t NetworkParams::parameter_count() const {
  int64_t n = 0;
  for (const Tensor* t : tensors()) n += t->numel();
  return n;
}

NetworkParams init_params(const NetworkConfig& config, Rng& rng) {
  validate(config);
  NetworkParams p;
  p.config = config;
  p.w_in = xavier_uniform(config.input_dim, config.channels, rng);
  p.b_in = Tensor::zeros({config.channels});
  p.blocks.resize(static_cast<size_t>(config.num_blocks));
  for (BlockParams& b : p.blocks) {
    b.w1 = xavier_uniform(config.channels, config.channels, rng);
    b.b1 = Tensor::zeros({config.channels});
    b.wt = xavier_uniform(config.embed_dim, config.channels, rng);
    b.bt = Tensor::zeros({config.channels});
    b.w2 = xavier_uniform(config.channels, config.channels, rng);
    b.b2 = Tensor::zeros({config.channels});
  }
  p.w_out = xavier_uniform(config.channels, config.input_dim, rng);
  p.b_out = Tensor::zeros({config.input_dim});
  return p;
}

Tensor time_embed(int t, int horizon, int embed_dim) {
  if (t < 1 || t > horizon)
    throw std::out_of_range("time_embed: step outside [1, horizon]");
  if (embed_dim % 2 != 0) throw std::invalid_argument("time_embed: embed_dim must be even");
  Tensor out = Tensor::zeros({embed_dim});
  for (int k = 0; k < embed_dim / 2; ++k) {
    const double freq = std::pow(10000.0, -2.0 * k / static_cast<double>(embed_dim));
    const double arg = static_cast<double>(t) * freq;
    out.data[static_cast<size_t>(2 * k)] = static_cast<float>(std::sin(arg));
    out.data[static_cast<size_t>(2 * k + 1)] = static_cast<float>(std::cos(arg));
  }
  return out;
}

Tensor time_embed_batch(const std::vector<int>& t, int horizon, int embed_dim) {
  Tensor out = Tensor::zeros({static_cast<int64_t>(t.size()), embed_dim});
  for (size_t i = 0; i < t.size(); ++i) {
    Tensor row = time_embed(t[i], horizon, embed_dim);
    std::copy(row.data.begin(), row.data.end(),
              out.data.begin() + static_cast<int64_t>(i) * embed_dim);
  }
  return out;
}

Tensor forward(const NetworkParams& params, const Tensor& x, const std::vector<int>& t,
               int horizon) {
  const NetworkConfig& c = params.config;
  if (x.shape.size() != 2 || x.shape[1] != c.input_dim)
    throw std::invalid_argument("forward: input width does not match config");
  if (static_cast<int64_t>(t.size()) != x.shape[0])
    throw std::invalid_argument("forward: one step per row required");
  const Tensor emb = time_embed_batch(t, horizon, c.embed_dim);

  using namespace kernels;
  Tensor h = bias_add(matmul(x, params.w_in), params.b_in);
  for (const BlockParams& b : params.blocks) {
    Tensor u = add(bias_add(matmul(h, b.w1), b.b1), bias_add(matmul(emb, b.wt), b.bt));
    Tensor v = bias_add(matmul(silu(u), b.w2), b.b2);
    h = add(h, v);
  }
  return bias_add(matmul(h, params.w_out), params.b_out);
}

GraphNetwork::GraphNetwork(const NetworkParams& params) : config_(params.config) {
  for (const Tensor* t : params.tensors()) leaves_.push_back(parameter(*t));
}

Value GraphNetwork::forward(const Value& x, const Value& time_embedding) const {
  if (x->out.shape.size() != 2 || x->out.shape[1] != config_.input_dim)
    throw std::invalid_argument("forward: input width does not match config");
  size_t i = 0;
  auto next = [&]() { return leaves_[i++]; };
  const Value w_in = next(), b_in = next();
  Value h = bias_add(matmul(x, w_in), b_in);
  for (int blk = 0; blk < config_.num_blocks; ++blk) {
    const Value w1 = next(), b1 = next(), wt = next(), bt = next(), w2 = next(), b2 = next();
    Value u = add(bias_add(matmul(h, w1), b1), bias_add(matmul(time_embedding, wt), bt));
    Value v = bias_add(matmul(silu(u), w2), b2);
    h = add(h, v);
  }
  const Value w_out = next(), b_out = next();
  return bias_add(matmul(h, w_out), b_out);
}

}  // namespace missdiff
