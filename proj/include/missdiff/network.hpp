#pragma once

#include <string>
#include <utility>
#include <vector>

#include "missdiff/autodiff.hpp"
#include "missdiff/rng.hpp"
#include "missdiff/tensor.hpp"

namespace missdiff {

// Residual MLP that predicts the noise added to an encoded row, conditioned
// on the diffusion step through a sinusoidal embedding.
struct NetworkConfig {
  int input_dim = 0;
  int channels = 64;
  int embed_dim = 128;
  int num_blocks = 4;
};

struct BlockParams {
  Tensor w1, b1;  // channels -> channels
  Tensor wt, bt;  // embed_dim -> channels
  Tensor w2, b2;  // channels -> channels
};

struct NetworkParams {
  NetworkConfig config;
  Tensor w_in, b_in;    // input_dim -> channels
  std::vector<BlockParams> blocks;
  Tensor w_out, b_out;  // channels -> input_dim

  // Fixed traversal order shared by the optimizer and the checkpoint format.
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  std::vector<std::string> tensor_names() const;
  int64_t parameter_count() const;
};

// Xavier-uniform weights, zero biases. Weight matrices are drawn in
// tensors() order; biases consume no randomness.
NetworkParams init_params(const NetworkConfig& config, Rng& rng);

// Sinusoidal step embedding: component 2k is sin(t / 10000^(2k/embed_dim)),
// component 2k+1 is the matching cosine. Requires 1 <= t <= horizon.
Tensor time_embed(int t, int horizon, int embed_dim);
Tensor time_embed_batch(const std::vector<int>& t, int horizon, int embed_dim);

// Plain inference path. x is [B, input_dim], t holds one step per row.
Tensor forward(const NetworkParams& params, const Tensor& x, const std::vector<int>& t,
               int horizon);

// Graph-building path for training. Wraps each parameter tensor as a leaf
// once; leaves() aligns with NetworkParams::tensors().
class GraphNetwork {
 public:
  explicit GraphNetwork(const NetworkParams& params);
  Value forward(const Value& x, const Value& time_embedding) const;
  const std::vector<Value>& leaves() const { return leaves_; }
  const NetworkConfig& config() const { return config_; }

 private:
  NetworkConfig config_;
  std::vector<Value> leaves_;
};

}  // namespace missdiff
