#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "missdiff/network.hpp"
#include "missdiff/rng.hpp"
#include "oracles.hpp"

using namespace missdiff;

TEST_CASE("init: deterministic given the seed, biases zero, Xavier bound holds") {
  NetworkConfig config;
  config.input_dim = 10;
  Rng a(11), b(11);
  NetworkParams pa = init_params(config, a);
  NetworkParams pb = init_params(config, b);
  const auto ta = pa.tensors(), tb = pb.tensors();
  REQUIRE(ta.size() == tb.size());
  for (size_t i = 0; i < ta.size(); ++i) CHECK(ta[i]->data == tb[i]->data);

  CHECK(pa.b_in.data == std::vector<float>(64, 0.0f));
  for (const BlockParams& blk : pa.blocks) {
    CHECK(blk.b1.data == std::vector<float>(64, 0.0f));
    CHECK(blk.bt.data == std::vector<float>(64, 0.0f));
    CHECK(blk.b2.data == std::vector<float>(64, 0.0f));
  }

  // 64 -> 64 layers stay inside the +-sqrt(6/128) bound.
  const double bound = std::sqrt(6.0 / 128.0);
  CHECK(bound == doctest::Approx(0.2165).epsilon(1e-3));
  for (const BlockParams& blk : pa.blocks)
    for (float w : blk.w1.data) CHECK(std::abs(w) <= bound);
}

TEST_CASE("time embedding: length, first pair, range checks") {
  const Tensor e = time_embed(1, 100, 128);
  CHECK(e.numel() == 128);
  CHECK(e.data[0] == doctest::Approx(std::sin(1.0)));
  CHECK(e.data[1] == doctest::Approx(std::cos(1.0)));
  // Component 2k uses frequency 10000^(-2k/dim).
  const double freq = std::pow(10000.0, -2.0 * 3 / 128.0);
  CHECK(e.data[6] == doctest::Approx(std::sin(freq)));

  CHECK_THROWS_AS(time_embed(0, 100, 128), std::out_of_range);
  CHECK_THROWS_AS(time_embed(101, 100, 128), std::out_of_range);
}

TEST_CASE("forward: shape contract and purity") {
  NetworkConfig config;
  config.input_dim = 7;
  Rng rng(3);
  const NetworkParams params = init_params(config, rng);
  Rng data_rng(5);
  const Tensor x = normal_tensor({4, 7}, data_rng);
  const std::vector<int> t{1, 25, 50, 100};

  const Tensor out1 = forward(params, x, t, 100);
  const Tensor out2 = forward(params, x, t, 100);
  CHECK(out1.shape == std::vector<int64_t>{4, 7});
  CHECK(out1.data == out2.data);

  CHECK_THROWS(forward(params, normal_tensor({4, 6}, data_rng), t, 100));
  CHECK_THROWS(forward(params, x, {1, 2, 3, 999}, 100));
}

TEST_CASE("forward: zero output projection gives zero output") {
  NetworkConfig config;
  config.input_dim = 5;
  Rng rng(1);
  NetworkParams params = init_params(config, rng);
  params.w_out = Tensor::zeros(params.w_out.shape);
  params.b_out = Tensor::zeros(params.b_out.shape);
  Rng data_rng(2);
  const Tensor out = forward(params, normal_tensor({3, 5}, data_rng), {1, 2, 3}, 100);
  for (float v : out.data) CHECK(v == 0.0f);
}

TEST_CASE("forward: a block with zero weights is the identity on the hidden state") {
  NetworkConfig config;
  config.input_dim = 5;
  config.num_blocks = 1;
  Rng rng(17);
  NetworkParams params = init_params(config, rng);
  params.blocks[0].w1 = Tensor::zeros(params.blocks[0].w1.shape);
  params.blocks[0].wt = Tensor::zeros(params.blocks[0].wt.shape);
  params.blocks[0].w2 = Tensor::zeros(params.blocks[0].w2.shape);

  Rng data_rng(18);
  const Tensor x = normal_tensor({3, 5}, data_rng);
  const Tensor out = forward(params, x, {7, 7, 7}, 100);
  // With the block inert the network reduces to out_proj(in_proj(x)).
  using namespace kernels;
  const Tensor direct = bias_add(
      matmul(bias_add(matmul(x, params.w_in), params.b_in), params.w_out), params.b_out);
  CHECK(out.data == direct.data);
}

TEST_CASE("graph forward matches the plain forward bit for bit") {
  NetworkConfig config;
  config.input_dim = 6;
  Rng rng(23);
  const NetworkParams params = init_params(config, rng);
  Rng data_rng(29);
  const Tensor x = normal_tensor({5, 6}, data_rng);
  const std::vector<int> t{10, 20, 30, 40, 99};

  const Tensor plain = forward(params, x, t, 100);
  GraphNetwork net(params);
  const Value graph =
      net.forward(constant(x), constant(time_embed_batch(t, 100, config.embed_dim)));
  CHECK(plain.data == graph->out.data);
}

TEST_CASE("network gradients match the double-precision oracle") {
  NetworkConfig config;
  config.input_dim = 6;
  config.channels = 16;
  config.embed_dim = 32;
  config.num_blocks = 2;
  Rng rng(31);
  NetworkParams params = init_params(config, rng);

  Rng data_rng(37);
  const Tensor x0 = normal_tensor({8, 6}, data_rng);
  const Tensor eps = normal_tensor({8, 6}, data_rng);
  Tensor mask = Tensor::zeros({8, 6});
  for (float& v : mask.data) v = data_rng.uniform() < 0.5 ? 0.0f : 1.0f;
  const std::vector<int> t{1, 10, 20, 40, 60, 80, 90, 100};

  // Analytic gradients through the graph.
  GraphNetwork net(params);
  const Value out = net.forward(constant(x0), constant(time_embed_batch(t, 100, 32)));
  const Value residual = mul(sub(constant(eps), out), constant(mask));
  const Value loss = scale(sum_all(square(residual)), 1.0 / 8.0);
  const std::vector<Tensor> grads = backward(loss, net.leaves());

  const auto dx = oracle::to_dmat(x0);
  const auto dm = oracle::to_dmat(mask);
  const auto de = oracle::to_dmat(eps);
  CHECK(loss->out.data[0] ==
        doctest::Approx(oracle::dmasked_loss(params, dx, dm, t, de)).epsilon(1e-4));

  auto tensors = params.tensors();
  Rng pick(41);
  double max_rel = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const size_t which = static_cast<size_t>(pick.next_below(tensors.size()));
    if (tensors[which]->numel() == 0) continue;
    const size_t entry = static_cast<size_t>(
        pick.next_below(static_cast<uint64_t>(tensors[which]->numel())));
    const double fd =
        oracle::fd_gradient(params, &tensors[which]->data[entry], dx, dm, t, de);
    const double an = grads[which].data[entry];
    const double denom = std::max(std::abs(fd), std::abs(an));
    const double rel = denom == 0.0 ? 0.0 : std::abs(fd - an) / denom;
    max_rel = std::max(max_rel, rel);
  }
  CHECK(max_rel < 1e-3);
}
