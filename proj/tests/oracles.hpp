#pragma once

// Test-only reference implementations, independent of the library's compute
// path: a double-precision re-implementation of the residual network and the
// masked noise-regression loss, used as the ground truth for
// finite-difference gradient checks.

#include <cmath>
#include <vector>

#include "missdiff/network.hpp"
#include "missdiff/tensor.hpp"

namespace oracle {

using DMat = std::vector<std::vector<double>>;

inline DMat to_dmat(const missdiff::Tensor& t) {
  DMat out(static_cast<size_t>(t.shape[0]),
           std::vector<double>(static_cast<size_t>(t.shape[1]), 0.0));
  for (int64_t i = 0; i < t.shape[0]; ++i)
    for (int64_t j = 0; j < t.shape[1]; ++j) out[i][j] = t.at(i, j);
  return out;
}

inline std::vector<double> to_dvec(const missdiff::Tensor& t) {
  return std::vector<double>(t.data.begin(), t.data.end());
}

inline DMat dmatmul(const DMat& a, const DMat& b) {
  const size_t m = a.size(), k = b.size(), n = b[0].size();
  DMat out(m, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < m; ++i)
    for (size_t p = 0; p < k; ++p)
      for (size_t j = 0; j < n; ++j) out[i][j] += a[i][p] * b[p][j];
  return out;
}

inline void dbias_add(DMat& x, const std::vector<double>& b) {
  for (auto& row : x)
    for (size_t j = 0; j < row.size(); ++j) row[j] += b[j];
}

inline double dsilu(double x) { return x / (1.0 + std::exp(-x)); }

inline DMat dtime_embed(const std::vector<int>& t, int embed_dim) {
  DMat out(t.size(), std::vector<double>(static_cast<size_t>(embed_dim), 0.0));
  for (size_t i = 0; i < t.size(); ++i)
    for (int k = 0; k < embed_dim / 2; ++k) {
      const double arg = t[i] * std::pow(10000.0, -2.0 * k / embed_dim);
      out[i][static_cast<size_t>(2 * k)] = std::sin(arg);
      out[i][static_cast<size_t>(2 * k + 1)] = std::cos(arg);
    }
  return out;
}

// Double-precision forward pass of the residual network, parameters read
// straight from NetworkParams storage.
inline DMat dforward(const missdiff::NetworkParams& params, const DMat& x,
                     const std::vector<int>& t) {
  const auto& c = params.config;
  const DMat emb = dtime_embed(t, c.embed_dim);
  DMat h = dmatmul(x, to_dmat(params.w_in));
  dbias_add(h, to_dvec(params.b_in));
  for (const auto& blk : params.blocks) {
    DMat u = dmatmul(h, to_dmat(blk.w1));
    dbias_add(u, to_dvec(blk.b1));
    DMat tp = dmatmul(emb, to_dmat(blk.wt));
    dbias_add(tp, to_dvec(blk.bt));
    for (size_t i = 0; i < u.size(); ++i)
      for (size_t j = 0; j < u[i].size(); ++j) u[i][j] = dsilu(u[i][j] + tp[i][j]);
    DMat v = dmatmul(u, to_dmat(blk.w2));
    dbias_add(v, to_dvec(blk.b2));
    for (size_t i = 0; i < h.size(); ++i)
      for (size_t j = 0; j < h[i].size(); ++j) h[i][j] += v[i][j];
  }
  DMat out = dmatmul(h, to_dmat(params.w_out));
  dbias_add(out, to_dvec(params.b_out));
  return out;
}

// Mean over rows of ||(eps - net(x_t, t)) * mask||^2 in double precision.
inline double dmasked_loss(const missdiff::NetworkParams& params, const DMat& x_t,
                           const DMat& mask, const std::vector<int>& t, const DMat& eps) {
  const DMat out = dforward(params, x_t, t);
  double acc = 0.0;
  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = 0; j < out[i].size(); ++j) {
      const double r = (eps[i][j] - out[i][j]) * mask[i][j];
      acc += r * r;
    }
  return acc / static_cast<double>(out.size());
}

// Central finite difference of dmasked_loss with respect to one parameter
// scalar. Mutates and restores the parameter in place.
inline double fd_gradient(missdiff::NetworkParams& params, float* slot, const DMat& x_t,
                          const DMat& mask, const std::vector<int>& t, const DMat& eps,
                          double h = 1e-3) {
  const float saved = *slot;
  // The perturbed values are float32-quantized; divide by the step actually
  // taken rather than the nominal 2h.
  const float up_v = static_cast<float>(saved + h);
  const float down_v = static_cast<float>(saved - h);
  *slot = up_v;
  const double up = dmasked_loss(params, x_t, mask, t, eps);
  *slot = down_v;
  const double down = dmasked_loss(params, x_t, mask, t, eps);
  *slot = saved;
  return (up - down) / (static_cast<double>(up_v) - static_cast<double>(down_v));
}

}  // namespace oracle
