#pragma once

#include <cstdint>
#include <vector>

namespace missdiff {

// Dense row-major float32 tensor. Everything in this project is 1-D or 2-D;
// a scalar is shape {1}.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<float> data;

  Tensor() = default;
  Tensor(std::vector<int64_t> shape_, std::vector<float> data_);

  static Tensor zeros(std::vector<int64_t> shape);
  static Tensor full(std::vector<int64_t> shape, float v);
  static Tensor scalar(float v) { return Tensor({1}, {v}); }

  int64_t numel() const;
  bool is_scalar() const { return numel() == 1; }

  int64_t rows() const;
  int64_t cols() const;
  float& at(int64_t i, int64_t j);
  float at(int64_t i, int64_t j) const;

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

// Throws std::runtime_error naming `where` if any value is NaN or Inf.
void check_finite(const Tensor& t, const char* where);

class Rng;
// Tensor of i.i.d. standard normal draws, filled in row-major order.
Tensor normal_tensor(std::vector<int64_t> shape, Rng& rng);

// Low-level kernels shared by the autodiff layer and the plain inference
// path, so graph and non-graph forwards are bit-identical. Element results
// are computed in double and rounded once to float32; reductions accumulate
// in double.
namespace kernels {

Tensor matmul(const Tensor& a, const Tensor& b);     // [m,k] x [k,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a * b^T, b is [n,k]
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T * b, a is [k,m]

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor square(const Tensor& a);

// x + row vector b, broadcast over rows.
Tensor bias_add(const Tensor& x, const Tensor& b);
Tensor col_sum(const Tensor& x);  // [m,n] -> [n]

Tensor silu(const Tensor& x);
// dL/dx given x and upstream dL/dy for y = silu(x).
Tensor silu_grad(const Tensor& x, const Tensor& dy);

Tensor softmax_rows(const Tensor& x);
// dL/dx given y = softmax_rows(x) and upstream dL/dy.
Tensor softmax_rows_grad(const Tensor& y, const Tensor& dy);

Tensor sum_all(const Tensor& x);  // -> scalar

}  // namespace kernels

}  // namespace missdiff
