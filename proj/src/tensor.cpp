#include "missdiff/tensor.hpp"

#include "missdiff/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace missdiff {

namespace {

int64_t shape_numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t s : shape) {
    if (s < 0) throw std::invalid_argument("negative dimension in shape");
    n *= s;
  }
  return n;
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Tensor::Tensor(std::vector<int64_t> shape_, std::vector<float> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
  if (shape_numel(shape) != static_cast<int64_t>(data.size()))
    throw std::invalid_argument("tensor data length does not match shape");
}

Tensor Tensor::zeros(std::vector<int64_t> shape) {
  int64_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<float>(static_cast<size_t>(n), 0.0f));
}

Tensor Tensor::full(std::vector<int64_t> shape, float v) {
  int64_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<float>(static_cast<size_t>(n), v));
}

int64_t Tensor::numel() const { return static_cast<int64_t>(data.size()); }

int64_t Tensor::rows() const {
  require(shape.size() == 2, "rows() requires a 2-D tensor");
  return shape[0];
}

int64_t Tensor::cols() const {
  require(shape.size() == 2, "cols() requires a 2-D tensor");
  return shape[1];
}

float& Tensor::at(int64_t i, int64_t j) {
  return data[static_cast<size_t>(i * cols() + j)];
}

float Tensor::at(int64_t i, int64_t j) const {
  return data[static_cast<size_t>(i * cols() + j)];
}

void check_finite(const Tensor& t, const char* where) {
  for (float v : t.data) {
    if (!std::isfinite(v))
      throw std::runtime_error(std::string("non-finite value in ") + where);
  }
}

Tensor normal_tensor(std::vector<int64_t> shape, Rng& rng) {
  if (shape.empty()) throw std::invalid_argument("normal_tensor: shape must be nonempty");
  Tensor t = Tensor::zeros(std::move(shape));
  for (float& v : t.data) v = static_cast<float>(rng.normal());
  return t;
}

namespace kernels {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0])
    throw std::invalid_argument("matmul: incompatible shapes");
  const int64_t m = a.shape[0], k = a.shape[1], n = b.shape[1];
  Tensor out = Tensor::zeros({m, n});
  std::vector<double> acc(static_cast<size_t>(n));
  for (int64_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const float* arow = a.data.data() + i * k;
    for (int64_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const float* brow = b.data.data() + p * n;
      for (int64_t j = 0; j < n; ++j) acc[static_cast<size_t>(j)] += av * brow[j];
    }
    float* orow = out.data.data() + i * n;
    for (int64_t j = 0; j < n; ++j) orow[j] = static_cast<float>(acc[static_cast<size_t>(j)]);
  }
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[1])
    throw std::invalid_argument("matmul_nt: incompatible shapes");
  const int64_t m = a.shape[0], k = a.shape[1], n = b.shape[0];
  Tensor out = Tensor::zeros({m, n});
  for (int64_t i = 0; i < m; ++i) {
    const float* arow = a.data.data() + i * k;
    for (int64_t j = 0; j < n; ++j) {
      const float* brow = b.data.data() + j * k;
      double acc = 0.0;
      for (int64_t p = 0; p < k; ++p) acc += static_cast<double>(arow[p]) * brow[p];
      out.data[static_cast<size_t>(i * n + j)] = static_cast<float>(acc);
    }
  }
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[0] != b.shape[0])
    throw std::invalid_argument("matmul_tn: incompatible shapes");
  const int64_t k = a.shape[0], m = a.shape[1], n = b.shape[1];
  Tensor out = Tensor::zeros({m, n});
  std::vector<double> acc(static_cast<size_t>(m * n), 0.0);
  for (int64_t p = 0; p < k; ++p) {
    const float* arow = a.data.data() + p * m;
    const float* brow = b.data.data() + p * n;
    for (int64_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* accrow = acc.data() + i * n;
      for (int64_t j = 0; j < n; ++j) accrow[j] += av * brow[j];
    }
  }
  for (size_t i = 0; i < acc.size(); ++i) out.data[i] = static_cast<float>(acc[i]);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = a;
  for (float& v : out.data) v = static_cast<float>(v * c);
  return out;
}

Tensor square(const Tensor& a) {
  Tensor out = a;
  for (float& v : out.data) v *= v;
  return out;
}

Tensor bias_add(const Tensor& x, const Tensor& b) {
  if (x.shape.size() != 2 || b.shape.size() != 1 || b.shape[0] != x.shape[1])
    throw std::invalid_argument("bias_add: bias must match row width");
  Tensor out = x;
  const int64_t m = x.shape[0], n = x.shape[1];
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) out.data[static_cast<size_t>(i * n + j)] += b.data[static_cast<size_t>(j)];
  return out;
}

Tensor col_sum(const Tensor& x) {
  if (x.shape.size() != 2) throw std::invalid_argument("col_sum: 2-D input required");
  const int64_t m = x.shape[0], n = x.shape[1];
  Tensor out = Tensor::zeros({n});
  std::vector<double> acc(static_cast<size_t>(n), 0.0);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) acc[static_cast<size_t>(j)] += x.data[static_cast<size_t>(i * n + j)];
  for (int64_t j = 0; j < n; ++j) out.data[static_cast<size_t>(j)] = static_cast<float>(acc[static_cast<size_t>(j)]);
  return out;
}

Tensor silu(const Tensor& x) {
  Tensor out = x;
  for (float& v : out.data) {
    const double d = v;
    v = static_cast<float>(d * sigmoid(d));
  }
  return out;
}

Tensor silu_grad(const Tensor& x, const Tensor& dy) {
  require_same_shape(x, dy, "silu_grad");
  Tensor out = x;
  for (size_t i = 0; i < out.data.size(); ++i) {
    const double d = x.data[i];
    const double s = sigmoid(d);
    out.data[i] = static_cast<float>(static_cast<double>(dy.data[i]) * (s * (1.0 + d * (1.0 - s))));
  }
  return out;
}

Tensor softmax_rows(const Tensor& x) {
  if (x.shape.size() != 2) throw std::invalid_argument("softmax_rows: 2-D input required");
  const int64_t m = x.shape[0], n = x.shape[1];
  Tensor out = x;
  for (int64_t i = 0; i < m; ++i) {
    const float* row = x.data.data() + i * n;
    double mx = row[0];
    for (int64_t j = 1; j < n; ++j) mx = std::max(mx, static_cast<double>(row[j]));
    double denom = 0.0;
    std::vector<double> e(static_cast<size_t>(n));
    for (int64_t j = 0; j < n; ++j) {
      e[static_cast<size_t>(j)] = std::exp(static_cast<double>(row[j]) - mx);
      denom += e[static_cast<size_t>(j)];
    }
    for (int64_t j = 0; j < n; ++j)
      out.data[static_cast<size_t>(i * n + j)] = static_cast<float>(e[static_cast<size_t>(j)] / denom);
  }
  return out;
}

Tensor softmax_rows_grad(const Tensor& y, const Tensor& dy) {
  require_same_shape(y, dy, "softmax_rows_grad");
  const int64_t m = y.shape[0], n = y.shape[1];
  Tensor out = y;
  for (int64_t i = 0; i < m; ++i) {
    const float* yrow = y.data.data() + i * n;
    const float* drow = dy.data.data() + i * n;
    double dot = 0.0;
    for (int64_t j = 0; j < n; ++j) dot += static_cast<double>(yrow[j]) * drow[j];
    for (int64_t j = 0; j < n; ++j)
      out.data[static_cast<size_t>(i * n + j)] =
          static_cast<float>(static_cast<double>(yrow[j]) * (static_cast<double>(drow[j]) - dot));
  }
  return out;
}

Tensor sum_all(const Tensor& x) {
  double acc = 0.0;
  for (float v : x.data) acc += v;
  return Tensor::scalar(static_cast<float>(acc));
}

}  // namespace kernels

}  // namespace missdiff
