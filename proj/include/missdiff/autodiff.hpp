#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "missdiff/tensor.hpp"

namespace missdiff {

// Define-by-run reverse-mode tape. A graph is built per batch out of
// shared_ptr-linked nodes and freed when the last Value goes out of scope.
// Node ops call the same kernels as the plain inference path, so graph and
// non-graph forwards produce bit-identical outputs.
struct Node;
using Value = std::shared_ptr<Node>;

struct Node {
  Tensor out;
  Tensor grad;  // allocated lazily during backward
  bool requires_grad = false;
  bool grad_allocated = false;
  std::vector<Value> inputs;
  // Pulls this node's grad into its inputs' grads. Empty for leaves.
  std::function<void(Node&)> backprop;
  const char* op = "leaf";
};

Value constant(Tensor t);
Value parameter(Tensor t);

Value matmul(const Value& a, const Value& b);
Value bias_add(const Value& x, const Value& b);
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value silu(const Value& x);
Value softmax_rows(const Value& x);
Value square(const Value& x);
Value scale(const Value& x, double c);
Value sum_all(const Value& x);
Value mean_all(const Value& x);

// Reverse pass from a scalar loss, visiting each node exactly once in
// reverse topological order. Gradients land in node->grad. Throws on a
// non-scalar loss or if a non-finite gradient appears. Call once per graph.
void backward(const Value& loss);

// Gradient of `p` after backward(); zeros if the loss never reached it.
Tensor grad_of(const Value& p);

// Convenience: backward plus gradient lookup for a parameter list.
std::vector<Tensor> backward(const Value& loss, const std::vector<Value>& params);

}  // namespace missdiff
