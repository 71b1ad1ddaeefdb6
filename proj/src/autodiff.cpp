#include "missdiff/autodiff.hpp"

#include <stdexcept>
#include <unordered_set>

namespace missdiff {

namespace {

Value make_node(Tensor out, std::vector<Value> inputs, const char* op,
                std::function<void(Node&)> backprop) {
  check_finite(out, op);
  auto n = std::make_shared<Node>();
  n->out = std::move(out);
  n->op = op;
  n->inputs = std::move(inputs);
  for (const Value& in : n->inputs)
    if (in->requires_grad) n->requires_grad = true;
  if (n->requires_grad) n->backprop = std::move(backprop);
  return n;
}

void accumulate(Node& target, const Tensor& contribution) {
  if (!target.requires_grad) return;
  if (!target.grad_allocated) {
    target.grad = Tensor::zeros(target.out.shape);
    target.grad_allocated = true;
  }
  for (size_t i = 0; i < target.grad.data.size(); ++i)
    target.grad.data[i] += contribution.data[i];
}

// Iterative post-order DFS; each node appears once, inputs before users.
std::vector<Node*> topo_order(const Value& root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

Value constant(Tensor t) {
  auto n = std::make_shared<Node>();
  check_finite(t, "constant");
  n->out = std::move(t);
  n->op = "constant";
  return n;
}

Value parameter(Tensor t) {
  auto n = std::make_shared<Node>();
  check_finite(t, "parameter");
  n->out = std::move(t);
  n->op = "parameter";
  n->requires_grad = true;
  return n;
}

Value matmul(const Value& a, const Value& b) {
  return make_node(kernels::matmul(a->out, b->out), {a, b}, "matmul", [](Node& n) {
    accumulate(*n.inputs[0], kernels::matmul_nt(n.grad, n.inputs[1]->out));
    accumulate(*n.inputs[1], kernels::matmul_tn(n.inputs[0]->out, n.grad));
  });
}

Value bias_add(const Value& x, const Value& b) {
  return make_node(kernels::bias_add(x->out, b->out), {x, b}, "bias_add", [](Node& n) {
    accumulate(*n.inputs[0], n.grad);
    accumulate(*n.inputs[1], kernels::col_sum(n.grad));
  });
}

Value add(const Value& a, const Value& b) {
  return make_node(kernels::add(a->out, b->out), {a, b}, "add", [](Node& n) {
    accumulate(*n.inputs[0], n.grad);
    accumulate(*n.inputs[1], n.grad);
  });
}

Value sub(const Value& a, const Value& b) {
  return make_node(kernels::sub(a->out, b->out), {a, b}, "sub", [](Node& n) {
    accumulate(*n.inputs[0], n.grad);
    accumulate(*n.inputs[1], kernels::scale(n.grad, -1.0));
  });
}

Value mul(const Value& a, const Value& b) {
  return make_node(kernels::mul(a->out, b->out), {a, b}, "mul", [](Node& n) {
    accumulate(*n.inputs[0], kernels::mul(n.grad, n.inputs[1]->out));
    accumulate(*n.inputs[1], kernels::mul(n.grad, n.inputs[0]->out));
  });
}

Value silu(const Value& x) {
  return make_node(kernels::silu(x->out), {x}, "silu", [](Node& n) {
    accumulate(*n.inputs[0], kernels::silu_grad(n.inputs[0]->out, n.grad));
  });
}

Value softmax_rows(const Value& x) {
  return make_node(kernels::softmax_rows(x->out), {x}, "softmax_rows", [](Node& n) {
    accumulate(*n.inputs[0], kernels::softmax_rows_grad(n.out, n.grad));
  });
}

Value square(const Value& x) {
  return make_node(kernels::square(x->out), {x}, "square", [](Node& n) {
    accumulate(*n.inputs[0], kernels::mul(kernels::scale(n.inputs[0]->out, 2.0), n.grad));
  });
}

Value scale(const Value& x, double c) {
  return make_node(kernels::scale(x->out, c), {x}, "scale", [c](Node& n) {
    accumulate(*n.inputs[0], kernels::scale(n.grad, c));
  });
}

Value sum_all(const Value& x) {
  return make_node(kernels::sum_all(x->out), {x}, "sum_all", [](Node& n) {
    accumulate(*n.inputs[0], Tensor::full(n.inputs[0]->out.shape, n.grad.data[0]));
  });
}

Value mean_all(const Value& x) {
  const double inv = 1.0 / static_cast<double>(x->out.numel());
  return scale(sum_all(x), inv);
}

void backward(const Value& loss) {
  if (!loss->out.is_scalar())
    throw std::invalid_argument("backward: loss must be a scalar");
  std::vector<Node*> order = topo_order(loss);
  loss->grad = Tensor::full(loss->out.shape, 1.0f);
  loss->grad_allocated = true;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->requires_grad || !n->backprop) continue;
    if (!n->grad_allocated) continue;  // unreachable from the seed
    n->backprop(*n);
  }
  for (Node* n : order)
    if (n->grad_allocated) check_finite(n->grad, "backward");
}

Tensor grad_of(const Value& p) {
  if (p->grad_allocated) return p->grad;
  return Tensor::zeros(p->out.shape);
}

std::vector<Tensor> backward(const Value& loss, const std::vector<Value>& params) {
  backward(loss);
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (const Value& p : params) grads.push_back(grad_of(p));
  return grads;
}

}  // namespace missdiff
