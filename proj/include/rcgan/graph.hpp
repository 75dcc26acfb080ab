#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "rcgan/tensor.hpp"

namespace rcgan {

// Reverse-mode autodiff over Tensors. Ops append Nodes to an implicit tape;
// creation ids give a topological order because every op is created after
// its parents. backward() walks reachable nodes in descending id order.
struct Node {
  Tensor value;
  Tensor grad;  // empty until a child accumulates into it
  bool requires_grad = false;
  std::uint64_t id = 0;
  std::vector<std::shared_ptr<Node>> parents;
  // Distributes this->grad into parents' grads.
  std::function<void(Node&)> backprop;

  Tensor& ensure_grad() {
    if (grad.empty()) grad = Tensor::zeros(value.dims());
    return grad;
  }
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Var leaf(Tensor value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Tensor& grad() const { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  void zero_grad() { node_->grad = Tensor(); }

  std::shared_ptr<Node>& node() { return node_; }
  const std::shared_ptr<Node>& node() const { return node_; }

  double scalar() const { return value()[0]; }

 private:
  std::shared_ptr<Node> node_;
};

// Allocates a node with the next tape id.
std::shared_ptr<Node> make_node(Tensor value, std::vector<std::shared_ptr<Node>> parents);

// Backpropagates d(root)/d(leaf) into every reachable grad-requiring leaf.
// root must hold a single element.
void backward(const Var& root);

}  // namespace rcgan
