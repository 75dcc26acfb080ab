#include "rcgan/graph.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_set>

namespace rcgan {

namespace {
std::atomic<std::uint64_t> g_next_id{1};
}

std::shared_ptr<Node> make_node(Tensor value, std::vector<std::shared_ptr<Node>> parents) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->parents = std::move(parents);
  n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
  for (const auto& p : n->parents)
    if (p && p->requires_grad) n->requires_grad = true;
  return n;
}

Var Var::leaf(Tensor value, bool requires_grad) {
  auto n = make_node(std::move(value), {});
  n->requires_grad = requires_grad;
  return Var(n);
}

void backward(const Var& root) {
  if (!root.defined() || root.value().size() != 1)
    throw ShapeError("backward: root must be a scalar");
  if (!root.node()->requires_grad) return;

  // Collect the grad-requiring subgraph.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{root.node().get()};
  seen.insert(root.node().get());
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& p : n->parents) {
      if (p && p->requires_grad && !seen.count(p.get())) {
        seen.insert(p.get());
        stack.push_back(p.get());
      }
    }
  }
  std::sort(order.begin(), order.end(), [](Node* a, Node* b) { return a->id > b->id; });

  root.node()->ensure_grad()[0] += 1.0;
  for (Node* n : order) {
    if (n->backprop && !n->grad.empty()) n->backprop(*n);
  }
}

}  // namespace rcgan
