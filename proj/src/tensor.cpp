#include "arguing/tensor.hpp"

#include <unordered_set>

namespace arguing {

namespace {

void topo_sort(const NodePtr& root, std::vector<TensorNode*>& order) {
    // Iterative post-order DFS; recursion would overflow on long chains.
    std::unordered_set<TensorNode*> visited;
    std::vector<std::pair<TensorNode*, size_t>> stack;
    stack.emplace_back(root.get(), 0);
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next_child] = stack.back();
        if (next_child < node->parents.size()) {
            TensorNode* child = node->parents[next_child++].get();
            if (child->requires_grad && visited.insert(child).second)
                stack.emplace_back(child, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
}

}  // namespace

void backward(const Tensor& loss) {
    if (!loss.defined() || loss.size() != 1)
        throw std::invalid_argument("backward requires a scalar loss");
    if (!loss.requires_grad()) return;

    std::vector<TensorNode*> order;
    topo_sort(loss.node(), order);

    loss.node()->ensure_grad();
    loss.node()->grad(0, 0) += 1.0;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorNode* node = *it;
        if (!node->backprop) continue;
        node->ensure_grad();
        node->backprop(*node);
    }
}

void zero_grads(const std::vector<Tensor>& params) {
    for (auto p : params) p.zero_grad();
}

}  // namespace arguing
