// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/autodiff.hpp"

#include <stdexcept>
#include <unordered_set>

namespace pcarn {

Tensor& Node::grad_buffer() {
    if (grad.empty()) grad = Tensor(out.shape, 0.f);
    return grad;
}

Var Var::leaf(Tensor value, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->out = std::move(value);
    n->requires_grad = requires_grad;
    return Var(std::move(n));
}

float Var::scalar() const {
    if (shape() != Shape{1, 1, 1, 1})
        throw std::invalid_argument("scalar() on tensor of shape " + shape().str());
    return node->out.v[0];
}

std::vector<Node*> topo_order(const Var& root) {
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    // Iterative post-order DFS; parents visited in stored order so the
    // result (and with it every gradient accumulation order) is stable.
    struct Frame {
        Node* n;
        size_t next = 0;
    };
    std::vector<Frame> stack{{root.node.get()}};
    seen.insert(root.node.get());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < f.n->parents.size()) {
            Node* p = f.n->parents[f.next++].get();
            if (seen.insert(p).second) stack.push_back({p});
        } else {
            order.push_back(f.n);
            stack.pop_back();
        }
    }
    return order;
}

void backward(const Var& loss) {
    if (!loss.defined())
        throw std::invalid_argument("backward: undefined loss");
    if (loss.shape() != Shape{1, 1, 1, 1})
        throw std::invalid_argument("backward: loss must be scalar (1,1,1,1), got " +
                                    loss.shape().str());
    std::vector<Node*> order = topo_order(loss);
    loss.node->grad_buffer().v[0] = 1.f;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (!n->requires_grad || n->grad.empty() || !n->backward_fn) continue;
        n->backward_fn(*n);
    }
}

Var detach(const Var& x) {
    return Var::leaf(x.value(), false);
}

Var constant(Tensor value) {
    return Var::leaf(std::move(value), false);
}

} // namespace pcarn
