// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_SRC_NODE_UTIL_HPP
#define PCARN_SRC_NODE_UTIL_HPP

#include <stdexcept>
#include <string>

#include "pcarn/autodiff.hpp"

namespace pcarn::detail {

inline Var make_node(const char* op, std::vector<Var> parents, Tensor out,
                     std::function<void(Node&)> backward_fn) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->out = std::move(out);
    n->parents.reserve(parents.size());
    for (auto& p : parents) {
        if (!p.defined()) throw std::invalid_argument(std::string(op) + ": undefined input");
        n->requires_grad = n->requires_grad || p.node->requires_grad;
        n->parents.push_back(p.node);
    }
    if (n->requires_grad) n->backward_fn = std::move(backward_fn);
    return Var(std::move(n));
}

} // namespace pcarn::detail

#endif
