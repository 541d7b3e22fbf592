// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_AUTODIFF_HPP
#define PCARN_AUTODIFF_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pcarn/tensor.hpp"

namespace pcarn {

// One recorded operation in a define-by-run graph. Graphs are rebuilt every
// step; a Node owns its forward value and, once backward() has run, its
// gradient. backward_fn reads this node's grad and accumulates into the
// parents' grads (additively, so fan-out sums up as required).
struct Node {
    Tensor out;
    Tensor grad; // empty until first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;
    const char* op = "leaf";

    Tensor& grad_buffer(); // zero-initialized on first use
};

class Var {
public:
    Var() = default;
    explicit Var(std::shared_ptr<Node> n) : node(std::move(n)) {}

    static Var leaf(Tensor value, bool requires_grad);

    const Tensor& value() const { return node->out; }
    const Shape& shape() const { return node->out.shape; }
    const Tensor& grad() const { return node->grad; }
    bool requires_grad() const { return node && node->requires_grad; }
    bool defined() const { return node != nullptr; }
    float scalar() const; // value of a (1,1,1,1) tensor

    std::shared_ptr<Node> node;
};

// Nodes reachable from root, inputs-before-users. Deterministic for a given
// construction order.
std::vector<Node*> topo_order(const Var& root);

// Reverse-mode sweep. loss must have shape (1,1,1,1); rejects otherwise.
void backward(const Var& loss);

// Same value, no history: gradients never flow past a detached node.
Var detach(const Var& x);
Var constant(Tensor value); // leaf without grad

// --- primitive operations -------------------------------------------------

// Grouped cross-correlation. weight is (Cout, Cin/groups, K, K); bias may be
// null. K odd; Cin and Cout divisible by groups; output extents must come out
// integral. Rejections name the offending dimension.
Var conv2d(const Var& input, const Var& weight, const Var* bias,
           int stride, int pad, int groups);

Var relu(const Var& x);
Var leaky_relu(const Var& x, float slope);
Var sigmoid(const Var& x);

// (N, C*r^2, H, W) -> (N, C, rH, rW); out(n,c,r*h+a,r*w+b) = in(n,c*r^2+a*r+b,h,w).
Var pixel_shuffle(const Var& x, int r);
// 2x2 mean pooling; H and W must be even.
Var avg_pool2(const Var& x);
// (N,C,H,W) -> (N,C,1,1) spatial mean.
Var global_avg_pool(const Var& x);

Var concat_channels(const std::vector<Var>& xs);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul_scalar(const Var& x, float s);
Var clamp(const Var& x, float lo, float hi);
Var log(const Var& x);
Var mean_all(const Var& x); // -> scalar
Var sum_all(const Var& x);  // -> scalar

// Mean absolute / mean squared difference over all elements -> scalar.
Var l1_loss(const Var& a, const Var& b);
Var l2_loss(const Var& a, const Var& b);

// MAC instrumentation: every conv2d adds K^2*(Cin/G)*Cout*Hout*Wout to this
// counter when enabled. Used to cross-check the analytic cost model.
void set_mac_counting(bool enabled);
int64_t mac_count();
void reset_mac_count();

} // namespace pcarn

#endif
