// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Elementwise, pooling, reshaping and loss primitives. conv2d lives in
// conv.cpp. Every op builds one Node; backward closures read activations
// through self.parents so no reference cycles are formed.

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "node_util.hpp"
#include "pcarn/autodiff.hpp"

namespace pcarn {

using detail::make_node;

namespace {

void check_same_shape(const char* op, const Var& a, const Var& b) {
    if (a.shape() != b.shape())
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    a.shape().str() + " vs " + b.shape().str());
}

void accumulate(Node& parent, const Tensor& contrib) {
    Tensor& g = parent.grad_buffer();
    for (size_t i = 0; i < g.v.size(); i++) g.v[i] += contrib.v[i];
}

} // namespace

Var relu(const Var& x) {
    Tensor out(x.shape());
    const auto& xv = x.value().v;
    for (size_t i = 0; i < xv.size(); i++) out.v[i] = xv[i] > 0.f ? xv[i] : 0.f;
    return make_node("relu", {x}, std::move(out), [](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (size_t i = 0; i < g.v.size(); i++)
            if (p.out.v[i] > 0.f) g.v[i] += self.grad.v[i];
    });
}

Var leaky_relu(const Var& x, float slope) {
    Tensor out(x.shape());
    const auto& xv = x.value().v;
    for (size_t i = 0; i < xv.size(); i++) out.v[i] = xv[i] > 0.f ? xv[i] : slope * xv[i];
    return make_node("leaky_relu", {x}, std::move(out), [slope](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (size_t i = 0; i < g.v.size(); i++)
            g.v[i] += self.grad.v[i] * (p.out.v[i] > 0.f ? 1.f : slope);
    });
}

Var sigmoid(const Var& x) {
    Tensor out(x.shape());
    const auto& xv = x.value().v;
    for (size_t i = 0; i < xv.size(); i++) out.v[i] = 1.f / (1.f + std::exp(-xv[i]));
    return make_node("sigmoid", {x}, std::move(out), [](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (size_t i = 0; i < g.v.size(); i++) {
            float y = self.out.v[i];
            g.v[i] += self.grad.v[i] * y * (1.f - y);
        }
    });
}

Var pixel_shuffle(const Var& x, int r) {
    const Shape s = x.shape();
    if (r < 1) throw std::invalid_argument("pixel_shuffle: r must be >= 1");
    if (s.c % (int64_t(r) * r) != 0)
        throw std::invalid_argument("pixel_shuffle: channels " + std::to_string(s.c) +
                                    " not divisible by r^2=" + std::to_string(r * r));
    const int64_t oc = s.c / (int64_t(r) * r);
    Tensor out(Shape{s.n, oc, s.h * r, s.w * r});
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < oc; c++)
            for (int64_t a = 0; a < r; a++)
                for (int64_t b = 0; b < r; b++)
                    for (int64_t h = 0; h < s.h; h++)
                        for (int64_t w = 0; w < s.w; w++)
                            out.at(n, c, r * h + a, r * w + b) =
                                x.value().at(n, c * r * r + a * r + b, h, w);
    return make_node("pixel_shuffle", {x}, std::move(out), [r, s, oc](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (int64_t n = 0; n < s.n; n++)
            for (int64_t c = 0; c < oc; c++)
                for (int64_t a = 0; a < r; a++)
                    for (int64_t b = 0; b < r; b++)
                        for (int64_t h = 0; h < s.h; h++)
                            for (int64_t w = 0; w < s.w; w++)
                                g.at(n, c * r * r + a * r + b, h, w) +=
                                    self.grad.at(n, c, r * h + a, r * w + b);
    });
}

Var avg_pool2(const Var& x) {
    const Shape s = x.shape();
    if (s.h % 2 != 0 || s.w % 2 != 0)
        throw std::invalid_argument("avg_pool2: odd extents " + s.str());
    Tensor out(Shape{s.n, s.c, s.h / 2, s.w / 2});
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++)
            for (int64_t h = 0; h < s.h / 2; h++)
                for (int64_t w = 0; w < s.w / 2; w++) {
                    const Tensor& xv = x.value();
                    out.at(n, c, h, w) = 0.25f * (xv.at(n, c, 2 * h, 2 * w) +
                                                  xv.at(n, c, 2 * h, 2 * w + 1) +
                                                  xv.at(n, c, 2 * h + 1, 2 * w) +
                                                  xv.at(n, c, 2 * h + 1, 2 * w + 1));
                }
    return make_node("avg_pool2", {x}, std::move(out), [s](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (int64_t n = 0; n < s.n; n++)
            for (int64_t c = 0; c < s.c; c++)
                for (int64_t h = 0; h < s.h / 2; h++)
                    for (int64_t w = 0; w < s.w / 2; w++) {
                        float d = 0.25f * self.grad.at(n, c, h, w);
                        g.at(n, c, 2 * h, 2 * w) += d;
                        g.at(n, c, 2 * h, 2 * w + 1) += d;
                        g.at(n, c, 2 * h + 1, 2 * w) += d;
                        g.at(n, c, 2 * h + 1, 2 * w + 1) += d;
                    }
    });
}

Var global_avg_pool(const Var& x) {
    const Shape s = x.shape();
    Tensor out(Shape{s.n, s.c, 1, 1});
    const double inv = 1.0 / double(s.h * s.w);
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++) {
            double acc = 0.0;
            for (int64_t h = 0; h < s.h; h++)
                for (int64_t w = 0; w < s.w; w++) acc += x.value().at(n, c, h, w);
            out.at(n, c, 0, 0) = static_cast<float>(acc * inv);
        }
    return make_node("global_avg_pool", {x}, std::move(out), [s, inv](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (int64_t n = 0; n < s.n; n++)
            for (int64_t c = 0; c < s.c; c++) {
                float d = static_cast<float>(self.grad.at(n, c, 0, 0) * inv);
                for (int64_t h = 0; h < s.h; h++)
                    for (int64_t w = 0; w < s.w; w++) g.at(n, c, h, w) += d;
            }
    });
}

Var concat_channels(const std::vector<Var>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat_channels: no inputs");
    const Shape s0 = xs[0].shape();
    int64_t total_c = 0;
    for (const auto& x : xs) {
        const Shape s = x.shape();
        if (s.n != s0.n || s.h != s0.h || s.w != s0.w)
            throw std::invalid_argument("concat_channels: mismatch " + s.str() +
                                        " vs " + s0.str());
        total_c += s.c;
    }
    Tensor out(Shape{s0.n, total_c, s0.h, s0.w});
    const int64_t plane = s0.h * s0.w;
    int64_t c_off = 0;
    for (const auto& x : xs) {
        const Shape s = x.shape();
        for (int64_t n = 0; n < s.n; n++)
            std::memcpy(&out.v[((n * total_c + c_off) * plane)],
                        &x.value().v[(n * s.c * plane)],
                        static_cast<size_t>(s.c * plane) * sizeof(float));
        c_off += s.c;
    }
    return make_node("concat_channels", xs, std::move(out), [s0, total_c, plane](Node& self) {
        int64_t c_off = 0;
        for (auto& pp : self.parents) {
            Node& p = *pp;
            const Shape s = p.out.shape;
            if (p.requires_grad) {
                Tensor& g = p.grad_buffer();
                for (int64_t n = 0; n < s.n; n++) {
                    const float* src = &self.grad.v[((n * total_c + c_off) * plane)];
                    float* dst = &g.v[(n * s.c * plane)];
                    for (int64_t i = 0; i < s.c * plane; i++) dst[i] += src[i];
                }
            }
            c_off += s.c;
        }
    });
}

Var add(const Var& a, const Var& b) {
    check_same_shape("add", a, b);
    Tensor out(a.shape());
    for (size_t i = 0; i < out.v.size(); i++) out.v[i] = a.value().v[i] + b.value().v[i];
    return make_node("add", {a, b}, std::move(out), [](Node& self) {
        for (auto& pp : self.parents)
            if (pp->requires_grad) accumulate(*pp, self.grad);
    });
}

Var sub(const Var& a, const Var& b) {
    check_same_shape("sub", a, b);
    Tensor out(a.shape());
    for (size_t i = 0; i < out.v.size(); i++) out.v[i] = a.value().v[i] - b.value().v[i];
    return make_node("sub", {a, b}, std::move(out), [](Node& self) {
        if (self.parents[0]->requires_grad) accumulate(*self.parents[0], self.grad);
        if (self.parents[1]->requires_grad) {
            Tensor& g = self.parents[1]->grad_buffer();
            for (size_t i = 0; i < g.v.size(); i++) g.v[i] -= self.grad.v[i];
        }
    });
}

Var mul_scalar(const Var& x, float s) {
    Tensor out(x.shape());
    for (size_t i = 0; i < out.v.size(); i++) out.v[i] = x.value().v[i] * s;
    return make_node("mul_scalar", {x}, std::move(out), [s](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (size_t i = 0; i < g.v.size(); i++) g.v[i] += self.grad.v[i] * s;
    });
}

Var clamp(const Var& x, float lo, float hi) {
    Tensor out(x.shape());
    const auto& xv = x.value().v;
    for (size_t i = 0; i < xv.size(); i++)
        out.v[i] = xv[i] < lo ? lo : (xv[i] > hi ? hi : xv[i]);
    return make_node("clamp", {x}, std::move(out), [lo, hi](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (size_t i = 0; i < g.v.size(); i++)
            if (p.out.v[i] >= lo && p.out.v[i] <= hi) g.v[i] += self.grad.v[i];
    });
}

Var log(const Var& x) {
    Tensor out(x.shape());
    for (size_t i = 0; i < out.v.size(); i++) out.v[i] = std::log(x.value().v[i]);
    return make_node("log", {x}, std::move(out), [](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        for (size_t i = 0; i < g.v.size(); i++) g.v[i] += self.grad.v[i] / p.out.v[i];
    });
}

namespace {

Var reduce_all(const char* op, const Var& x, bool mean) {
    double acc = 0.0;
    for (float v : x.value().v) acc += v;
    const double scale = mean ? 1.0 / double(x.value().count()) : 1.0;
    Tensor out = Tensor::scalar(static_cast<float>(acc * scale));
    return make_node(op, {x}, std::move(out), [scale](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        Tensor& g = p.grad_buffer();
        const float d = static_cast<float>(self.grad.v[0] * scale);
        for (size_t i = 0; i < g.v.size(); i++) g.v[i] += d;
    });
}

} // namespace

Var mean_all(const Var& x) { return reduce_all("mean_all", x, true); }
Var sum_all(const Var& x) { return reduce_all("sum_all", x, false); }

Var l1_loss(const Var& a, const Var& b) {
    check_same_shape("l1_loss", a, b);
    double acc = 0.0;
    for (size_t i = 0; i < a.value().v.size(); i++)
        acc += std::abs(double(a.value().v[i]) - double(b.value().v[i]));
    const double inv = 1.0 / double(a.value().count());
    Tensor out = Tensor::scalar(static_cast<float>(acc * inv));
    return make_node("l1_loss", {a, b}, std::move(out), [inv](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        const float d = static_cast<float>(self.grad.v[0] * inv);
        for (size_t i = 0; i < pa.out.v.size(); i++) {
            float diff = pa.out.v[i] - pb.out.v[i];
            float sgn = diff > 0.f ? 1.f : (diff < 0.f ? -1.f : 0.f);
            if (pa.requires_grad) pa.grad_buffer().v[i] += d * sgn;
            if (pb.requires_grad) pb.grad_buffer().v[i] -= d * sgn;
        }
    });
}

Var l2_loss(const Var& a, const Var& b) {
    check_same_shape("l2_loss", a, b);
    double acc = 0.0;
    for (size_t i = 0; i < a.value().v.size(); i++) {
        double diff = double(a.value().v[i]) - double(b.value().v[i]);
        acc += diff * diff;
    }
    const double inv = 1.0 / double(a.value().count());
    Tensor out = Tensor::scalar(static_cast<float>(acc * inv));
    return make_node("l2_loss", {a, b}, std::move(out), [inv](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        const float d = static_cast<float>(self.grad.v[0] * 2.0 * inv);
        for (size_t i = 0; i < pa.out.v.size(); i++) {
            float diff = pa.out.v[i] - pb.out.v[i];
            if (pa.requires_grad) pa.grad_buffer().v[i] += d * diff;
            if (pb.requires_grad) pb.grad_buffer().v[i] -= d * diff;
        }
    });
}

} // namespace pcarn
