// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/refcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcarn::ref {

DTensor DTensor::from(const Tensor& t) {
    DTensor d(t.shape);
    for (size_t i = 0; i < t.v.size(); i++) d.v[i] = t.v[i];
    return d;
}

Tensor DTensor::to_float() const {
    Tensor t(shape);
    for (size_t i = 0; i < v.size(); i++) t.v[i] = static_cast<float>(v[i]);
    return t;
}

DTensor conv2d(const DTensor& x, const DTensor& w, const DTensor* bias,
               int stride, int pad, int groups) {
    const int64_t n_ = x.shape.n, cin = x.shape.c, h = x.shape.h, ww = x.shape.w;
    const int64_t cout = w.shape.n, k = w.shape.h;
    const int64_t cig = cin / groups, cog = cout / groups;
    const int64_t ho = (h + 2 * pad - k) / stride + 1;
    const int64_t wo = (ww + 2 * pad - k) / stride + 1;
    DTensor out(Shape{n_, cout, ho, wo});
    for (int64_t n = 0; n < n_; n++)
        for (int64_t c = 0; c < cout; c++) {
            const int64_t g = c / cog;
            for (int64_t y = 0; y < ho; y++)
                for (int64_t xo = 0; xo < wo; xo++) {
                    double acc = bias ? bias->v[static_cast<size_t>(c)] : 0.0;
                    for (int64_t cg = 0; cg < cig; cg++)
                        for (int64_t ky = 0; ky < k; ky++)
                            for (int64_t kx = 0; kx < k; kx++) {
                                const int64_t iy = y * stride - pad + ky;
                                const int64_t ix = xo * stride - pad + kx;
                                if (iy < 0 || iy >= h || ix < 0 || ix >= ww) continue;
                                acc += x.at(n, g * cig + cg, iy, ix) *
                                       w.at(c, cg, ky, kx);
                            }
                    out.at(n, c, y, xo) = acc;
                }
        }
    return out;
}

DTensor relu(const DTensor& x) {
    DTensor out(x.shape);
    for (size_t i = 0; i < x.v.size(); i++) out.v[i] = x.v[i] > 0.0 ? x.v[i] : 0.0;
    return out;
}

DTensor leaky_relu(const DTensor& x, double slope) {
    DTensor out(x.shape);
    for (size_t i = 0; i < x.v.size(); i++)
        out.v[i] = x.v[i] > 0.0 ? x.v[i] : slope * x.v[i];
    return out;
}

DTensor sigmoid(const DTensor& x) {
    DTensor out(x.shape);
    for (size_t i = 0; i < x.v.size(); i++) out.v[i] = 1.0 / (1.0 + std::exp(-x.v[i]));
    return out;
}

DTensor pixel_shuffle(const DTensor& x, int r) {
    const Shape s = x.shape;
    const int64_t oc = s.c / (int64_t(r) * r);
    DTensor out(Shape{s.n, oc, s.h * r, s.w * r});
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < oc; c++)
            for (int64_t a = 0; a < r; a++)
                for (int64_t b = 0; b < r; b++)
                    for (int64_t h = 0; h < s.h; h++)
                        for (int64_t w = 0; w < s.w; w++)
                            out.at(n, c, r * h + a, r * w + b) =
                                x.at(n, c * r * r + a * r + b, h, w);
    return out;
}

DTensor avg_pool2(const DTensor& x) {
    const Shape s = x.shape;
    DTensor out(Shape{s.n, s.c, s.h / 2, s.w / 2});
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++)
            for (int64_t h = 0; h < s.h / 2; h++)
                for (int64_t w = 0; w < s.w / 2; w++)
                    out.at(n, c, h, w) = 0.25 * (x.at(n, c, 2 * h, 2 * w) +
                                                 x.at(n, c, 2 * h, 2 * w + 1) +
                                                 x.at(n, c, 2 * h + 1, 2 * w) +
                                                 x.at(n, c, 2 * h + 1, 2 * w + 1));
    return out;
}

DTensor global_avg_pool(const DTensor& x) {
    const Shape s = x.shape;
    DTensor out(Shape{s.n, s.c, 1, 1});
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++) {
            double acc = 0.0;
            for (int64_t h = 0; h < s.h; h++)
                for (int64_t w = 0; w < s.w; w++) acc += x.at(n, c, h, w);
            out.at(n, c, 0, 0) = acc / double(s.h * s.w);
        }
    return out;
}

DTensor concat_channels(const std::vector<DTensor>& xs) {
    int64_t total_c = 0;
    for (const auto& x : xs) total_c += x.shape.c;
    const Shape s0 = xs[0].shape;
    DTensor out(Shape{s0.n, total_c, s0.h, s0.w});
    int64_t off = 0;
    for (const auto& x : xs) {
        for (int64_t n = 0; n < s0.n; n++)
            for (int64_t c = 0; c < x.shape.c; c++)
                for (int64_t h = 0; h < s0.h; h++)
                    for (int64_t w = 0; w < s0.w; w++)
                        out.at(n, off + c, h, w) = x.at(n, c, h, w);
        off += x.shape.c;
    }
    return out;
}

DTensor add(const DTensor& a, const DTensor& b) {
    DTensor out(a.shape);
    for (size_t i = 0; i < a.v.size(); i++) out.v[i] = a.v[i] + b.v[i];
    return out;
}

DTensor clamp(const DTensor& x, double lo, double hi) {
    DTensor out(x.shape);
    for (size_t i = 0; i < x.v.size(); i++) out.v[i] = std::min(hi, std::max(lo, x.v[i]));
    return out;
}

double l1(const DTensor& a, const DTensor& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.v.size(); i++) acc += std::abs(a.v[i] - b.v[i]);
    return acc / double(a.v.size());
}

double l2(const DTensor& a, const DTensor& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.v.size(); i++) {
        double d = a.v[i] - b.v[i];
        acc += d * d;
    }
    return acc / double(a.v.size());
}

double mean(const DTensor& x) {
    double acc = 0.0;
    for (double v : x.v) acc += v;
    return acc / double(x.v.size());
}

double d_loss(const DTensor& d_real, const DTensor& d_fake, double eps) {
    double acc = 0.0;
    for (double p : clamp(d_real, eps, 1.0 - eps).v) acc += std::log(p);
    double real = acc / double(d_real.v.size());
    acc = 0.0;
    for (double p : clamp(d_fake, eps, 1.0 - eps).v) acc += std::log(1.0 - p);
    double fake = acc / double(d_fake.v.size());
    return -(real + fake);
}

double g_adv_loss(const DTensor& d_fake, double eps) {
    double acc = 0.0;
    for (double p : clamp(d_fake, eps, 1.0 - eps).v) acc += std::log(p);
    return -acc / double(d_fake.v.size());
}

DTensor run_plan_ref(const DTensor& x, const std::vector<PlanStep>& plan,
                     const ParamStore& store) {
    DTensor cur = x;
    for (const auto& step : plan) {
        switch (step.kind) {
            case PlanStep::Kind::conv: {
                const DTensor w = DTensor::from(store.value(step.conv.weight_name));
                if (step.conv.bias_name.empty()) {
                    cur = conv2d(cur, w, nullptr, step.conv.stride, step.conv.pad,
                                 step.conv.groups);
                } else {
                    const DTensor b = DTensor::from(store.value(step.conv.bias_name));
                    cur = conv2d(cur, w, &b, step.conv.stride, step.conv.pad,
                                 step.conv.groups);
                }
                break;
            }
            case PlanStep::Kind::relu: cur = relu(cur); break;
            case PlanStep::Kind::leaky_relu: cur = leaky_relu(cur, step.slope); break;
            case PlanStep::Kind::sigmoid: cur = sigmoid(cur); break;
            case PlanStep::Kind::avg_pool2: cur = avg_pool2(cur); break;
            case PlanStep::Kind::global_avg_pool: cur = global_avg_pool(cur); break;
        }
    }
    return cur;
}

double fd_max_rel_error(const FdCase& c, double h) {
    std::vector<Var> leaves;
    leaves.reserve(c.inputs.size());
    for (const auto& t : c.inputs) leaves.push_back(Var::leaf(t, true));
    Var loss = c.build(leaves);
    backward(loss);

    std::vector<DTensor> dinputs;
    dinputs.reserve(c.inputs.size());
    for (const auto& t : c.inputs) dinputs.push_back(DTensor::from(t));

    const size_t stride = c.element_stride < 1 ? 1 : static_cast<size_t>(c.element_stride);
    double worst = 0.0;
    for (size_t i = 0; i < dinputs.size(); i++) {
        const Tensor& g = leaves[i].grad();
        for (size_t j = 0; j < dinputs[i].v.size(); j += stride) {
            const double orig = dinputs[i].v[j];
            dinputs[i].v[j] = orig + h;
            const double fp = c.eval(dinputs);
            dinputs[i].v[j] = orig - h;
            const double fm = c.eval(dinputs);
            dinputs[i].v[j] = orig;
            const double fd = (fp - fm) / (2.0 * h);
            const double ad = g.empty() ? 0.0 : double(g.v[j]);
            const double rel = std::abs(ad - fd) /
                               std::max({std::abs(ad), std::abs(fd), 1e-3});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

} // namespace pcarn::ref
