// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Central finite-difference suite: every differentiable op, at least three
// randomized shapes each. Non-scalar ops are reduced through l2 against a
// fixed random target so rearrangement bugs cannot cancel out. Values near
// kinks (relu at 0, l1 at ties) are kept out of the +-h window.

#include <cmath>

#include "pcarn/refcheck.hpp"

namespace pcarn::ref {

namespace {

Tensor rand_tensor(Rng& rng, Shape s, double lo, double hi) {
    Tensor t(s);
    for (auto& v : t.v) v = static_cast<float>(rng.uniform(lo, hi));
    return t;
}

// Magnitudes in [margin, margin+1) with random sign.
Tensor rand_signed(Rng& rng, Shape s, double margin) {
    Tensor t(s);
    for (auto& v : t.v) {
        const double m = margin + rng.uniform01();
        v = static_cast<float>(rng.coin() ? m : -m);
    }
    return t;
}

struct CaseSet {
    std::vector<FdCase> cases;

    // Unary elementwise op reduced through l2 against a fixed target.
    void unary(const std::string& name, Rng& rng, Shape s, double margin,
               std::function<Var(const Var&)> op,
               std::function<DTensor(const DTensor&)> ref_op) {
        FdCase c;
        c.name = name;
        c.inputs = {margin > 0 ? rand_signed(rng, s, margin) : rand_tensor(rng, s, -2, 2)};
        Shape out_shape = ref_op(DTensor::from(c.inputs[0])).shape;
        Tensor target = rand_tensor(rng, out_shape, -1, 1);
        const DTensor dtarget = DTensor::from(target);
        c.build = [op, target](const std::vector<Var>& in) {
            return l2_loss(op(in[0]), constant(target));
        };
        c.eval = [ref_op, dtarget](const std::vector<DTensor>& in) {
            return l2(ref_op(in[0]), dtarget);
        };
        cases.push_back(std::move(c));
    }
};

} // namespace

std::vector<FdReport> gradcheck_suite(uint64_t seed, double tol) {
    Rng rng(seed);
    CaseSet set;

    // conv2d, ungrouped (input, weight and bias all checked).
    {
        struct Cfg {
            Shape x, w;
            int stride, pad;
        };
        const Cfg cfgs[] = {
            {{2, 3, 6, 5}, {4, 3, 3, 3}, 1, 1},
            {{1, 2, 7, 7}, {3, 2, 3, 3}, 2, 1},
            {{2, 4, 5, 5}, {2, 4, 5, 5}, 1, 2},
        };
        for (const auto& cfg : cfgs) {
            FdCase c;
            c.name = "conv2d";
            c.inputs = {rand_tensor(rng, cfg.x, -1, 1), rand_tensor(rng, cfg.w, -1, 1),
                        rand_tensor(rng, Shape{1, cfg.w.n, 1, 1}, -0.5, 0.5)};
            const int stride = cfg.stride, pad = cfg.pad;
            DTensor probe = conv2d(DTensor::from(c.inputs[0]), DTensor::from(c.inputs[1]),
                                   nullptr, stride, pad, 1);
            Tensor target = rand_tensor(rng, probe.shape, -1, 1);
            const DTensor dt = DTensor::from(target);
            c.build = [stride, pad, target](const std::vector<Var>& in) {
                return l2_loss(conv2d(in[0], in[1], &in[2], stride, pad, 1),
                               constant(target));
            };
            c.eval = [stride, pad, dt](const std::vector<DTensor>& in) {
                return l2(conv2d(in[0], in[1], &in[2], stride, pad, 1), dt);
            };
            set.cases.push_back(std::move(c));
        }
    }

    // conv2d, grouped.
    {
        struct Cfg {
            Shape x, w;
            int groups;
        };
        const Cfg cfgs[] = {
            {{2, 4, 6, 6}, {6, 2, 3, 3}, 2},
            {{1, 8, 5, 5}, {8, 2, 3, 3}, 4},
            {{2, 6, 4, 4}, {6, 1, 3, 3}, 6},
        };
        for (const auto& cfg : cfgs) {
            FdCase c;
            c.name = "conv2d_grouped";
            c.inputs = {rand_tensor(rng, cfg.x, -1, 1), rand_tensor(rng, cfg.w, -1, 1),
                        rand_tensor(rng, Shape{1, cfg.w.n, 1, 1}, -0.5, 0.5)};
            const int groups = cfg.groups;
            DTensor probe = conv2d(DTensor::from(c.inputs[0]), DTensor::from(c.inputs[1]),
                                   nullptr, 1, 1, groups);
            Tensor target = rand_tensor(rng, probe.shape, -1, 1);
            const DTensor dt = DTensor::from(target);
            c.build = [groups, target](const std::vector<Var>& in) {
                return l2_loss(conv2d(in[0], in[1], &in[2], 1, 1, groups),
                               constant(target));
            };
            c.eval = [groups, dt](const std::vector<DTensor>& in) {
                return l2(conv2d(in[0], in[1], &in[2], 1, 1, groups), dt);
            };
            set.cases.push_back(std::move(c));
        }
    }

    // 1x1 conv (fusion layers).
    {
        const Shape xs[] = {{2, 5, 4, 6}, {1, 8, 3, 3}, {3, 2, 5, 4}};
        const int couts[] = {3, 4, 2};
        for (int i = 0; i < 3; i++) {
            FdCase c;
            c.name = "conv2d_1x1";
            c.inputs = {rand_tensor(rng, xs[i], -1, 1),
                        rand_tensor(rng, Shape{couts[i], xs[i].c, 1, 1}, -1, 1),
                        rand_tensor(rng, Shape{1, couts[i], 1, 1}, -0.5, 0.5)};
            Tensor target =
                rand_tensor(rng, Shape{xs[i].n, couts[i], xs[i].h, xs[i].w}, -1, 1);
            const DTensor dt = DTensor::from(target);
            c.build = [target](const std::vector<Var>& in) {
                return l2_loss(conv2d(in[0], in[1], &in[2], 1, 0, 1), constant(target));
            };
            c.eval = [dt](const std::vector<DTensor>& in) {
                return l2(conv2d(in[0], in[1], &in[2], 1, 0, 1), dt);
            };
            set.cases.push_back(std::move(c));
        }
    }

    for (Shape s : {Shape{1, 2, 3, 4}, Shape{2, 1, 5, 5}, Shape{1, 4, 2, 6}})
        set.unary("relu", rng, s, 0.05, [](const Var& x) { return relu(x); },
                  [](const DTensor& x) { return relu(x); });
    for (Shape s : {Shape{1, 3, 4, 4}, Shape{2, 2, 3, 5}, Shape{1, 1, 6, 6}})
        set.unary("leaky_relu", rng, s, 0.05,
                  [](const Var& x) { return leaky_relu(x, 0.2f); },
                  [](const DTensor& x) { return leaky_relu(x, 0.2); });
    for (Shape s : {Shape{1, 2, 4, 3}, Shape{2, 3, 2, 2}, Shape{1, 1, 5, 7}})
        set.unary("sigmoid", rng, s, 0.0, [](const Var& x) { return sigmoid(x); },
                  [](const DTensor& x) { return sigmoid(x); });

    {
        struct Cfg {
            Shape s;
            int r;
        };
        for (const Cfg& cfg : {Cfg{{1, 8, 3, 4}, 2}, Cfg{{2, 9, 2, 2}, 3}, Cfg{{1, 4, 5, 3}, 2}})
            set.unary("pixel_shuffle", rng, cfg.s, 0.0,
                      [r = cfg.r](const Var& x) { return pixel_shuffle(x, r); },
                      [r = cfg.r](const DTensor& x) { return pixel_shuffle(x, r); });
    }

    for (Shape s : {Shape{1, 3, 4, 6}, Shape{2, 2, 8, 4}, Shape{1, 1, 6, 6}})
        set.unary("avg_pool2", rng, s, 0.0, [](const Var& x) { return avg_pool2(x); },
                  [](const DTensor& x) { return avg_pool2(x); });
    for (Shape s : {Shape{1, 3, 4, 4}, Shape{2, 5, 3, 6}, Shape{3, 1, 5, 5}})
        set.unary("global_avg_pool", rng, s, 0.0,
                  [](const Var& x) { return global_avg_pool(x); },
                  [](const DTensor& x) { return global_avg_pool(x); });

    // concat_channels of three tensors.
    {
        struct Cfg {
            Shape a, b, c;
        };
        const Cfg cfgs[] = {
            {{1, 2, 3, 4}, {1, 3, 3, 4}, {1, 1, 3, 4}},
            {{2, 1, 2, 2}, {2, 2, 2, 2}, {2, 4, 2, 2}},
            {{1, 5, 4, 2}, {1, 1, 4, 2}, {1, 2, 4, 2}},
        };
        for (const auto& cfg : cfgs) {
            FdCase c;
            c.name = "concat_channels";
            c.inputs = {rand_tensor(rng, cfg.a, -1, 1), rand_tensor(rng, cfg.b, -1, 1),
                        rand_tensor(rng, cfg.c, -1, 1)};
            Tensor target = rand_tensor(
                rng, Shape{cfg.a.n, cfg.a.c + cfg.b.c + cfg.c.c, cfg.a.h, cfg.a.w}, -1, 1);
            const DTensor dt = DTensor::from(target);
            c.build = [target](const std::vector<Var>& in) {
                return l2_loss(pcarn::concat_channels(
                                   std::vector<Var>{in[0], in[1], in[2]}),
                               constant(target));
            };
            c.eval = [dt](const std::vector<DTensor>& in) {
                return l2(concat_channels(std::vector<DTensor>{in[0], in[1], in[2]}), dt);
            };
            set.cases.push_back(std::move(c));
        }
    }

    // add, l1, l2 over tensor pairs.
    for (Shape s : {Shape{1, 3, 4, 4}, Shape{2, 2, 5, 3}, Shape{1, 1, 7, 2}}) {
        {
            FdCase c;
            c.name = "add";
            c.inputs = {rand_tensor(rng, s, -1, 1), rand_tensor(rng, s, -1, 1)};
            Tensor target = rand_tensor(rng, s, -1, 1);
            const DTensor dt = DTensor::from(target);
            c.build = [target](const std::vector<Var>& in) {
                return l2_loss(add(in[0], in[1]), constant(target));
            };
            c.eval = [dt](const std::vector<DTensor>& in) {
                return l2(add(in[0], in[1]), dt);
            };
            set.cases.push_back(std::move(c));
        }
        {
            FdCase c;
            c.name = "l1_loss";
            // keep |a-b| > 2h so the sign is stable under perturbation
            Tensor a = rand_tensor(rng, s, -1, 1);
            Tensor b = a;
            for (auto& v : b.v) {
                const double off = 0.05 + rng.uniform01();
                v += static_cast<float>(rng.coin() ? off : -off);
            }
            c.inputs = {a, b};
            c.build = [](const std::vector<Var>& in) { return l1_loss(in[0], in[1]); };
            c.eval = [](const std::vector<DTensor>& in) { return l1(in[0], in[1]); };
            set.cases.push_back(std::move(c));
        }
        {
            FdCase c;
            c.name = "l2_loss";
            c.inputs = {rand_tensor(rng, s, -1, 1), rand_tensor(rng, s, -1, 1)};
            c.build = [](const std::vector<Var>& in) { return l2_loss(in[0], in[1]); };
            c.eval = [](const std::vector<DTensor>& in) { return l2(in[0], in[1]); };
            set.cases.push_back(std::move(c));
        }
    }

    // Adversarial losses on probability vectors.
    for (int64_t n : {1, 3, 5}) {
        constexpr double eps = 1e-7;
        {
            FdCase c;
            c.name = "adversarial_d_loss";
            c.inputs = {rand_tensor(rng, Shape{n, 1, 1, 1}, 0.15, 0.85),
                        rand_tensor(rng, Shape{n, 1, 1, 1}, 0.15, 0.85)};
            c.build = [](const std::vector<Var>& in) {
                return adversarial_losses(in[0], in[1]).first;
            };
            c.eval = [](const std::vector<DTensor>& in) {
                return d_loss(in[0], in[1], eps);
            };
            set.cases.push_back(std::move(c));
        }
        {
            FdCase c;
            c.name = "adversarial_g_loss";
            c.inputs = {rand_tensor(rng, Shape{n, 1, 1, 1}, 0.15, 0.85),
                        rand_tensor(rng, Shape{n, 1, 1, 1}, 0.15, 0.85)};
            c.build = [](const std::vector<Var>& in) {
                return adversarial_losses(in[0], in[1]).second;
            };
            c.eval = [](const std::vector<DTensor>& in) {
                return g_adv_loss(in[1], eps);
            };
            set.cases.push_back(std::move(c));
        }
    }

    // Perceptual loss through the frozen extractor (gradient w.r.t. sr).
    {
        auto fx = std::make_shared<FeatureExtractor>(FeatureExtractor::build(17));
        const Shape shapes[] = {{1, 3, 16, 16}, {1, 3, 16, 32}, {1, 3, 32, 16}};
        for (const Shape& s : shapes) {
            FdCase c;
            c.name = "perceptual_loss";
            c.inputs = {rand_tensor(rng, s, 0, 1)};
            Tensor hr = rand_tensor(rng, s, 0, 1);
            const DTensor phi_hr =
                run_plan_ref(DTensor::from(hr), fx->plan(), fx->params());
            c.build = [fx, hr](const std::vector<Var>& in) {
                return perceptual_loss(*fx, in[0], constant(hr));
            };
            c.eval = [fx, phi_hr](const std::vector<DTensor>& in) {
                return l2(run_plan_ref(in[0], fx->plan(), fx->params()), phi_hr);
            };
            c.element_stride = 11;
            set.cases.push_back(std::move(c));
        }
    }

    // Aggregate per op name, worst case wins.
    std::vector<FdReport> reports;
    for (auto& c : set.cases) {
        const double err = fd_max_rel_error(c);
        auto it = std::find_if(reports.begin(), reports.end(),
                               [&](const FdReport& r) { return r.name == c.name; });
        if (it == reports.end()) {
            reports.push_back({c.name, err, err < tol});
        } else {
            it->max_rel_err = std::max(it->max_rel_err, err);
            it->pass = it->max_rel_err < tol;
        }
    }
    return reports;
}

} // namespace pcarn::ref
