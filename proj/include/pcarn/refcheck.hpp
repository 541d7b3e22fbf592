// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Double-precision reference implementations, written as plain nested loops
// with no shared code with the production ops, plus the central
// finite-difference gradient checker built on them. Deliberately slow.

#ifndef PCARN_REFCHECK_HPP
#define PCARN_REFCHECK_HPP

#include <functional>
#include <string>
#include <vector>

#include "pcarn/adversarial.hpp"
#include "pcarn/autodiff.hpp"
#include "pcarn/params.hpp"
#include "pcarn/tensor.hpp"

namespace pcarn::ref {

struct DTensor {
    Shape shape;
    std::vector<double> v;

    DTensor() = default;
    explicit DTensor(Shape s, double fill = 0.0)
        : shape(s), v(static_cast<size_t>(s.count()), fill) {}
    static DTensor from(const Tensor& t);
    Tensor to_float() const;

    double& at(int64_t n, int64_t c, int64_t h, int64_t w) {
        return v[static_cast<size_t>(((n * shape.c + c) * shape.h + h) * shape.w + w)];
    }
    double at(int64_t n, int64_t c, int64_t h, int64_t w) const {
        return v[static_cast<size_t>(((n * shape.c + c) * shape.h + h) * shape.w + w)];
    }
};

DTensor conv2d(const DTensor& x, const DTensor& w, const DTensor* bias,
               int stride, int pad, int groups);
DTensor relu(const DTensor& x);
DTensor leaky_relu(const DTensor& x, double slope);
DTensor sigmoid(const DTensor& x);
DTensor pixel_shuffle(const DTensor& x, int r);
DTensor avg_pool2(const DTensor& x);
DTensor global_avg_pool(const DTensor& x);
DTensor concat_channels(const std::vector<DTensor>& xs);
DTensor add(const DTensor& a, const DTensor& b);
DTensor clamp(const DTensor& x, double lo, double hi);
double l1(const DTensor& a, const DTensor& b);
double l2(const DTensor& a, const DTensor& b);
double mean(const DTensor& x);
// Eq.-style discriminator / generator objectives on probability vectors.
double d_loss(const DTensor& d_real, const DTensor& d_fake, double eps);
double g_adv_loss(const DTensor& d_fake, double eps);

// Double-precision walk of an interpreted layer plan (discriminator /
// feature-extractor topologies), weights taken from the store.
DTensor run_plan_ref(const DTensor& x, const std::vector<PlanStep>& plan,
                     const ParamStore& store);

// --- finite differences -----------------------------------------------------

struct FdCase {
    std::string name;
    std::vector<Tensor> inputs;
    // Production graph from leaves to a scalar loss.
    std::function<Var(const std::vector<Var>&)> build;
    // Same function evaluated in double precision.
    std::function<double(const std::vector<DTensor>&)> eval;
    // Check every stride-th element (1 = all); keeps wide cases affordable.
    int element_stride = 1;
};

// Max relative error between autodiff gradients and central differences
// (step h) of `eval`, over every element of every input.
double fd_max_rel_error(const FdCase& c, double h = 1e-3);

struct FdReport {
    std::string name;
    double max_rel_err = 0.0;
    bool pass = false;
};

// The full differentiable-op suite: >=3 randomized shapes per op, seeded and
// reproducible. tol is the pass threshold on the relative error.
std::vector<FdReport> gradcheck_suite(uint64_t seed, double tol = 1e-4);

} // namespace pcarn::ref

#endif
