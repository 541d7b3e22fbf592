// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/tensor.hpp"

#include <cmath>
#include <stdexcept>

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace pcarn {

namespace {

// Activation tensors run to a few MB and are reallocated every step; with
// the default mmap threshold glibc hands them back to the kernel on free and
// every reuse pays fresh zero pages. Keep them on the heap instead.
struct MallocTuning {
    MallocTuning() {
#ifdef __GLIBC__
        mallopt(M_MMAP_THRESHOLD, 256 * 1024 * 1024);
        mallopt(M_TRIM_THRESHOLD, 256 * 1024 * 1024);
#endif
    }
};
const MallocTuning g_malloc_tuning;

} // namespace

std::string Shape::str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
           std::to_string(h) + "," + std::to_string(w) + ")";
}

Tensor Tensor::from(Shape s, std::vector<float> data) {
    if (static_cast<int64_t>(data.size()) != s.count())
        throw std::invalid_argument("Tensor::from: " + std::to_string(data.size()) +
                                    " values for shape " + s.str());
    Tensor t;
    t.shape = s;
    t.v = std::move(data);
    return t;
}

Tensor Tensor::scalar(float value) {
    Tensor t(Shape{1, 1, 1, 1});
    t.v[0] = value;
    return t;
}

bool Tensor::all_finite() const {
    for (float x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace pcarn
