// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_TENSOR_HPP
#define PCARN_TENSOR_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pcarn {

// Rank-4 extents in NCHW order. All tensors in this project are rank 4;
// scalars are (1,1,1,1) and per-image scores are (N,1,1,1).
struct Shape {
    int64_t n = 0;
    int64_t c = 0;
    int64_t h = 0;
    int64_t w = 0;

    int64_t count() const { return n * c * h * w; }
    bool operator==(const Shape& o) const = default;
    std::string str() const;
};

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape s, float fill = 0.f)
        : shape(s), v(static_cast<size_t>(s.count()), fill) {}

    static Tensor from(Shape s, std::vector<float> data);
    static Tensor scalar(float value);

    float& at(int64_t n, int64_t c, int64_t h, int64_t w) {
        return v[static_cast<size_t>(((n * shape.c + c) * shape.h + h) * shape.w + w)];
    }
    float at(int64_t n, int64_t c, int64_t h, int64_t w) const {
        return v[static_cast<size_t>(((n * shape.c + c) * shape.h + h) * shape.w + w)];
    }

    int64_t count() const { return shape.count(); }
    bool empty() const { return v.empty(); }
    bool all_finite() const;

    float* data() { return v.data(); }
    const float* data() const { return v.data(); }

    Shape shape;
    std::vector<float> v;
};

} // namespace pcarn

#endif
