// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pcarn {

namespace {

double cubic_kernel(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

struct Taps {
    int64_t start;
    std::vector<double> weights;
};

// Per-output-position taps along one axis. kscale = max(in/out, 1) widens the
// kernel when shrinking; indices are clamped later, weights normalized here.
std::vector<Taps> make_taps(int64_t in, int64_t out) {
    const double scale = double(in) / double(out);
    const double kscale = std::max(scale, 1.0);
    const int64_t support = static_cast<int64_t>(std::ceil(2.0 * kscale));
    std::vector<Taps> taps(static_cast<size_t>(out));
    for (int64_t i = 0; i < out; i++) {
        const double center = (double(i) + 0.5) * scale - 0.5;
        const int64_t lo = static_cast<int64_t>(std::floor(center)) - support + 1;
        const int64_t hi = static_cast<int64_t>(std::floor(center)) + support;
        Taps t;
        t.start = lo;
        t.weights.resize(static_cast<size_t>(hi - lo + 1));
        double sum = 0.0;
        for (int64_t u = lo; u <= hi; u++) {
            const double w = cubic_kernel((center - double(u)) / kscale) / kscale;
            t.weights[static_cast<size_t>(u - lo)] = w;
            sum += w;
        }
        for (auto& w : t.weights) w /= sum;
        taps[static_cast<size_t>(i)] = std::move(t);
    }
    return taps;
}

int64_t clamp_index(int64_t i, int64_t n) { return std::clamp<int64_t>(i, 0, n - 1); }

} // namespace

Tensor bicubic_resize(const Tensor& src, int64_t out_h, int64_t out_w) {
    const Shape s = src.shape;
    if (out_h < 1 || out_w < 1)
        throw std::invalid_argument("bicubic_resize: output extents must be positive");
    const auto taps_h = make_taps(s.h, out_h);
    const auto taps_w = make_taps(s.w, out_w);

    // Horizontal pass, then vertical, accumulating in double.
    std::vector<double> mid(static_cast<size_t>(s.n * s.c * s.h * out_w));
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++)
            for (int64_t y = 0; y < s.h; y++) {
                const float* row = &src.v[((n * s.c + c) * s.h + y) * s.w];
                double* out_row = &mid[(((n * s.c + c) * s.h + y) * out_w)];
                for (int64_t x = 0; x < out_w; x++) {
                    const Taps& t = taps_w[static_cast<size_t>(x)];
                    double acc = 0.0;
                    for (size_t j = 0; j < t.weights.size(); j++)
                        acc += t.weights[j] *
                               row[clamp_index(t.start + int64_t(j), s.w)];
                    out_row[x] = acc;
                }
            }

    Tensor out(Shape{s.n, s.c, out_h, out_w});
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++)
            for (int64_t y = 0; y < out_h; y++) {
                const Taps& t = taps_h[static_cast<size_t>(y)];
                float* out_row = &out.v[((n * s.c + c) * out_h + y) * out_w];
                for (int64_t x = 0; x < out_w; x++) {
                    double acc = 0.0;
                    for (size_t j = 0; j < t.weights.size(); j++)
                        acc += t.weights[j] *
                               mid[((n * s.c + c) * s.h +
                                    clamp_index(t.start + int64_t(j), s.h)) * out_w + x];
                    out_row[x] = static_cast<float>(acc);
                }
            }
    return out;
}

Tensor degrade_bicubic(const Tensor& hr, int r) {
    if (r < 1) throw std::invalid_argument("degrade_bicubic: r must be >= 1");
    const Shape s = hr.shape;
    if (s.h % r != 0 || s.w % r != 0)
        throw std::invalid_argument("degrade_bicubic: extents " + s.str() +
                                    " not divisible by r=" + std::to_string(r));
    return bicubic_resize(hr, s.h / r, s.w / r);
}

Tensor crop(const Tensor& t, int64_t y0, int64_t x0, int64_t h, int64_t w) {
    const Shape s = t.shape;
    if (y0 < 0 || x0 < 0 || y0 + h > s.h || x0 + w > s.w)
        throw std::invalid_argument("crop: window out of range");
    Tensor out(Shape{s.n, s.c, h, w});
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++)
            for (int64_t y = 0; y < h; y++)
                for (int64_t x = 0; x < w; x++)
                    out.at(n, c, y, x) = t.at(n, c, y0 + y, x0 + x);
    return out;
}

Tensor hflip(const Tensor& t) {
    const Shape s = t.shape;
    Tensor out(s);
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++)
            for (int64_t y = 0; y < s.h; y++)
                for (int64_t x = 0; x < s.w; x++)
                    out.at(n, c, y, x) = t.at(n, c, y, s.w - 1 - x);
    return out;
}

Tensor rot90(const Tensor& t, int quarter_turns) {
    int k = ((quarter_turns % 4) + 4) % 4;
    Tensor cur = t;
    while (k-- > 0) {
        const Shape s = cur.shape;
        Tensor out(Shape{s.n, s.c, s.w, s.h});
        for (int64_t n = 0; n < s.n; n++)
            for (int64_t c = 0; c < s.c; c++)
                for (int64_t y = 0; y < s.h; y++)
                    for (int64_t x = 0; x < s.w; x++)
                        out.at(n, c, s.w - 1 - x, y) = cur.at(n, c, y, x);
        cur = std::move(out);
    }
    return cur;
}

} // namespace pcarn
