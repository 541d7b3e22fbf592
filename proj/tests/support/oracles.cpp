// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pcarn::testsupport {

namespace {

double keys_cubic(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

int64_t iclamp(int64_t i, int64_t n) { return std::clamp<int64_t>(i, 0, n - 1); }

} // namespace

Tensor bicubic_direct(const Tensor& src, int64_t out_h, int64_t out_w) {
    const Shape s = src.shape;
    const double sy = double(s.h) / double(out_h);
    const double sx = double(s.w) / double(out_w);
    const double ky = std::max(sy, 1.0), kx = std::max(sx, 1.0);
    const int64_t ry = static_cast<int64_t>(std::ceil(2.0 * ky));
    const int64_t rx = static_cast<int64_t>(std::ceil(2.0 * kx));

    Tensor out(Shape{s.n, s.c, out_h, out_w});
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t c = 0; c < s.c; c++)
            for (int64_t oy = 0; oy < out_h; oy++)
                for (int64_t ox = 0; ox < out_w; ox++) {
                    const double cy = (double(oy) + 0.5) * sy - 0.5;
                    const double cx = (double(ox) + 0.5) * sx - 0.5;
                    const int64_t y0 = static_cast<int64_t>(std::floor(cy)) - ry + 1;
                    const int64_t x0 = static_cast<int64_t>(std::floor(cx)) - rx + 1;
                    double acc = 0.0, wsum = 0.0;
                    for (int64_t y = y0; y <= y0 + 2 * ry - 1; y++)
                        for (int64_t x = x0; x <= x0 + 2 * rx - 1; x++) {
                            const double w = keys_cubic((cy - double(y)) / ky) *
                                             keys_cubic((cx - double(x)) / kx);
                            if (w == 0.0) continue;
                            acc += w * src.at(n, c, iclamp(y, s.h), iclamp(x, s.w));
                            wsum += w;
                        }
                    out.at(n, c, oy, ox) = static_cast<float>(acc / wsum);
                }
    return out;
}

double ssim_direct(const Tensor& a, const Tensor& b) {
    const Shape s = a.shape;
    if (s.h < 11 || s.w < 11)
        throw std::invalid_argument("ssim_direct: needs at least 11x11 images");
    constexpr int win = 11;
    constexpr double sigma = 1.5;
    constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;

    // 2-D Gaussian window, normalized over the whole square.
    double g[win][win];
    double gsum = 0.0;
    for (int i = 0; i < win; i++)
        for (int j = 0; j < win; j++) {
            const double dy = i - (win - 1) / 2.0, dx = j - (win - 1) / 2.0;
            g[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            gsum += g[i][j];
        }
    for (auto& row : g)
        for (auto& v : row) v /= gsum;

    auto luma = [&](const Tensor& t, int64_t n, int64_t y, int64_t x) {
        if (t.shape.c == 1) return double(t.at(n, 0, y, x));
        return 0.299 * t.at(n, 0, y, x) + 0.587 * t.at(n, 1, y, x) +
               0.114 * t.at(n, 2, y, x);
    };

    double total = 0.0;
    int64_t count = 0;
    for (int64_t n = 0; n < s.n; n++)
        for (int64_t y = 0; y + win <= s.h; y++)
            for (int64_t x = 0; x + win <= s.w; x++) {
                double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
                for (int i = 0; i < win; i++)
                    for (int j = 0; j < win; j++) {
                        const double va = luma(a, n, y + i, x + j);
                        const double vb = luma(b, n, y + i, x + j);
                        mu_a += g[i][j] * va;
                        mu_b += g[i][j] * vb;
                        aa += g[i][j] * va * va;
                        bb += g[i][j] * vb * vb;
                        ab += g[i][j] * va * vb;
                    }
                const double var_a = aa - mu_a * mu_a;
                const double var_b = bb - mu_b * mu_b;
                const double cov = ab - mu_a * mu_b;
                total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
                count++;
            }
    return total / double(count);
}

Tensor make_shape_image(Rng& rng, int64_t h, int64_t w) {
    Tensor img(Shape{1, 3, h, w});
    float base[3];
    float gx[3], gy[3];
    for (int c = 0; c < 3; c++) {
        base[c] = static_cast<float>(rng.uniform(0.1, 0.9));
        gx[c] = static_cast<float>(rng.uniform(-0.3, 0.3));
        gy[c] = static_cast<float>(rng.uniform(-0.3, 0.3));
    }
    for (int64_t y = 0; y < h; y++)
        for (int64_t x = 0; x < w; x++)
            for (int64_t c = 0; c < 3; c++) {
                float v = base[c] + gx[c] * float(x) / float(w) + gy[c] * float(y) / float(h);
                img.at(0, c, y, x) = std::clamp(v, 0.f, 1.f);
            }

    const int rects = 4 + static_cast<int>(rng.below(4));
    for (int k = 0; k < rects; k++) {
        const int64_t rw = 4 + rng.below(static_cast<uint32_t>(w / 2));
        const int64_t rh = 4 + rng.below(static_cast<uint32_t>(h / 2));
        const int64_t x0 = rng.below(static_cast<uint32_t>(w - rw));
        const int64_t y0 = rng.below(static_cast<uint32_t>(h - rh));
        float col[3];
        for (auto& c : col) c = static_cast<float>(rng.uniform01());
        for (int64_t y = y0; y < y0 + rh; y++)
            for (int64_t x = x0; x < x0 + rw; x++)
                for (int64_t c = 0; c < 3; c++) img.at(0, c, y, x) = col[c];
    }
    const int circles = 2 + static_cast<int>(rng.below(3));
    for (int k = 0; k < circles; k++) {
        const int64_t r = 3 + rng.below(static_cast<uint32_t>(std::min(h, w) / 4));
        const int64_t cx = rng.below(static_cast<uint32_t>(w));
        const int64_t cy = rng.below(static_cast<uint32_t>(h));
        float col[3];
        for (auto& c : col) c = static_cast<float>(rng.uniform01());
        for (int64_t y = std::max<int64_t>(0, cy - r); y < std::min(h, cy + r + 1); y++)
            for (int64_t x = std::max<int64_t>(0, cx - r); x < std::min(w, cx + r + 1); x++)
                if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r)
                    for (int64_t c = 0; c < 3; c++) img.at(0, c, y, x) = col[c];
    }
    return img;
}

} // namespace pcarn::testsupport
