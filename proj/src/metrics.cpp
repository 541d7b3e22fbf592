// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pcarn {

namespace {

// (N,1,H,W) luminance plane in double; BT.601 for RGB.
std::vector<double> luminance(const Tensor& t) {
    const Shape s = t.shape;
    std::vector<double> y(static_cast<size_t>(s.n * s.h * s.w));
    if (s.c == 1) {
        for (size_t i = 0; i < y.size(); i++) y[i] = t.v[i];
    } else if (s.c == 3) {
        for (int64_t n = 0; n < s.n; n++)
            for (int64_t h = 0; h < s.h; h++)
                for (int64_t w = 0; w < s.w; w++)
                    y[static_cast<size_t>((n * s.h + h) * s.w + w)] =
                        0.299 * t.at(n, 0, h, w) + 0.587 * t.at(n, 1, h, w) +
                        0.114 * t.at(n, 2, h, w);
    } else {
        throw std::invalid_argument("ssim: expected 1 or 3 channels, got " + s.str());
    }
    return y;
}

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(static_cast<size_t>(size));
    const double c = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; i++) {
        w[static_cast<size_t>(i)] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
        sum += w[static_cast<size_t>(i)];
    }
    for (auto& x : w) x /= sum;
    return w;
}

} // namespace

double psnr(const Tensor& a, const Tensor& b, double peak) {
    if (a.shape != b.shape)
        throw std::invalid_argument("psnr: shape mismatch " + a.shape.str() + " vs " +
                                    b.shape.str());
    if (peak <= 0.0) throw std::invalid_argument("psnr: peak must be positive");
    double mse = 0.0;
    for (size_t i = 0; i < a.v.size(); i++) {
        const double d = double(a.v[i]) - double(b.v[i]);
        mse += d * d;
    }
    mse /= double(a.count());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const Tensor& a, const Tensor& b) {
    if (a.shape != b.shape)
        throw std::invalid_argument("ssim: shape mismatch " + a.shape.str() + " vs " +
                                    b.shape.str());
    const Shape s = a.shape;
    if (s.h < 8 || s.w < 8)
        throw std::invalid_argument("ssim: images must be at least 8x8, got " + s.str());

    int win = 11;
    const int64_t m = std::min(s.h, s.w);
    if (m < win) win = static_cast<int>(m % 2 == 0 ? m - 1 : m);
    const auto g = gaussian_window(win, 1.5);

    constexpr double kL = 1.0;
    const double c1 = (0.01 * kL) * (0.01 * kL);
    const double c2 = (0.03 * kL) * (0.03 * kL);

    const auto ya = luminance(a);
    const auto yb = luminance(b);

    double total = 0.0;
    int64_t windows = 0;
    const int64_t oh = s.h - win + 1, ow = s.w - win + 1;
    for (int64_t n = 0; n < s.n; n++) {
        const double* pa = &ya[static_cast<size_t>(n * s.h * s.w)];
        const double* pb = &yb[static_cast<size_t>(n * s.h * s.w)];
        // Separable weighted moments: filter rows, then columns.
        const int64_t rw = ow;
        std::vector<double> ma(static_cast<size_t>(s.h * rw)), mb(ma.size()),
            maa(ma.size()), mbb(ma.size()), mab(ma.size());
        for (int64_t y = 0; y < s.h; y++)
            for (int64_t x = 0; x < rw; x++) {
                double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
                for (int i = 0; i < win; i++) {
                    const double va = pa[y * s.w + x + i], vb = pb[y * s.w + x + i];
                    sa += g[size_t(i)] * va;
                    sb += g[size_t(i)] * vb;
                    saa += g[size_t(i)] * va * va;
                    sbb += g[size_t(i)] * vb * vb;
                    sab += g[size_t(i)] * va * vb;
                }
                const size_t o = static_cast<size_t>(y * rw + x);
                ma[o] = sa; mb[o] = sb; maa[o] = saa; mbb[o] = sbb; mab[o] = sab;
            }
        for (int64_t y = 0; y < oh; y++)
            for (int64_t x = 0; x < ow; x++) {
                double mu_a = 0, mu_b = 0, raw_aa = 0, raw_bb = 0, raw_ab = 0;
                for (int i = 0; i < win; i++) {
                    const size_t o = static_cast<size_t>((y + i) * rw + x);
                    mu_a += g[size_t(i)] * ma[o];
                    mu_b += g[size_t(i)] * mb[o];
                    raw_aa += g[size_t(i)] * maa[o];
                    raw_bb += g[size_t(i)] * mbb[o];
                    raw_ab += g[size_t(i)] * mab[o];
                }
                const double var_a = raw_aa - mu_a * mu_a;
                const double var_b = raw_bb - mu_b * mu_b;
                const double cov = raw_ab - mu_a * mu_b;
                const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
                const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                total += num / den;
                windows++;
            }
    }
    return total / double(windows);
}

} // namespace pcarn
