// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/init.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pcarn {

InitScheme::InitScheme(Family f, Bound b, double m)
    : family(f), bound(b), multiplier(m) {
    const bool family_ok = (f == Family::normal && b == Bound::sqrt2_over_f) ||
                           (f == Family::uniform && (b == Bound::sqrt6_over_f ||
                                                     b == Bound::sqrt1_over_f));
    if (!family_ok)
        throw std::invalid_argument("InitScheme: invalid family/bound combination");
    if (m != 0.1 && m != 1.0)
        throw std::invalid_argument("InitScheme: multiplier must be 0.1 or 1.0");
}

double InitScheme::bound_value(int64_t fan_in) const {
    switch (bound) {
        case Bound::sqrt2_over_f: return std::sqrt(2.0 / double(fan_in));
        case Bound::sqrt6_over_f: return std::sqrt(6.0 / double(fan_in));
        case Bound::sqrt1_over_f: return std::sqrt(1.0 / double(fan_in));
    }
    return 0.0;
}

double InitScheme::draw(Rng& rng, int64_t fan_in) const {
    const double b = multiplier * bound_value(fan_in);
    if (family == Family::normal) return rng.normal(0.0, b);
    return rng.uniform(-b, b);
}

std::string InitScheme::str() const {
    std::string s = multiplier == 0.1 ? "0.1x" : "1.0x";
    s += family == Family::normal ? "N(" : "U(";
    switch (bound) {
        case Bound::sqrt2_over_f: s += "2/F)"; break;
        case Bound::sqrt6_over_f: s += "6/F)"; break;
        case Bound::sqrt1_over_f: s += "1/F)"; break;
    }
    return s;
}

InitScheme InitScheme::parse(const std::string& text) {
    for (const auto& s : all())
        if (s.str() == text) return s;
    throw std::invalid_argument("InitScheme: unknown scheme '" + text +
                                "' (expect e.g. \"1.0xU(1/F)\")");
}

const std::array<InitScheme, 6>& InitScheme::all() {
    static const std::array<InitScheme, 6> schemes = {
        InitScheme(Family::normal, Bound::sqrt2_over_f, 0.1),
        InitScheme(Family::normal, Bound::sqrt2_over_f, 1.0),
        InitScheme(Family::uniform, Bound::sqrt6_over_f, 0.1),
        InitScheme(Family::uniform, Bound::sqrt6_over_f, 1.0),
        InitScheme(Family::uniform, Bound::sqrt1_over_f, 0.1),
        InitScheme(Family::uniform, Bound::sqrt1_over_f, 1.0),
    };
    return schemes;
}

InitScheme InitScheme::defaults() {
    return InitScheme(Family::uniform, Bound::sqrt1_over_f, 1.0);
}

Tensor init_params(const InitScheme& scheme, Shape shape, Rng& rng) {
    const int64_t fan_in = shape.c * shape.h * shape.w;
    if (fan_in <= 0)
        throw std::invalid_argument("init_params: zero fan-in for shape " + shape.str());
    Tensor t(shape);
    for (auto& v : t.v) v = static_cast<float>(scheme.draw(rng, fan_in));
    return t;
}

Tensor init_params(const InitScheme& scheme, Shape shape, uint64_t seed) {
    Rng rng(seed);
    return init_params(scheme, shape, rng);
}

double Histogram::bin_width() const {
    return counts.empty() ? 0.0 : (hi - lo) / double(counts.size());
}

double Histogram::bin_center(size_t i) const {
    return lo + (double(i) + 0.5) * bin_width();
}

std::string Histogram::render() const {
    std::string out;
    char line[64];
    for (size_t i = 0; i < counts.size(); i++) {
        std::snprintf(line, sizeof line, "%.9g %lld\n", bin_center(i),
                      static_cast<long long>(counts[i]));
        out += line;
    }
    return out;
}

Histogram init_histogram(const ParamStore& store, int bins, int64_t sample_cap) {
    if (bins < 1) throw std::invalid_argument("init_histogram: bins must be >= 1");
    if (sample_cap < 1) throw std::invalid_argument("init_histogram: sample_cap must be >= 1");
    const int64_t total = store.param_count();
    if (total == 0) throw std::invalid_argument("init_histogram: empty parameter store");

    const int64_t take = std::min(sample_cap, total);
    const int64_t step = total / take;
    std::vector<double> sample;
    sample.reserve(static_cast<size_t>(take));
    // Flat index over canonical entries in registration order.
    int64_t next = 0, flat = 0;
    for (const auto& e : store.entries()) {
        for (float v : e.value.v) {
            if (flat == next && static_cast<int64_t>(sample.size()) < take) {
                sample.push_back(v);
                next += step;
            }
            flat++;
        }
    }

    Histogram h;
    h.sampled = static_cast<int64_t>(sample.size());
    auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    h.lo = *mn;
    h.hi = *mx;
    h.counts.assign(static_cast<size_t>(bins), 0);
    const double width = (h.hi - h.lo) / double(bins);
    for (double v : sample) {
        int64_t b = width > 0.0 ? static_cast<int64_t>((v - h.lo) / width) : 0;
        b = std::clamp<int64_t>(b, 0, bins - 1);
        h.counts[static_cast<size_t>(b)]++;
    }
    return h;
}

Var Conv2dLayer::operator()(ParamBinding& params, const Var& x) const {
    Var w = params(weight_name);
    if (bias_name.empty()) return conv2d(x, w, nullptr, stride, pad, groups);
    Var b = params(bias_name);
    return conv2d(x, w, &b, stride, pad, groups);
}

int64_t Conv2dLayer::param_count() const {
    int64_t n = int64_t(k) * k * (cin / groups) * cout;
    if (!bias_name.empty()) n += cout;
    return n;
}

Conv2dLayer make_conv_layer(ParamStore& store, const std::string& name,
                            int cin, int cout, int k, int groups,
                            const InitScheme& scheme, Rng& rng,
                            const ConvOptions& opts) {
    if (groups < 1 || cin % groups != 0 || cout % groups != 0)
        throw std::invalid_argument("make_conv_layer '" + name + "': channels " +
                                    std::to_string(cin) + "->" + std::to_string(cout) +
                                    " not divisible by groups " + std::to_string(groups));
    if (k < 1 || k % 2 == 0)
        throw std::invalid_argument("make_conv_layer '" + name + "': kernel must be odd");

    Conv2dLayer layer;
    layer.weight_name = name + ".weight";
    layer.bias_name = opts.bias ? name + ".bias" : "";
    layer.k = k;
    layer.cin = cin;
    layer.cout = cout;
    layer.stride = opts.stride;
    layer.pad = opts.pad < 0 ? (k - 1) / 2 : opts.pad;
    layer.groups = groups;

    const Shape wshape{cout, cin / groups, k, k};
    if (opts.tie_key.empty()) {
        store.create(layer.weight_name, init_params(scheme, wshape, rng));
        if (opts.bias) store.create(layer.bias_name, Tensor(Shape{1, cout, 1, 1}, 0.f));
        return layer;
    }

    const std::string tw = opts.tie_key + ".weight";
    const std::string tb = opts.tie_key + ".bias";
    if (store.has(tw)) {
        if (store.value(tw).shape != wshape)
            throw std::invalid_argument("make_conv_layer '" + name + "': tie_key '" +
                                        opts.tie_key + "' shape conflict: " +
                                        store.value(tw).shape.str() + " vs " + wshape.str());
    } else {
        store.create(tw, init_params(scheme, wshape, rng));
        if (opts.bias) store.create(tb, Tensor(Shape{1, cout, 1, 1}, 0.f));
    }
    store.alias(layer.weight_name, tw);
    if (opts.bias) store.alias(layer.bias_name, tb);
    return layer;
}

} // namespace pcarn
