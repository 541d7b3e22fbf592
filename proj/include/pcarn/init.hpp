// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_INIT_HPP
#define PCARN_INIT_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pcarn/params.hpp"
#include "pcarn/rng.hpp"
#include "pcarn/tensor.hpp"

namespace pcarn {

// Weight initialization: family x bound rule x multiplier. Only six
// combinations exist (normal pairs with sqrt(2/F); uniform with sqrt(6/F) or
// sqrt(1/F); multiplier 0.1 or 1.0); the constructor rejects anything else.
// F is the fan-in: per-group input channels times kernel area.
struct InitScheme {
    enum class Family { uniform, normal };
    enum class Bound { sqrt2_over_f, sqrt6_over_f, sqrt1_over_f };

    InitScheme(Family f, Bound b, double multiplier);

    Family family;
    Bound bound;
    double multiplier;

    double bound_value(int64_t fan_in) const;
    double draw(Rng& rng, int64_t fan_in) const;

    std::string str() const;                    // e.g. "1.0xU(1/F)"
    static InitScheme parse(const std::string&);
    static const std::array<InitScheme, 6>& all();
    static InitScheme defaults(); // 1.0xU(1/F)

    bool operator==(const InitScheme&) const = default;
};

// Fills a weight tensor of shape (Cout, Cin/G, K, K); fan-in is c*h*w.
// Rejects zero fan-in. Reproducible for a fixed rng state.
Tensor init_params(const InitScheme& scheme, Shape shape, Rng& rng);
Tensor init_params(const InitScheme& scheme, Shape shape, uint64_t seed);

struct Histogram {
    double lo = 0.0, hi = 0.0;  // observed value range
    std::vector<int64_t> counts;
    int64_t sampled = 0;
    double bin_width() const;
    double bin_center(size_t i) const;
    std::string render() const; // one "bin_center count" line per bin
};

// Bins up to sample_cap parameter values from the store (deterministic
// strided subsample when the store is larger). Rejects an empty store.
Histogram init_histogram(const ParamStore& store, int bins, int64_t sample_cap);

// Conv layer handle: parameters live in a ParamStore, the handle applies
// them to an input Var. Bias-less layers keep bias_name empty.
struct Conv2dLayer {
    std::string weight_name;
    std::string bias_name;
    int k = 3;
    int cin = 0, cout = 0;
    int stride = 1, pad = 1, groups = 1;

    Var operator()(ParamBinding& params, const Var& x) const;
    int64_t param_count() const;
};

struct ConvOptions {
    int stride = 1;
    int pad = -1;       // -1: same-resolution pad (k-1)/2
    bool bias = true;
    std::string tie_key; // layers sharing a key share parameters
};

// Registers weight (and bias) under `name.weight` / `name.bias`, drawing from
// the scheme; biases start at zero. When tie_key was seen before, registers
// aliases to the first layer's tensors instead (shape conflicts rejected).
Conv2dLayer make_conv_layer(ParamStore& store, const std::string& name,
                            int cin, int cout, int k, int groups,
                            const InitScheme& scheme, Rng& rng,
                            const ConvOptions& opts = {});

} // namespace pcarn

#endif
