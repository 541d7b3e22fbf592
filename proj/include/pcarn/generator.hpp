// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_GENERATOR_HPP
#define PCARN_GENERATOR_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pcarn/init.hpp"
#include "pcarn/params.hpp"

namespace pcarn {

// Generator hyperparameters. Defaults are the full-size network; desk-scale
// runs shrink `channels`. When `efficient` is set the residual blocks use
// grouped 3x3 convs plus a pointwise mixing conv, and the upsample-head 3x3
// convs are grouped as well; entry/exit and every 1x1 fusion conv always
// stay ungrouped and untied.
struct ModelSpec {
    int blocks = 3;   // cascading blocks (B)
    int units = 3;    // residual blocks per cascading block (U)
    int channels = 64;
    int group_size = 1;
    bool tied = false;
    bool efficient = false;
    std::vector<int> scales = {2, 3, 4};

    void validate() const; // rejects with the offending field named
    bool supports_scale(int r) const;
};

// Residual unit: two 3x3 convs with a ReLU between, residual add, final
// ReLU. The efficient form groups the 3x3 convs and mixes through an extra
// 1x1 conv before the add.
struct ResidualBlock {
    std::vector<Conv2dLayer> convs; // [c1, c2] or [g1, g2, pw]
    bool efficient = false;
};

struct ResidualBlockOptions {
    bool efficient = false;
    int groups = 1;
    std::string tie_key; // shares all convs of the unit under this key
};

ResidualBlock build_residual_block(ParamStore& store, const std::string& name,
                                   int channels, const InitScheme& scheme, Rng& rng,
                                   const ResidualBlockOptions& opts = {});

Var residual_block(ParamBinding& params, const Var& x, const ResidualBlock& rb);

// Local cascading: B^0 = x; B^u = 1x1((u+1)ch -> ch) over
// [B^0..B^{u-1}, R_u(B^{u-1})]; returns B^U. No nonlinearity after the 1x1s.
struct CascadingBlock {
    std::vector<ResidualBlock> res;
    std::vector<Conv2dLayer> fuse;
};

CascadingBlock build_cascading_block(ParamStore& store, const std::string& name,
                                     int channels, int units, const InitScheme& scheme,
                                     Rng& rng, const ResidualBlockOptions& res_opts = {});

Var cascading_block(ParamBinding& params, const Var& x, const CascadingBlock& cb);

// Ablation switch for the final O = H^B + H^0 addition.
struct ForwardOptions {
    bool global_residual = true;
};

class GeneratorModel {
public:
    static GeneratorModel build(const ModelSpec& spec, const InitScheme& scheme,
                                uint64_t seed);

    // lr_image is (N,3,h,w) in [0,1]; result is (N,3,r*h,r*w), unclamped.
    Var forward(ParamBinding& params, const Var& lr_image, int scale,
                const ForwardOptions& opts = {}) const;
    // Convenience inference path (no gradients recorded into the store).
    Tensor infer(const Tensor& lr_image, int scale);

    const ModelSpec& spec() const { return spec_; }
    ParamStore& params() { return store_; }
    const ParamStore& params() const { return store_; }

    // One row per conv application of a forward pass at the given scale with
    // an lr_h x lr_w input, in execution order. `aliased` marks layers whose
    // parameters are shared with an earlier row (weight tying).
    struct TracedConv {
        std::string name;
        int k, cin, cout, groups;
        int64_t out_h, out_w;
        bool aliased;
        bool has_bias;
    };
    std::vector<TracedConv> conv_trace(int scale, int64_t lr_h, int64_t lr_w) const;

private:
    struct UpStage {
        Conv2dLayer conv;
        int shuffle; // pixel-shuffle factor after the conv
    };

    ModelSpec spec_;
    ParamStore store_;
    Conv2dLayer entry_, exit_;
    std::vector<CascadingBlock> blocks_;
    std::vector<Conv2dLayer> global_fuse_;
    std::map<int, std::vector<UpStage>> upsample_;
};

} // namespace pcarn

#endif
