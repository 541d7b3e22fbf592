// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/generator.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcarn {

namespace {

std::string layer_name(const Conv2dLayer& l) {
    // strip trailing ".weight"
    return l.weight_name.substr(0, l.weight_name.size() - 7);
}

} // namespace

void ModelSpec::validate() const {
    if (blocks < 1) throw std::invalid_argument("ModelSpec.blocks: must be >= 1");
    if (units < 1) throw std::invalid_argument("ModelSpec.units: must be >= 1");
    if (channels < 1) throw std::invalid_argument("ModelSpec.channels: must be >= 1");
    if (group_size < 1) throw std::invalid_argument("ModelSpec.group_size: must be >= 1");
    if (efficient && channels % group_size != 0)
        throw std::invalid_argument("ModelSpec.channels: " + std::to_string(channels) +
                                    " not divisible by group_size " +
                                    std::to_string(group_size));
    if (scales.empty()) throw std::invalid_argument("ModelSpec.scales: empty");
    for (int r : scales)
        if (r != 2 && r != 3 && r != 4)
            throw std::invalid_argument("ModelSpec.scales: unsupported scale " +
                                        std::to_string(r));
}

bool ModelSpec::supports_scale(int r) const {
    return std::find(scales.begin(), scales.end(), r) != scales.end();
}

ResidualBlock build_residual_block(ParamStore& store, const std::string& name,
                                   int channels, const InitScheme& scheme, Rng& rng,
                                   const ResidualBlockOptions& opts) {
    ResidualBlock rb;
    rb.efficient = opts.efficient;
    auto tie = [&opts](const char* part) {
        ConvOptions c;
        if (!opts.tie_key.empty()) c.tie_key = opts.tie_key + "." + part;
        return c;
    };
    if (opts.efficient) {
        rb.convs.push_back(make_conv_layer(store, name + ".g1", channels, channels, 3,
                                           opts.groups, scheme, rng, tie("g1")));
        rb.convs.push_back(make_conv_layer(store, name + ".g2", channels, channels, 3,
                                           opts.groups, scheme, rng, tie("g2")));
        rb.convs.push_back(make_conv_layer(store, name + ".pw", channels, channels, 1, 1,
                                           scheme, rng, tie("pw")));
    } else {
        rb.convs.push_back(make_conv_layer(store, name + ".c1", channels, channels, 3, 1,
                                           scheme, rng, tie("c1")));
        rb.convs.push_back(make_conv_layer(store, name + ".c2", channels, channels, 3, 1,
                                           scheme, rng, tie("c2")));
    }
    return rb;
}

Var residual_block(ParamBinding& params, const Var& x, const ResidualBlock& rb) {
    Var t = relu(rb.convs[0](params, x));
    t = rb.convs[1](params, t);
    if (rb.efficient) t = rb.convs[2](params, t); // pointwise mixing
    return relu(add(t, x));
}

CascadingBlock build_cascading_block(ParamStore& store, const std::string& name,
                                     int channels, int units, const InitScheme& scheme,
                                     Rng& rng, const ResidualBlockOptions& res_opts) {
    CascadingBlock cb;
    for (int u = 1; u <= units; u++) {
        cb.res.push_back(build_residual_block(store, name + ".res" + std::to_string(u),
                                              channels, scheme, rng, res_opts));
        cb.fuse.push_back(make_conv_layer(store, name + ".fuse" + std::to_string(u),
                                          (u + 1) * channels, channels, 1, 1, scheme, rng));
    }
    return cb;
}

Var cascading_block(ParamBinding& params, const Var& x, const CascadingBlock& cb) {
    std::vector<Var> feats = {x};
    Var cur = x;
    for (size_t u = 0; u < cb.res.size(); u++) {
        Var r = residual_block(params, cur, cb.res[u]);
        std::vector<Var> cat = feats;
        cat.push_back(r);
        cur = cb.fuse[u](params, concat_channels(cat)); // no nonlinearity after 1x1
        feats.push_back(cur);
    }
    return cur;
}

GeneratorModel GeneratorModel::build(const ModelSpec& spec, const InitScheme& scheme,
                                     uint64_t seed) {
    spec.validate();
    GeneratorModel m;
    m.spec_ = spec;
    Rng rng(seed);
    const int ch = spec.channels;
    const int g = spec.efficient ? spec.group_size : 1;

    m.entry_ = make_conv_layer(m.store_, "entry", 3, ch, 3, 1, scheme, rng);

    for (int b = 1; b <= spec.blocks; b++) {
        const std::string bp = "block" + std::to_string(b);
        ResidualBlockOptions res_opts;
        res_opts.efficient = spec.efficient;
        res_opts.groups = g;
        if (spec.tied) res_opts.tie_key = bp + ".res_shared"; // one set per block
        m.blocks_.push_back(
            build_cascading_block(m.store_, bp, ch, spec.units, scheme, rng, res_opts));
        m.global_fuse_.push_back(make_conv_layer(m.store_, "global_fuse" + std::to_string(b),
                                                 (b + 1) * ch, ch, 1, 1, scheme, rng));
    }

    for (int r : spec.scales) {
        std::vector<UpStage> stages;
        const std::string up = "up" + std::to_string(r);
        if (r == 3) {
            stages.push_back({make_conv_layer(m.store_, up + ".stage1", ch, ch * 9, 3, g,
                                              scheme, rng),
                              3});
        } else {
            const int n_stages = r == 4 ? 2 : 1;
            for (int s = 1; s <= n_stages; s++)
                stages.push_back({make_conv_layer(m.store_,
                                                  up + ".stage" + std::to_string(s),
                                                  ch, ch * 4, 3, g, scheme, rng),
                                  2});
        }
        m.upsample_[r] = std::move(stages);
    }

    m.exit_ = make_conv_layer(m.store_, "exit", ch, 3, 3, 1, scheme, rng);
    return m;
}

Var GeneratorModel::forward(ParamBinding& p, const Var& lr_image, int scale,
                            const ForwardOptions& opts) const {
    if (!spec_.supports_scale(scale))
        throw std::invalid_argument("generator: unsupported scale " + std::to_string(scale));
    if (lr_image.shape().c != 3)
        throw std::invalid_argument("generator: expected 3 input channels, got " +
                                    lr_image.shape().str());

    Var h0 = entry_(p, lr_image);
    std::vector<Var> feats = {h0};
    Var cur = h0;
    for (size_t b = 0; b < blocks_.size(); b++) {
        Var blk = cascading_block(p, cur, blocks_[b]);
        std::vector<Var> cat = feats;
        cat.push_back(blk);
        cur = global_fuse_[b](p, concat_channels(cat));
        feats.push_back(cur);
    }
    Var o = opts.global_residual ? add(cur, h0) : cur;
    for (const auto& stage : upsample_.at(scale))
        o = relu(pixel_shuffle(stage.conv(p, o), stage.shuffle));
    return exit_(p, o);
}

Tensor GeneratorModel::infer(const Tensor& lr_image, int scale) {
    ParamBinding p(store_, /*trainable=*/false);
    Var out = forward(p, Var::leaf(lr_image, false), scale);
    return out.value();
}

std::vector<GeneratorModel::TracedConv> GeneratorModel::conv_trace(int scale,
                                                                   int64_t lr_h,
                                                                   int64_t lr_w) const {
    if (!spec_.supports_scale(scale))
        throw std::invalid_argument("conv_trace: unsupported scale " + std::to_string(scale));
    std::vector<TracedConv> rows;
    auto push = [&](const Conv2dLayer& l, int64_t h, int64_t w) {
        const int64_t ho = (h + 2 * l.pad - l.k) / l.stride + 1;
        const int64_t wo = (w + 2 * l.pad - l.k) / l.stride + 1;
        rows.push_back({layer_name(l), l.k, l.cin, l.cout, l.groups, ho, wo,
                        store_.is_alias(l.weight_name), !l.bias_name.empty()});
    };

    int64_t h = lr_h, w = lr_w;
    push(entry_, h, w);
    for (size_t b = 0; b < blocks_.size(); b++) {
        for (size_t u = 0; u < blocks_[b].res.size(); u++) {
            for (const auto& c : blocks_[b].res[u].convs) push(c, h, w);
            push(blocks_[b].fuse[u], h, w);
        }
        push(global_fuse_[b], h, w);
    }
    for (const auto& stage : upsample_.at(scale)) {
        push(stage.conv, h, w);
        h *= stage.shuffle;
        w *= stage.shuffle;
    }
    push(exit_, h, w);
    return rows;
}

} // namespace pcarn
