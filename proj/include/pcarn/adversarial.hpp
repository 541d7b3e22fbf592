// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_ADVERSARIAL_HPP
#define PCARN_ADVERSARIAL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pcarn/init.hpp"
#include "pcarn/params.hpp"

namespace pcarn {

// Small interpreted layer plan shared by the discriminator and the feature
// extractor; keeps their topologies walkable for cost accounting and for the
// double-precision reference evaluator.
struct PlanStep {
    enum class Kind { conv, relu, leaky_relu, sigmoid, avg_pool2, global_avg_pool };
    Kind kind = Kind::relu;
    Conv2dLayer conv{};
    float slope = 0.f;
};

Var run_plan(ParamBinding& params, const std::vector<PlanStep>& plan, Var x);

// Nine conv layers (k3: n64s1, n64s2, n128s1, n128s2, n256s1, n256s2,
// n512s1, n512s2, n1s1), leaky-ReLU 0.2 between them, then global average
// pool and sigmoid. Emits one probability per image, strictly inside (0,1).
class DiscriminatorModel {
public:
    static constexpr int kMinInput = 16;

    static DiscriminatorModel build(const InitScheme& scheme, uint64_t seed);
    // Builds into an external store under `prefix.`; used by the multi-scale
    // wrapper so one store carries all three discriminators.
    static std::vector<PlanStep> build_plan(ParamStore& store, const std::string& prefix,
                                            const InitScheme& scheme, Rng& rng);

    // img (N,3,H,W), H,W >= 16 -> (N,1,1,1) probabilities.
    Var forward(ParamBinding& params, const Var& img) const;
    Tensor infer(const Tensor& img);

    ParamStore& params() { return store_; }
    const std::vector<PlanStep>& plan() const { return plan_; }

private:
    ParamStore store_;
    std::vector<PlanStep> plan_;
};

Var discriminator_forward(const DiscriminatorModel& d, ParamBinding& params,
                          const Var& img);

// S independent discriminators; scale i (0-based) judges the input after i
// rounds of 2x average pooling.
class MultiScaleDiscriminator {
public:
    static MultiScaleDiscriminator build(int num_scales, const InitScheme& scheme,
                                         uint64_t seed);

    int num_scales() const { return static_cast<int>(plans_.size()); }
    Var forward_scale(ParamBinding& params, int scale_index, const Var& img) const;
    ParamStore& params() { return store_; }
    const std::vector<PlanStep>& plan(int scale_index) const { return plans_.at(scale_index); }

private:
    ParamStore store_;
    std::vector<std::vector<PlanStep>> plans_;
};

// L_D = -mean[log d_real + log(1 - d_fake)], L_G = -mean[log d_fake]
// (non-saturating generator form). Probabilities are clamped to
// [1e-7, 1-1e-7] so both losses stay finite.
std::pair<Var, Var> adversarial_losses(const Var& d_out_real, const Var& d_out_fake);

struct MultiScaleLoss {
    Var d_loss;   // sum over scales of the per-scale discriminator loss
    Var gan_loss; // sum over scales of the per-scale generator loss
    std::vector<Shape> scale_inputs; // shape fed to each discriminator
    std::vector<Tensor> d_real, d_fake; // per-scale probabilities
};

// sr/hr must match and have spatial extents divisible by 2^(S-1).
MultiScaleLoss multiscale_loss(const MultiScaleDiscriminator& msd, ParamBinding& params,
                               const Var& sr, const Var& hr);

// Fixed, deterministically seeded conv stack standing in for a pretrained
// feature network: five pool-delimited groups of two 3x3 convs (channels
// 16/32/64/128/256), ReLU after every conv, 2x average pool between groups;
// features are tapped at the last ReLU of group five. Parameters are frozen;
// inputs need H,W divisible by 16.
class FeatureExtractor {
public:
    static FeatureExtractor build(uint64_t seed);

    Var features(const Var& img); // gradients flow to img only
    ParamStore& params() { return store_; }
    const std::vector<PlanStep>& plan() const { return plan_; }

private:
    ParamStore store_;
    std::vector<PlanStep> plan_;
};

// Mean squared feature distance at the extractor's tap point.
Var perceptual_loss(FeatureExtractor& fx, const Var& sr, const Var& hr);

// L_G = gan + lambda * vgg; lambda >= 0.
Var total_generator_loss(const Var& gan_loss, const Var& vgg_loss, float lambda);

} // namespace pcarn

#endif
