// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/adversarial.hpp"

#include <stdexcept>

namespace pcarn {

namespace {

constexpr float kProbEps = 1e-7f;

struct DiscSpec {
    int n, s;
};
// k3 throughout; SRGAN-lineage schedule truncated to nine layers.
constexpr DiscSpec kDiscLayers[9] = {{64, 1},  {64, 2},  {128, 1}, {128, 2}, {256, 1},
                                     {256, 2}, {512, 1}, {512, 2}, {1, 1}};

} // namespace

Var run_plan(ParamBinding& params, const std::vector<PlanStep>& plan, Var x) {
    for (const auto& step : plan) {
        switch (step.kind) {
            case PlanStep::Kind::conv: x = step.conv(params, x); break;
            case PlanStep::Kind::relu: x = relu(x); break;
            case PlanStep::Kind::leaky_relu: x = leaky_relu(x, step.slope); break;
            case PlanStep::Kind::sigmoid: x = sigmoid(x); break;
            case PlanStep::Kind::avg_pool2: x = avg_pool2(x); break;
            case PlanStep::Kind::global_avg_pool: x = global_avg_pool(x); break;
        }
    }
    return x;
}

std::vector<PlanStep> DiscriminatorModel::build_plan(ParamStore& store,
                                                     const std::string& prefix,
                                                     const InitScheme& scheme, Rng& rng) {
    std::vector<PlanStep> plan;
    int cin = 3;
    for (int i = 0; i < 9; i++) {
        ConvOptions opts;
        opts.stride = kDiscLayers[i].s;
        Conv2dLayer conv = make_conv_layer(store, prefix + "conv" + std::to_string(i + 1),
                                           cin, kDiscLayers[i].n, 3, 1, scheme, rng, opts);
        plan.push_back({PlanStep::Kind::conv, conv, 0.f});
        if (i < 8) plan.push_back({PlanStep::Kind::leaky_relu, {}, 0.2f});
        cin = kDiscLayers[i].n;
    }
    plan.push_back({PlanStep::Kind::global_avg_pool, {}, 0.f});
    plan.push_back({PlanStep::Kind::sigmoid, {}, 0.f});
    return plan;
}

DiscriminatorModel DiscriminatorModel::build(const InitScheme& scheme, uint64_t seed) {
    DiscriminatorModel d;
    Rng rng(seed);
    d.plan_ = build_plan(d.store_, "", scheme, rng);
    return d;
}

Var DiscriminatorModel::forward(ParamBinding& params, const Var& img) const {
    const Shape s = img.shape();
    if (s.c != 3)
        throw std::invalid_argument("discriminator: expected 3 channels, got " + s.str());
    if (s.h < kMinInput || s.w < kMinInput)
        throw std::invalid_argument("discriminator: input " + s.str() +
                                    " smaller than minimum " + std::to_string(kMinInput));
    return run_plan(params, plan_, img);
}

Tensor DiscriminatorModel::infer(const Tensor& img) {
    ParamBinding p(store_, /*trainable=*/false);
    return forward(p, Var::leaf(img, false)).value();
}

Var discriminator_forward(const DiscriminatorModel& d, ParamBinding& params,
                          const Var& img) {
    return d.forward(params, img);
}

MultiScaleDiscriminator MultiScaleDiscriminator::build(int num_scales,
                                                       const InitScheme& scheme,
                                                       uint64_t seed) {
    if (num_scales < 1)
        throw std::invalid_argument("MultiScaleDiscriminator: num_scales must be >= 1");
    MultiScaleDiscriminator msd;
    Rng rng(seed);
    for (int i = 1; i <= num_scales; i++)
        msd.plans_.push_back(DiscriminatorModel::build_plan(
            msd.store_, "d" + std::to_string(i) + ".", scheme, rng));
    return msd;
}

Var MultiScaleDiscriminator::forward_scale(ParamBinding& params, int scale_index,
                                           const Var& img) const {
    const Shape s = img.shape();
    if (s.h < DiscriminatorModel::kMinInput || s.w < DiscriminatorModel::kMinInput)
        throw std::invalid_argument("discriminator: input " + s.str() +
                                    " smaller than minimum " +
                                    std::to_string(DiscriminatorModel::kMinInput));
    return run_plan(params, plans_.at(scale_index), img);
}

std::pair<Var, Var> adversarial_losses(const Var& d_out_real, const Var& d_out_fake) {
    Var pr = clamp(d_out_real, kProbEps, 1.f - kProbEps);
    Var pf = clamp(d_out_fake, kProbEps, 1.f - kProbEps);
    Var one = constant(Tensor(pf.shape(), 1.f));
    Var d_loss = mul_scalar(add(mean_all(log(pr)), mean_all(log(sub(one, pf)))), -1.f);
    Var g_loss = mul_scalar(mean_all(log(pf)), -1.f);
    return {d_loss, g_loss};
}

MultiScaleLoss multiscale_loss(const MultiScaleDiscriminator& msd, ParamBinding& params,
                               const Var& sr, const Var& hr) {
    if (sr.shape() != hr.shape())
        throw std::invalid_argument("multiscale_loss: shape mismatch " + sr.shape().str() +
                                    " vs " + hr.shape().str());
    const int64_t div = int64_t(1) << (msd.num_scales() - 1);
    if (sr.shape().h % div != 0 || sr.shape().w % div != 0)
        throw std::invalid_argument("multiscale_loss: extents " + sr.shape().str() +
                                    " not divisible by " + std::to_string(div));

    MultiScaleLoss out;
    Var sr_i = sr, hr_i = hr;
    for (int i = 0; i < msd.num_scales(); i++) {
        if (i > 0) {
            sr_i = avg_pool2(sr_i);
            hr_i = avg_pool2(hr_i);
        }
        out.scale_inputs.push_back(sr_i.shape());
        Var d_real = msd.forward_scale(params, i, hr_i);
        Var d_fake = msd.forward_scale(params, i, sr_i);
        out.d_real.push_back(d_real.value());
        out.d_fake.push_back(d_fake.value());
        auto [ld, lg] = adversarial_losses(d_real, d_fake);
        out.d_loss = i == 0 ? ld : add(out.d_loss, ld);
        out.gan_loss = i == 0 ? lg : add(out.gan_loss, lg);
    }
    return out;
}

FeatureExtractor FeatureExtractor::build(uint64_t seed) {
    FeatureExtractor fx;
    Rng rng(seed);
    const InitScheme scheme = InitScheme::defaults();
    const int group_channels[5] = {16, 32, 64, 128, 256};
    int cin = 3;
    for (int g = 1; g <= 5; g++) {
        const int cout = group_channels[g - 1];
        for (int j = 1; j <= 2; j++) {
            Conv2dLayer conv = make_conv_layer(
                fx.store_, "feat.g" + std::to_string(g) + ".c" + std::to_string(j),
                j == 1 ? cin : cout, cout, 3, 1, scheme, rng);
            fx.plan_.push_back({PlanStep::Kind::conv, conv, 0.f});
            fx.plan_.push_back({PlanStep::Kind::relu, {}, 0.f});
        }
        if (g < 5) fx.plan_.push_back({PlanStep::Kind::avg_pool2, {}, 0.f});
        cin = cout;
    }
    return fx;
}

Var FeatureExtractor::features(const Var& img) {
    const Shape s = img.shape();
    if (s.h % 16 != 0 || s.w % 16 != 0 || s.h == 0 || s.w == 0)
        throw std::invalid_argument("feature extractor: extents " + s.str() +
                                    " must be divisible by 16");
    ParamBinding frozen(store_, /*trainable=*/false);
    return run_plan(frozen, plan_, img);
}

Var perceptual_loss(FeatureExtractor& fx, const Var& sr, const Var& hr) {
    if (sr.shape() != hr.shape())
        throw std::invalid_argument("perceptual_loss: shape mismatch " + sr.shape().str() +
                                    " vs " + hr.shape().str());
    return l2_loss(fx.features(sr), fx.features(hr));
}

Var total_generator_loss(const Var& gan_loss, const Var& vgg_loss, float lambda) {
    if (lambda < 0.f)
        throw std::invalid_argument("total_generator_loss: lambda must be >= 0");
    return add(gan_loss, mul_scalar(vgg_loss, lambda));
}

} // namespace pcarn
