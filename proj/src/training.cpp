// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "pcarn/errors.hpp"
#include "pcarn/resample.hpp"

namespace pcarn {

namespace {

Tensor stack_batch(const std::vector<Tensor>& items) {
    const Shape s0 = items[0].shape;
    Tensor out(Shape{static_cast<int64_t>(items.size()), s0.c, s0.h, s0.w});
    const size_t stride = items[0].v.size();
    for (size_t i = 0; i < items.size(); i++)
        std::copy(items[i].v.begin(), items[i].v.end(), out.v.begin() + i * stride);
    return out;
}

void log_line(std::ostream* log, int64_t step, int phase, int scale, double lp,
              double ladv, double lperc, double lr) {
    if (!log) return;
    char line[192];
    std::snprintf(line, sizeof line, "%lld %d %d %.9g %.9g %.9g %.9g\n",
                  static_cast<long long>(step), phase, scale, lp, ladv, lperc, lr);
    *log << line;
    log->flush(); // keep partial logs intact on abort
}

} // namespace

void TrainConfig::validate(const ModelSpec& model) const {
    if (batch < 1) throw std::invalid_argument("TrainConfig.batch: must be >= 1");
    if (lr0 <= 0) throw std::invalid_argument("TrainConfig.lr0: must be positive");
    if (lr_half_period < 1)
        throw std::invalid_argument("TrainConfig.lr_half_period: must be >= 1");
    if (phase1_steps < 0 || phase2_steps < 0)
        throw std::invalid_argument("TrainConfig.phase_steps: must be >= 0");
    if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
        throw std::invalid_argument("TrainConfig.beta: must lie in [0,1)");
    if (eps <= 0) throw std::invalid_argument("TrainConfig.eps: must be positive");
    if (patch < 1) throw std::invalid_argument("TrainConfig.patch: must be >= 1");
    if (scales.empty()) throw std::invalid_argument("TrainConfig.scales: empty");
    for (int r : scales)
        if (!model.supports_scale(r))
            throw std::invalid_argument("TrainConfig.scales: scale " + std::to_string(r) +
                                        " not supported by the model spec");
    if (lambda_vgg < 0) throw std::invalid_argument("TrainConfig.lambda_vgg: must be >= 0");
    if (pixel_weight < 0)
        throw std::invalid_argument("TrainConfig.pixel_weight: must be >= 0");
}

double lr_schedule(int64_t step, const TrainConfig& cfg) {
    if (step < 0) throw std::invalid_argument("lr_schedule: negative step");
    return std::ldexp(cfg.lr0, -static_cast<int>(step / cfg.lr_half_period));
}

Adam::Adam(double beta1, double beta2, double eps) : b1_(beta1), b2_(beta2), eps_(eps) {}

void Adam::step(ParamStore& store, double lr) {
    bool any = false;
    for (auto& e : store.entries()) {
        if (e.grad.empty()) continue;
        any = true;
        Slot& slot = slots_[e.name];
        if (slot.m.empty()) {
            slot.m = Tensor(e.value.shape, 0.f);
            slot.v = Tensor(e.value.shape, 0.f);
        }
        slot.t++;
        const double bc1 = 1.0 - std::pow(b1_, double(slot.t));
        const double bc2 = 1.0 - std::pow(b2_, double(slot.t));
        for (size_t i = 0; i < e.value.v.size(); i++) {
            const double g = e.grad.v[i];
            const double m = b1_ * slot.m.v[i] + (1.0 - b1_) * g;
            const double v = b2_ * slot.v.v[i] + (1.0 - b2_) * g * g;
            slot.m.v[i] = static_cast<float>(m);
            slot.v.v[i] = static_cast<float>(v);
            e.value.v[i] -= static_cast<float>(lr * (m / bc1) /
                                               (std::sqrt(v / bc2) + eps_));
        }
    }
    if (!any) throw std::invalid_argument("Adam::step: no gradients populated");
}

PatchSampler::PatchSampler(std::vector<Tensor> images, int patch, std::vector<int> scales)
    : images_(std::move(images)), patch_(patch), scales_(std::move(scales)) {
    if (images_.empty()) throw DataError("PatchSampler: empty corpus");
    for (int r : scales_) {
        auto& elig = eligible_[r];
        const int64_t need = int64_t(patch_) * r;
        for (size_t i = 0; i < images_.size(); i++) {
            const Shape s = images_[i].shape;
            if (s.h >= need && s.w >= need) {
                elig.push_back(i);
            } else {
                warnings_.push_back("image " + std::to_string(i) + " (" +
                                    std::to_string(s.w) + "x" + std::to_string(s.h) +
                                    ") too small for " + std::to_string(need) + "px x" +
                                    std::to_string(r) + " crops; skipped");
            }
        }
    }
}

Batch PatchSampler::sample(int batch, Rng& rng) const {
    const int scale = scales_[rng.below(static_cast<uint32_t>(scales_.size()))];
    const auto& elig = eligible_.at(scale);
    if (elig.empty())
        throw DataError("PatchSampler: no image large enough for scale " +
                        std::to_string(scale));
    const int64_t pr = int64_t(patch_) * scale;
    std::vector<Tensor> lrs, hrs;
    lrs.reserve(static_cast<size_t>(batch));
    hrs.reserve(static_cast<size_t>(batch));
    for (int b = 0; b < batch; b++) {
        const Tensor& img = images_[elig[rng.below(static_cast<uint32_t>(elig.size()))]];
        const Shape s = img.shape;
        const int64_t y0 = rng.below(static_cast<uint32_t>(s.h - pr + 1));
        const int64_t x0 = rng.below(static_cast<uint32_t>(s.w - pr + 1));
        Tensor hr = crop(img, y0, x0, pr, pr);
        if (rng.coin()) hr = hflip(hr);
        hr = rot90(hr, static_cast<int>(rng.below(4)));
        lrs.push_back(degrade_bicubic(hr, scale));
        hrs.push_back(std::move(hr));
    }
    return Batch{stack_batch(lrs), stack_batch(hrs), scale};
}

void train_phase1(GeneratorModel& gen, const TrainConfig& cfg,
                  const std::vector<Tensor>& corpus, std::ostream* log) {
    cfg.validate(gen.spec());
    PatchSampler sampler(corpus, cfg.patch, cfg.scales);
    for (const auto& w : sampler.warnings()) std::cerr << "warning: " << w << "\n";

    Rng rng(cfg.seed);
    Adam adam(cfg.beta1, cfg.beta2, cfg.eps);
    for (int64_t step = 0; step < cfg.phase1_steps; step++) {
        const double lr = lr_schedule(step, cfg);
        Batch b = sampler.sample(cfg.batch, rng);
        gen.params().zero_grads();
        ParamBinding pb(gen.params());
        Var out = gen.forward(pb, Var::leaf(b.lr, false), b.scale);
        Var loss = l1_loss(out, constant(std::move(b.hr)));
        const double lv = loss.scalar();
        if (!std::isfinite(lv)) {
            log_line(log, step, 1, b.scale, lv, 0.0, 0.0, lr);
            throw NumericError("phase-1 loss is not finite", step, lr);
        }
        backward(loss);
        pb.collect_grads();
        adam.step(gen.params(), lr);
        log_line(log, step, 1, b.scale, lv, 0.0, 0.0, lr);
    }
}

void train_phase2(GeneratorModel& gen, MultiScaleDiscriminator& msd, FeatureExtractor& fx,
                  const TrainConfig& cfg, const std::vector<Tensor>& corpus,
                  std::ostream* log) {
    cfg.validate(gen.spec());
    for (int r : cfg.scales) {
        const int hr = cfg.patch * r;
        if (hr < 64 || hr % 16 != 0)
            throw std::invalid_argument(
                "train_phase2: patch*scale = " + std::to_string(hr) +
                " must be >= 64 and divisible by 16 (multi-scale discriminator minimum "
                "input and feature-extractor pooling)");
    }
    PatchSampler sampler(corpus, cfg.patch, cfg.scales);
    for (const auto& w : sampler.warnings()) std::cerr << "warning: " << w << "\n";

    Rng rng(cfg.seed);
    Adam adam_g(cfg.beta1, cfg.beta2, cfg.eps);
    Adam adam_d(cfg.beta1, cfg.beta2, cfg.eps);
    for (int64_t step = 0; step < cfg.phase2_steps; step++) {
        const double lr = lr_schedule(step, cfg);
        Batch b = sampler.sample(cfg.batch, rng);
        Var hr_const = constant(b.hr);
        Var lr_const = constant(b.lr);

        // Discriminator step: generator output is treated as data.
        msd.params().zero_grads();
        {
            ParamBinding pg(gen.params(), /*trainable=*/false);
            Var sr = gen.forward(pg, lr_const, b.scale);
            ParamBinding pd(msd.params());
            MultiScaleLoss ms = multiscale_loss(msd, pd, sr, hr_const);
            const double dv = ms.d_loss.scalar();
            if (!std::isfinite(dv))
                throw NumericError("phase-2 discriminator loss is not finite", step, lr);
            backward(ms.d_loss);
            pd.collect_grads();
            adam_d.step(msd.params(), lr);
        }

        // Generator step.
        gen.params().zero_grads();
        double lp = 0.0, ladv = 0.0, lperc = 0.0;
        {
            ParamBinding pg(gen.params());
            Var sr = gen.forward(pg, lr_const, b.scale);
            ParamBinding pd(msd.params(), /*trainable=*/false);
            MultiScaleLoss ms = multiscale_loss(msd, pd, sr, hr_const);
            Var vgg = perceptual_loss(fx, sr, hr_const);
            Var loss = total_generator_loss(ms.gan_loss, vgg,
                                            static_cast<float>(cfg.lambda_vgg));
            if (cfg.pixel_weight > 0) {
                Var pix = l1_loss(sr, hr_const);
                lp = pix.scalar();
                loss = add(loss, mul_scalar(pix, static_cast<float>(cfg.pixel_weight)));
            }
            ladv = ms.gan_loss.scalar();
            lperc = vgg.scalar();
            const double lv = loss.scalar();
            if (!std::isfinite(lv)) {
                log_line(log, step, 2, b.scale, lp, ladv, lperc, lr);
                throw NumericError("phase-2 generator loss is not finite", step, lr);
            }
            backward(loss);
            pg.collect_grads();
            adam_g.step(gen.params(), lr);
        }
        log_line(log, step, 2, b.scale, lp, ladv, lperc, lr);
    }
}

} // namespace pcarn
