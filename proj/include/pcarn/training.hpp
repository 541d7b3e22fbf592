// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_TRAINING_HPP
#define PCARN_TRAINING_HPP

#include <cstdint>
#include <map>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "pcarn/adversarial.hpp"
#include "pcarn/generator.hpp"
#include "pcarn/rng.hpp"

namespace pcarn {

// Two-phase training hyperparameters. Defaults follow the full-size recipe
// (minibatch 64, lr 1e-4 halved every 4e5 steps, 48px LR patches, scales
// {2,4} sampled per batch); desk-scale runs override through the config.
struct TrainConfig {
    int batch = 64;
    double lr0 = 1e-4;
    int64_t lr_half_period = 400000;
    int64_t phase1_steps = 400000;
    int64_t phase2_steps = 200000;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int patch = 48; // LR patch edge
    std::vector<int> scales = {2, 4};
    double lambda_vgg = 100.0;
    double pixel_weight = 0.0; // optional phase-2 pixel term, off per protocol
    uint64_t seed = 0;

    void validate(const ModelSpec& model) const;
};

// lr0 * 2^-floor(step/period).
double lr_schedule(int64_t step, const TrainConfig& cfg);

// Bias-corrected ADAM over a ParamStore. Entries whose grad was not
// populated this step keep their value and moments (per-scale upsample heads
// see exactly this); a step where nothing has gradients is rejected. Tied
// parameters are canonical entries, so they carry one moment set each.
class Adam {
public:
    explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(ParamStore& store, double lr);

private:
    struct Slot {
        Tensor m, v;
        int64_t t = 0;
    };
    std::unordered_map<std::string, Slot> slots_;
    double b1_, b2_, eps_;
};

struct Batch {
    Tensor lr, hr; // (B,3,p,p) and (B,3,rp,rp)
    int scale = 0;
};

// Draws one-scale batches of augmented patch pairs: crop HR, flip/rotate
// (90-degree multiples), degrade bicubically. Images too small for a scale
// are excluded from that scale with a warning recorded at construction.
class PatchSampler {
public:
    PatchSampler(std::vector<Tensor> images, int patch, std::vector<int> scales);

    Batch sample(int batch, Rng& rng) const;
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::vector<Tensor> images_;
    int patch_;
    std::vector<int> scales_;
    std::map<int, std::vector<size_t>> eligible_;
    std::vector<std::string> warnings_;
};

// Phase 1: minimize L1(G(lr), hr). Writes one log line per step
// ("step phase scale loss_pixel loss_adv loss_perc lr"); aborts with
// NumericError on a non-finite loss.
void train_phase1(GeneratorModel& gen, const TrainConfig& cfg,
                  const std::vector<Tensor>& corpus, std::ostream* log);

// Phase 2: alternate one discriminator step (multi-scale Eq.-6 objective)
// and one generator step (multi-scale GAN loss + lambda * perceptual loss,
// plus an optional pixel term). Requires patch*scale >= 64 and divisible by
// 16 so the S=3 pyramid and the feature extractor stay in range.
void train_phase2(GeneratorModel& gen, MultiScaleDiscriminator& msd,
                  FeatureExtractor& fx, const TrainConfig& cfg,
                  const std::vector<Tensor>& corpus, std::ostream* log);

} // namespace pcarn

#endif
