// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "pcarn/errors.hpp"
#include "pcarn/resample.hpp"
#include "pcarn/training.hpp"
#include "support/oracles.hpp"

using namespace pcarn;

namespace {

TrainConfig desk_cfg() {
    TrainConfig cfg;
    cfg.batch = 4;
    cfg.patch = 12;
    cfg.scales = {2};
    cfg.seed = 7;
    return cfg;
}

std::vector<Tensor> tiny_corpus(uint64_t seed, int n, int64_t hw) {
    Rng rng(seed);
    std::vector<Tensor> out;
    for (int i = 0; i < n; i++) out.push_back(testsupport::make_shape_image(rng, hw, hw));
    return out;
}

} // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    ParamStore store;
    store.create("p", Tensor(Shape{1, 1, 1, 4}, 0.5f));
    store.entries()[0].grad = Tensor(Shape{1, 1, 1, 4}, 0.f);
    Adam adam;
    adam.step(store, 0.1);
    for (float v : store.value("p").v) CHECK(v == 0.5f);
}

TEST_CASE("adam: first-step magnitude matches the hand-rolled oracle") {
    ParamStore store;
    store.create("p", Tensor::scalar(1.0f));
    store.entries()[0].grad = Tensor::scalar(1.0f);
    Adam adam(0.9, 0.999, 1e-8);
    adam.step(store, 0.1);
    // bias-corrected first step: lr * g / (|g| + eps) = 0.1
    CHECK(store.value("p").v[0] == doctest::Approx(0.9f).epsilon(1e-6));

    // second step with the same gradient keeps moving the same way
    store.entries()[0].grad = Tensor::scalar(1.0f);
    adam.step(store, 0.1);
    CHECK(store.value("p").v[0] < 0.9f);
}

TEST_CASE("adam: tied parameter updated once, visible at every alias") {
    ParamStore store;
    store.create("canon", Tensor::scalar(1.0f));
    store.alias("site2", "canon");
    store.entries()[0].grad = Tensor::scalar(1.0f);
    Adam adam;
    adam.step(store, 0.1);
    CHECK(store.value("site2").v[0] == store.value("canon").v[0]);
    CHECK(store.value("canon").v[0] == doctest::Approx(0.9f).epsilon(1e-6));
}

TEST_CASE("adam: rejects a step with no gradients") {
    ParamStore store;
    store.create("p", Tensor::scalar(1.0f));
    Adam adam;
    CHECK_THROWS_WITH_AS(adam.step(store, 0.1), doctest::Contains("no gradients"),
                         std::invalid_argument);
}

TEST_CASE("lr schedule: halving on the stated boundaries") {
    TrainConfig cfg;
    CHECK(lr_schedule(0, cfg) == doctest::Approx(1e-4));
    CHECK(lr_schedule(cfg.lr_half_period - 1, cfg) == doctest::Approx(1e-4));
    CHECK(lr_schedule(cfg.lr_half_period, cfg) == doctest::Approx(5e-5));
    CHECK(lr_schedule(3 * cfg.lr_half_period, cfg) == doctest::Approx(1.25e-5));
    double prev = lr_schedule(0, cfg);
    for (int64_t s = 1; s < 20; s++) {
        const double cur = lr_schedule(s * 100000, cfg);
        CHECK(cur <= prev);
        prev = cur;
    }
    CHECK_THROWS_AS(lr_schedule(-1, cfg), std::invalid_argument);
}

TEST_CASE("bicubic degrade: constants, shapes, and the 2-D summation oracle") {
    Tensor flat(Shape{1, 3, 12, 16}, 0.42f);
    Tensor down = degrade_bicubic(flat, 2);
    CHECK(down.shape == Shape{1, 3, 6, 8});
    for (float v : down.v) CHECK(v == doctest::Approx(0.42f).epsilon(1e-6));

    Rng rng(5);
    Tensor img = testsupport::make_shape_image(rng, 24, 20);
    for (int r : {2, 4}) {
        Tensor fast = degrade_bicubic(img, r);
        Tensor direct = testsupport::bicubic_direct(img, 24 / r, 20 / r);
        REQUIRE(fast.shape == direct.shape);
        for (size_t i = 0; i < fast.v.size(); i++)
            CHECK(std::abs(fast.v[i] - direct.v[i]) < 1e-5f);
    }
    // upscale path against the oracle as well
    Tensor up = bicubic_resize(img, 48, 40);
    Tensor up_direct = testsupport::bicubic_direct(img, 48, 40);
    for (size_t i = 0; i < up.v.size(); i++)
        CHECK(std::abs(up.v[i] - up_direct.v[i]) < 1e-5f);

    CHECK_THROWS_WITH_AS(degrade_bicubic(img, 5), doctest::Contains("divisible"),
                         std::invalid_argument);
}

TEST_CASE("augmentation commutes with bicubic degradation") {
    Rng rng(9);
    Tensor hr = testsupport::make_shape_image(rng, 32, 32);
    for (int r : {2, 4}) {
        Tensor a = degrade_bicubic(hflip(hr), r);
        Tensor b = hflip(degrade_bicubic(hr, r));
        for (size_t i = 0; i < a.v.size(); i++) CHECK(std::abs(a.v[i] - b.v[i]) < 1e-5f);
        for (int k = 1; k < 4; k++) {
            Tensor c = degrade_bicubic(rot90(hr, k), r);
            Tensor d = rot90(degrade_bicubic(hr, r), k);
            for (size_t i = 0; i < c.v.size(); i++)
                CHECK(std::abs(c.v[i] - d.v[i]) < 1e-5f);
        }
    }
}

TEST_CASE("patch sampler: shapes, pairing, determinism, eligibility") {
    auto corpus = tiny_corpus(11, 6, 64);
    PatchSampler sampler(corpus, 48 / 2, {2}); // LR patch 24 -> HR 48
    Rng rng(3);
    Batch b = sampler.sample(4, rng);
    CHECK(b.scale == 2);
    CHECK(b.lr.shape == Shape{4, 3, 24, 24});
    CHECK(b.hr.shape == Shape{4, 3, 48, 48});

    // each LR item is exactly the degraded HR item (pairing + same transform)
    for (int64_t i = 0; i < 4; i++) {
        Tensor hr_i(Shape{1, 3, 48, 48});
        std::memcpy(hr_i.data(), &b.hr.v[static_cast<size_t>(i) * 3 * 48 * 48],
                    hr_i.v.size() * sizeof(float));
        Tensor lr_i = degrade_bicubic(hr_i, 2);
        for (size_t j = 0; j < lr_i.v.size(); j++)
            CHECK(lr_i.v[j] == b.lr.v[static_cast<size_t>(i) * 3 * 24 * 24 + j]);
    }

    // fixed seed -> identical batch sequence
    Rng r1(42), r2(42);
    Batch x = sampler.sample(3, r1);
    Batch y = sampler.sample(3, r2);
    CHECK(std::memcmp(x.hr.data(), y.hr.data(), x.hr.v.size() * sizeof(float)) == 0);

    // 48x48 HR patches at x2 need 48px images; 64 works, 40 does not
    auto small = tiny_corpus(13, 2, 40);
    PatchSampler warned(small, 24, {2});
    CHECK(warned.warnings().size() == 2);
    Rng r3(1);
    CHECK_THROWS_AS(warned.sample(1, r3), DataError);

    // scale 2 with patch 48 -> HR patch 96
    auto big = tiny_corpus(15, 2, 128);
    PatchSampler s96(big, 48, {2});
    Rng r4(1);
    CHECK(s96.sample(1, r4).hr.shape == Shape{1, 3, 96, 96});
}

TEST_CASE("phase 1: loss drops on a tiny corpus and logs every step") {
    ModelSpec spec;
    spec.channels = 8;
    spec.blocks = 1;
    spec.units = 1;
    spec.scales = {2};
    GeneratorModel gen = GeneratorModel::build(spec, InitScheme::defaults(), 1);

    TrainConfig cfg = desk_cfg();
    cfg.phase1_steps = 120;
    cfg.lr0 = 1e-3;
    auto corpus = tiny_corpus(21, 6, 48);

    std::ostringstream log;
    train_phase1(gen, cfg, corpus, &log);

    std::istringstream in(log.str());
    std::string line;
    double first_avg = 0, last_avg = 0;
    int64_t step, phase, scale;
    double lp, ladv, lperc, lr;
    int n = 0;
    std::vector<double> losses;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        REQUIRE((ls >> step >> phase >> scale >> lp >> ladv >> lperc >> lr));
        CHECK(phase == 1);
        CHECK(scale == 2);
        CHECK(ladv == 0.0);
        losses.push_back(lp);
        n++;
    }
    CHECK(n == 120);
    for (int i = 0; i < 10; i++) {
        first_avg += losses[static_cast<size_t>(i)] / 10.0;
        last_avg += losses[losses.size() - 10 + static_cast<size_t>(i)] / 10.0;
    }
    CHECK(last_avg < first_avg);
}

TEST_CASE("phase 1: two runs with one seed are bitwise identical") {
    ModelSpec spec;
    spec.channels = 8;
    spec.blocks = 1;
    spec.units = 1;
    spec.scales = {2};
    TrainConfig cfg = desk_cfg();
    cfg.phase1_steps = 25;
    auto corpus = tiny_corpus(31, 4, 48);

    std::ostringstream log1, log2;
    GeneratorModel g1 = GeneratorModel::build(spec, InitScheme::defaults(), 5);
    train_phase1(g1, cfg, corpus, &log1);
    GeneratorModel g2 = GeneratorModel::build(spec, InitScheme::defaults(), 5);
    train_phase1(g2, cfg, corpus, &log2);

    CHECK(log1.str() == log2.str());
    for (size_t i = 0; i < g1.params().entries().size(); i++)
        CHECK(std::memcmp(g1.params().entries()[i].value.data(),
                          g2.params().entries()[i].value.data(),
                          g1.params().entries()[i].value.v.size() * sizeof(float)) == 0);
}

TEST_CASE("phase 1: NaN input aborts with step and lr, log preserved") {
    ModelSpec spec;
    spec.channels = 8;
    spec.blocks = 1;
    spec.units = 1;
    spec.scales = {2};
    GeneratorModel gen = GeneratorModel::build(spec, InitScheme::defaults(), 1);

    auto corpus = tiny_corpus(41, 2, 48);
    corpus[0].v[100] = std::numeric_limits<float>::quiet_NaN();
    corpus[1].v[100] = std::numeric_limits<float>::quiet_NaN();
    TrainConfig cfg = desk_cfg();
    cfg.batch = 8;
    cfg.phase1_steps = 50;

    std::ostringstream log;
    CHECK_THROWS_AS(train_phase1(gen, cfg, corpus, &log), NumericError);
    CHECK(!log.str().empty());
}

TEST_CASE("phase 2: short adversarial run keeps everything finite and in range") {
    ModelSpec spec;
    spec.channels = 8;
    spec.blocks = 1;
    spec.units = 1;
    spec.scales = {4};
    GeneratorModel gen = GeneratorModel::build(spec, InitScheme::defaults(), 2);
    MultiScaleDiscriminator msd = MultiScaleDiscriminator::build(3, InitScheme::defaults(), 3);
    FeatureExtractor fx = FeatureExtractor::build(4);

    TrainConfig cfg;
    cfg.batch = 2;
    cfg.patch = 16; // HR 64 -> pyramid 64/32/16
    cfg.scales = {4};
    cfg.phase2_steps = 4;
    cfg.seed = 9;
    auto corpus = tiny_corpus(51, 3, 80);

    std::ostringstream log;
    train_phase2(gen, msd, fx, cfg, corpus, &log);

    std::istringstream in(log.str());
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int64_t step, phase, scale;
        double lp, ladv, lperc, lr;
        REQUIRE((ls >> step >> phase >> scale >> lp >> ladv >> lperc >> lr));
        CHECK(phase == 2);
        CHECK(std::isfinite(ladv));
        CHECK(std::isfinite(lperc));
        n++;
    }
    CHECK(n == 4);

    // patch*scale below the pyramid minimum is rejected up front
    TrainConfig bad = cfg;
    bad.patch = 12; // HR 48 -> third scale 12 < 16
    CHECK_THROWS_WITH_AS(train_phase2(gen, msd, fx, bad, corpus, nullptr),
                         doctest::Contains(">= 64"), std::invalid_argument);
}
