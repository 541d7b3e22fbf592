// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "pcarn/errors.hpp"
#include "pcarn/generator.hpp"
#include "pcarn/weights_io.hpp"

using namespace pcarn;

namespace {

Tensor rand_img(Rng& rng, Shape s, double lo = -1, double hi = 1) {
    Tensor t(s);
    for (auto& v : t.v) v = static_cast<float>(rng.uniform(lo, hi));
    return t;
}

ModelSpec desk_spec(int channels = 16) {
    ModelSpec s;
    s.channels = channels;
    return s;
}

} // namespace

TEST_CASE("residual block: zero weights pass non-negative inputs through") {
    ParamStore store;
    Rng rng(3);
    ResidualBlock rb = build_residual_block(store, "rb", 4, InitScheme::defaults(), rng);
    for (auto& e : store.entries()) std::fill(e.value.v.begin(), e.value.v.end(), 0.f);

    Rng rng2(5);
    Tensor xt = rand_img(rng2, Shape{1, 4, 6, 6}, 0.0, 1.0); // x >= 0
    ParamBinding pb(store);
    Var y = residual_block(pb, Var::leaf(xt, false), rb);
    REQUIRE(y.shape() == xt.shape);
    for (size_t i = 0; i < xt.v.size(); i++) CHECK(y.value().v[i] == xt.v[i]);
}

TEST_CASE("residual block: matches hand-rolled composition exactly") {
    ParamStore store;
    Rng rng(7);
    ResidualBlock rb = build_residual_block(store, "rb", 4, InitScheme::defaults(), rng);
    Rng rng2(9);
    Tensor xt = rand_img(rng2, Shape{2, 4, 5, 5});

    ParamBinding pb(store);
    Var x = Var::leaf(xt, false);
    Var got = residual_block(pb, x, rb);

    ParamBinding pb2(store);
    Var w1 = pb2("rb.c1.weight"), b1 = pb2("rb.c1.bias");
    Var w2 = pb2("rb.c2.weight"), b2 = pb2("rb.c2.bias");
    Var expect = relu(add(conv2d(relu(conv2d(x, w1, &b1, 1, 1, 1)), w2, &b2, 1, 1, 1), x));
    for (size_t i = 0; i < got.value().v.size(); i++)
        CHECK(got.value().v[i] == expect.value().v[i]);

    // shape preservation at the paper's width
    ParamStore store64;
    ResidualBlock rb64 = build_residual_block(store64, "rb", 64, InitScheme::defaults(), rng);
    ParamBinding pb64(store64);
    Var y = residual_block(pb64, Var::leaf(rand_img(rng2, Shape{1, 64, 8, 8}), false), rb64);
    CHECK(y.shape() == Shape{1, 64, 8, 8});
}

TEST_CASE("eresidual block: G=1 with identity pointwise reduces to the standard block") {
    ResidualBlockOptions eopts;
    eopts.efficient = true;
    eopts.groups = 1;
    ParamStore store;
    Rng rng_e(11);
    ResidualBlock erb = build_residual_block(store, "e", 4, InitScheme::defaults(), rng_e, eopts);
    Tensor& pw = store.value("e.pw.weight");
    std::fill(pw.v.begin(), pw.v.end(), 0.f);
    for (int c = 0; c < 4; c++) pw.at(c, c, 0, 0) = 1.f;
    std::fill(store.value("e.pw.bias").v.begin(), store.value("e.pw.bias").v.end(), 0.f);

    ParamStore plain;
    Rng rng_p(11); // same draw sequence -> g1/g2 values equal c1/c2 values
    ResidualBlock prb = build_residual_block(plain, "e", 4, InitScheme::defaults(), rng_p);
    REQUIRE(store.value("e.g1.weight").v == plain.value("e.c1.weight").v);

    Rng rng2(13);
    Tensor xt = rand_img(rng2, Shape{1, 4, 6, 6});
    ParamBinding pe(store), pp(plain);
    Var ye = residual_block(pe, Var::leaf(xt, false), erb);
    Var yp = residual_block(pp, Var::leaf(xt, false), prb);
    for (size_t i = 0; i < ye.value().v.size(); i++)
        CHECK(ye.value().v[i] == doctest::Approx(yp.value().v[i]).epsilon(1e-6));
}

TEST_CASE("eresidual block: parameter count at width 64, G=4") {
    ParamStore store;
    Rng rng(17);
    ResidualBlockOptions opts;
    opts.efficient = true;
    opts.groups = 4;
    build_residual_block(store, "e", 64, InitScheme::defaults(), rng, opts);
    // 2*(9*64*16 + 64) + (64*64 + 64)
    CHECK(store.param_count() == 22720);
}

TEST_CASE("cascading block: recursion base and fusion widths") {
    ParamStore store;
    Rng rng(19);
    CascadingBlock cb1 = build_cascading_block(store, "cb", 4, 1, InitScheme::defaults(), rng);
    Rng rng2(23);
    Tensor xt = rand_img(rng2, Shape{1, 4, 5, 5});

    ParamBinding pb(store);
    Var x = Var::leaf(xt, false);
    Var got = cascading_block(pb, x, cb1);

    ParamBinding pb2(store);
    Var r1 = residual_block(pb2, x, cb1.res[0]);
    Var expect = cb1.fuse[0](pb2, concat_channels({x, r1}));
    for (size_t i = 0; i < got.value().v.size(); i++)
        CHECK(got.value().v[i] == expect.value().v[i]);

    ParamStore store64;
    CascadingBlock cb3 = build_cascading_block(store64, "cb", 64, 3, InitScheme::defaults(), rng);
    CHECK(cb3.fuse[0].cin == 128);
    CHECK(cb3.fuse[1].cin == 192);
    CHECK(cb3.fuse[2].cin == 256);

    ParamBinding pb3(store64);
    Var y = cascading_block(pb3, Var::leaf(rand_img(rng2, Shape{1, 64, 8, 8}), false), cb3);
    CHECK(y.shape() == Shape{1, 64, 8, 8});
}

TEST_CASE("build_generator: full-size parameter budgets") {
    ModelSpec pcarn; // defaults: B=U=3, 64ch, scales {2,3,4}
    GeneratorModel g = GeneratorModel::build(pcarn, InitScheme::defaults(), 1);
    const int64_t params = g.params().param_count();
    CHECK(params == 1591939); // frozen from the layer arithmetic
    CHECK(std::abs(double(params) - 1589000.0) / 1589000.0 < 0.05);

    ModelSpec mobile = pcarn;
    mobile.efficient = true;
    mobile.group_size = 4;
    mobile.tied = true;
    GeneratorModel m = GeneratorModel::build(mobile, InitScheme::defaults(), 1);
    const int64_t mparams = m.params().param_count();
    CHECK(mparams == 414787);
    CHECK(std::abs(double(mparams) - 412000.0) / 412000.0 < 0.05);
    // "reduces the number of parameters by four times"
    CHECK(std::abs(double(mparams) / double(params) - 0.25) < 0.03);
}

TEST_CASE("build_generator: invalid specs name the offending field") {
    ModelSpec bad;
    bad.channels = 0;
    CHECK_THROWS_WITH_AS(GeneratorModel::build(bad, InitScheme::defaults(), 1),
                         doctest::Contains("channels"), std::invalid_argument);
    ModelSpec bad2;
    bad2.efficient = true;
    bad2.group_size = 5;
    CHECK_THROWS_WITH_AS(GeneratorModel::build(bad2, InitScheme::defaults(), 1),
                         doctest::Contains("group_size"), std::invalid_argument);
    ModelSpec bad3;
    bad3.scales = {5};
    CHECK_THROWS_WITH_AS(GeneratorModel::build(bad3, InitScheme::defaults(), 1),
                         doctest::Contains("scales"), std::invalid_argument);
}

TEST_CASE("tied model: canonical residual parameters are one block's") {
    ModelSpec spec = desk_spec(16);
    spec.efficient = true;
    spec.group_size = 4;
    spec.tied = true;
    GeneratorModel g = GeneratorModel::build(spec, InitScheme::defaults(), 2);

    // per cascading block: canonical residual tensors live under res_shared
    int64_t shared = 0, other_res = 0;
    for (const auto& e : g.params().entries()) {
        if (e.name.find("block1.res_shared") == 0) shared += e.value.count();
        else if (e.name.find("block1.res") == 0) other_res += e.value.count();
    }
    CHECK(other_res == 0);
    // 2*(9*16*4 + 16) + (16*16 + 16) for width 16, G=4
    CHECK(shared == 2 * (9 * 16 * 4 + 16) + (16 * 16 + 16));

    ModelSpec untied = spec;
    untied.tied = false;
    GeneratorModel gu = GeneratorModel::build(untied, InitScheme::defaults(), 2);
    const int64_t res_per_block = shared;
    CHECK(gu.params().param_count() - g.params().param_count() ==
          3 * 2 * res_per_block); // U-1 extra copies per cascading block
}

TEST_CASE("generator forward: shape contract and determinism") {
    GeneratorModel g = GeneratorModel::build(desk_spec(), InitScheme::defaults(), 3);
    Rng rng(29);
    Tensor lr = rand_img(rng, Shape{1, 3, 24, 24}, 0, 1);

    Tensor x2 = g.infer(lr, 2);
    CHECK(x2.shape == Shape{1, 3, 48, 48});
    CHECK(x2.all_finite());
    Tensor x3 = g.infer(lr, 3);
    CHECK(x3.shape == Shape{1, 3, 72, 72});
    Tensor x4 = g.infer(lr, 4);
    CHECK(x4.shape == Shape{1, 3, 96, 96});

    Tensor again = g.infer(lr, 4);
    CHECK(std::memcmp(x4.data(), again.data(), x4.v.size() * sizeof(float)) == 0);

    CHECK_THROWS_WITH_AS(g.infer(lr, 5), doctest::Contains("scale"), std::invalid_argument);
    ModelSpec only2 = desk_spec();
    only2.scales = {2};
    GeneratorModel g2 = GeneratorModel::build(only2, InitScheme::defaults(), 3);
    CHECK_THROWS_AS(g2.infer(lr, 4), std::invalid_argument);
}

TEST_CASE("conv trace: global fusion widths and upsample routing") {
    GeneratorModel g = GeneratorModel::build(desk_spec(), InitScheme::defaults(), 4);
    auto trace = g.conv_trace(4, 24, 24);
    int fusion_checked = 0;
    for (const auto& t : trace) {
        for (int b = 1; b <= 3; b++)
            if (t.name == "global_fuse" + std::to_string(b)) {
                CHECK(t.cin == (b + 1) * 16);
                CHECK(t.k == 1);
                fusion_checked++;
            }
        if (t.name == "exit") {
            CHECK(t.out_h == 96);
            CHECK(t.out_w == 96);
        }
    }
    CHECK(fusion_checked == 3);
    // x4 head runs two stages, the second at doubled extents
    auto s1 = std::find_if(trace.begin(), trace.end(),
                           [](const auto& t) { return t.name == "up4.stage1"; });
    auto s2 = std::find_if(trace.begin(), trace.end(),
                           [](const auto& t) { return t.name == "up4.stage2"; });
    REQUIRE(s1 != trace.end());
    REQUIRE(s2 != trace.end());
    CHECK(s1->out_h == 24);
    CHECK(s2->out_h == 48);
}

TEST_CASE("global residual ablation changes outputs") {
    GeneratorModel g = GeneratorModel::build(desk_spec(8), InitScheme::defaults(), 5);
    Rng rng(31);
    Tensor lr = rand_img(rng, Shape{1, 3, 16, 16}, 0, 1);
    ParamBinding p1(g.params(), false), p2(g.params(), false);
    Var with = g.forward(p1, Var::leaf(lr, false), 2);
    Var without = g.forward(p2, Var::leaf(lr, false), 2, {.global_residual = false});
    CHECK(with.shape() == without.shape());
    bool differs = false;
    for (size_t i = 0; i < with.value().v.size(); i++)
        if (with.value().v[i] != without.value().v[i]) differs = true;
    CHECK(differs);
}

TEST_CASE("tied gradients equal the per-site sum on untied clones") {
    ModelSpec tied = desk_spec(8);
    tied.blocks = 1;
    tied.efficient = true;
    tied.group_size = 2;
    tied.tied = true;
    tied.scales = {2};
    GeneratorModel gt = GeneratorModel::build(tied, InitScheme::defaults(), 6);

    ModelSpec untied = tied;
    untied.tied = false;
    GeneratorModel gu = GeneratorModel::build(untied, InitScheme::defaults(), 6);
    // mirror every tied weight into the untied clone
    for (auto& e : gu.params().entries()) {
        std::string src = e.name;
        for (int u = 1; u <= 3; u++) {
            const std::string site = "block1.res" + std::to_string(u) + ".";
            if (src.find(site) == 0)
                src = "block1.res_shared." + src.substr(site.size());
        }
        e.value = gt.params().value(src);
    }

    Rng rng(37);
    Tensor lr = rand_img(rng, Shape{1, 3, 8, 8}, 0, 1);
    Tensor target = rand_img(rng, Shape{1, 3, 16, 16}, 0, 1);

    auto run = [&](GeneratorModel& g) {
        g.params().zero_grads();
        ParamBinding pb(g.params());
        Var out = g.forward(pb, Var::leaf(lr, false), 2);
        backward(l1_loss(out, Var::leaf(target, false)));
        pb.collect_grads();
        return out.value();
    };
    Tensor out_t = run(gt);
    Tensor out_u = run(gu);
    for (size_t i = 0; i < out_t.v.size(); i++) CHECK(out_t.v[i] == out_u.v[i]);

    for (const char* part : {"g1.weight", "g1.bias", "g2.weight", "g2.bias",
                             "pw.weight", "pw.bias"}) {
        const Tensor& tied_grad = [&]() -> const Tensor& {
            for (const auto& e : gt.params().entries())
                if (e.name == std::string("block1.res_shared.") + part) return e.grad;
            throw std::runtime_error("missing tied grad");
        }();
        REQUIRE(!tied_grad.empty());
        Tensor sum(tied_grad.shape, 0.f);
        for (int u = 3; u >= 1; u--) { // reverse-topo order, matching accumulation
            for (const auto& e : gu.params().entries())
                if (e.name == "block1.res" + std::to_string(u) + "." + part) {
                    REQUIRE(!e.grad.empty());
                    for (size_t i = 0; i < sum.v.size(); i++) sum.v[i] += e.grad.v[i];
                }
        }
        for (size_t i = 0; i < sum.v.size(); i++)
            CHECK(std::abs(sum.v[i] - tied_grad.v[i]) < 1e-6f);
    }
}

TEST_CASE("weight file: bitwise round-trip including aliases") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "pcarn_wtest.pcrn").string();

    ModelSpec spec = desk_spec(8);
    spec.efficient = true;
    spec.group_size = 2;
    spec.tied = true;
    GeneratorModel a = GeneratorModel::build(spec, InitScheme::defaults(), 7);
    save_weights(path, a.params());

    GeneratorModel b = GeneratorModel::build(spec, InitScheme::defaults(), 8);
    load_weights(path, b.params());
    for (size_t i = 0; i < a.params().entries().size(); i++) {
        const auto& ea = a.params().entries()[i];
        const auto& eb = b.params().entries()[i];
        CHECK(ea.name == eb.name);
        CHECK(std::memcmp(ea.value.data(), eb.value.data(),
                          ea.value.v.size() * sizeof(float)) == 0);
    }
    CHECK(a.params().aliases() == b.params().aliases());

    // save -> load -> save produces identical bytes
    const std::string path2 = (fs::temp_directory_path() / "pcarn_wtest2.pcrn").string();
    save_weights(path2, b.params());
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), {});
    std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
    CHECK(!s1.empty());
    CHECK(s1.substr(0, 4) == "PCRN");

    // mismatched spec is rejected
    ModelSpec other = desk_spec(8);
    other.efficient = true;
    other.group_size = 2;
    other.tied = false;
    GeneratorModel c = GeneratorModel::build(other, InitScheme::defaults(), 9);
    CHECK_THROWS_AS(load_weights(path, c.params()), DataError);

    fs::remove(path);
    fs::remove(path2);
}
