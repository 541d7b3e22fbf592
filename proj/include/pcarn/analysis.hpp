// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_ANALYSIS_HPP
#define PCARN_ANALYSIS_HPP

#include <string>
#include <vector>

#include "pcarn/generator.hpp"

namespace pcarn {

// Per-layer parameter and multiply-accumulate accounting for one forward at
// a target HR resolution. MACs count convolutions only (bias adds and
// nonlinearities excluded); aliased (tied) layers report zero params so the
// total honors weight tying while their compute still counts.
struct CostReport {
    struct Row {
        std::string name;
        int64_t params;
        int64_t mult_adds;
        bool aliased;
    };
    std::vector<Row> rows;
    int64_t total_params = 0;
    int64_t total_mult_adds = 0;
    int scale = 0;
    int hr_w = 0, hr_h = 0;

    std::string render_text() const;
    std::string render_csv() const;
};

// LR input extents are floor(hr/scale); per layer K^2*(Cin/G)*Cout*Hout*Wout.
CostReport cost_report(const GeneratorModel& model, int scale, int hr_w = 1280,
                       int hr_h = 720);

// Canonical parameter count (tying counted once, biases included).
int64_t count_params(const GeneratorModel& model);
int64_t count_multadds(const GeneratorModel& model, int scale, int hr_w = 1280,
                       int hr_h = 720);

// Eq.-12 style cost ratio of an efficient residual block versus a standard
// one: 1/G + 1/(2K^2).
double eresidual_cost_ratio(int k, int g);

// Exact rational cross-check of the closed form against traced per-layer MAC
// counts for a width-`channels` residual block.
bool eresidual_ratio_matches_trace(int k, int g, int channels);

struct SweepRow {
    ModelSpec spec;
    std::string label; // e.g. "G4R"
    int64_t params;
    int64_t mult_adds;
};

// Enumerates (group size) x (tied) variants of the base spec, sorted by
// mult_adds ascending. G=1 rows use the standard residual block (the
// pointwise mixing conv only exists in grouped variants).
std::vector<SweepRow> efficiency_sweep(const ModelSpec& base,
                                       const std::vector<int>& group_sizes,
                                       const std::vector<bool>& tied_options,
                                       int scale = 4, int hr_w = 1280, int hr_h = 720);

} // namespace pcarn

#endif
