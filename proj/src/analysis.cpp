// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/analysis.hpp"

#include <algorithm>
#include <cstdio>

namespace pcarn {

CostReport cost_report(const GeneratorModel& model, int scale, int hr_w, int hr_h) {
    const int64_t lr_h = hr_h / scale;
    const int64_t lr_w = hr_w / scale;
    CostReport report;
    report.scale = scale;
    report.hr_w = hr_w;
    report.hr_h = hr_h;
    for (const auto& t : model.conv_trace(scale, lr_h, lr_w)) {
        CostReport::Row row;
        row.name = t.name;
        row.aliased = t.aliased;
        const int64_t weight_params =
            int64_t(t.k) * t.k * (t.cin / t.groups) * t.cout + (t.has_bias ? t.cout : 0);
        row.params = t.aliased ? 0 : weight_params;
        row.mult_adds = int64_t(t.k) * t.k * (t.cin / t.groups) * t.cout * t.out_h * t.out_w;
        report.total_params += row.params;
        report.total_mult_adds += row.mult_adds;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string CostReport::render_text() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "scale x%d at %dx%d (LR %dx%d)\n", scale, hr_w, hr_h,
                  hr_w / scale, hr_h / scale);
    out += line;
    std::snprintf(line, sizeof line, "%-24s %12s %16s\n", "layer", "params", "mult_adds");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-24s %12lld %16lld%s\n", r.name.c_str(),
                      static_cast<long long>(r.params), static_cast<long long>(r.mult_adds),
                      r.aliased ? "  (shared)" : "");
        out += line;
    }
    std::snprintf(line, sizeof line, "%-24s %12lld %16lld\n", "total",
                  static_cast<long long>(total_params),
                  static_cast<long long>(total_mult_adds));
    out += line;
    return out;
}

std::string CostReport::render_csv() const {
    std::string out = "layer,params,mult_adds,shared\n";
    char line[160];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%s,%lld,%lld,%d\n", r.name.c_str(),
                      static_cast<long long>(r.params), static_cast<long long>(r.mult_adds),
                      r.aliased ? 1 : 0);
        out += line;
    }
    std::snprintf(line, sizeof line, "total,%lld,%lld,\n",
                  static_cast<long long>(total_params),
                  static_cast<long long>(total_mult_adds));
    out += line;
    return out;
}

int64_t count_params(const GeneratorModel& model) {
    return model.params().param_count();
}

int64_t count_multadds(const GeneratorModel& model, int scale, int hr_w, int hr_h) {
    return cost_report(model, scale, hr_w, hr_h).total_mult_adds;
}

double eresidual_cost_ratio(int k, int g) {
    if (k < 1 || g < 1)
        throw std::invalid_argument("eresidual_cost_ratio: k and g must be >= 1");
    return 1.0 / double(g) + 1.0 / (2.0 * double(k) * double(k));
}

bool eresidual_ratio_matches_trace(int k, int g, int channels) {
    // Traced MACs per spatial position: standard block 2*K^2*C*C; efficient
    // block 2*K^2*C*(C/G) + C*C. Compare to (2K^2 + G)/(2K^2 G) exactly.
    const int64_t c = channels;
    const int64_t k2 = int64_t(k) * k;
    const int64_t traced_num = 2 * k2 * c * (c / g) + c * c;
    const int64_t traced_den = 2 * k2 * c * c;
    const int64_t closed_num = 2 * k2 + g;
    const int64_t closed_den = 2 * k2 * g;
    return traced_num * closed_den == closed_num * traced_den;
}

std::vector<SweepRow> efficiency_sweep(const ModelSpec& base,
                                       const std::vector<int>& group_sizes,
                                       const std::vector<bool>& tied_options,
                                       int scale, int hr_w, int hr_h) {
    std::vector<SweepRow> rows;
    for (int g : group_sizes) {
        for (bool tied : tied_options) {
            ModelSpec spec = base;
            spec.group_size = g;
            spec.efficient = g > 1;
            spec.tied = tied;
            GeneratorModel model = GeneratorModel::build(spec, InitScheme::defaults(), 0);
            SweepRow row;
            row.spec = spec;
            row.label = "G" + std::to_string(g) + (tied ? "R" : "");
            row.params = count_params(model);
            row.mult_adds = count_multadds(model, scale, hr_w, hr_h);
            rows.push_back(std::move(row));
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) {
                         return a.mult_adds < b.mult_adds;
                     });
    return rows;
}

} // namespace pcarn
