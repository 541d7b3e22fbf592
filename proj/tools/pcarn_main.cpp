// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Operator CLI: analyze | train | finetune | sr | eval | gradcheck | init-hist.
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pcarn/analysis.hpp"
#include "pcarn/config.hpp"
#include "pcarn/errors.hpp"
#include "pcarn/image_io.hpp"
#include "pcarn/metrics.hpp"
#include "pcarn/refcheck.hpp"
#include "pcarn/resample.hpp"
#include "pcarn/training.hpp"
#include "pcarn/weights_io.hpp"

namespace {

using namespace pcarn;

struct CommonFlags {
    std::string config_file;
    std::vector<std::string> sets;
    int64_t seed = -1;
    int channels = 0;
    int group = 0;
    bool tied = false;
    bool dump = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_file, "config file (key=value lines)");
    cmd->add_option("--set", f.sets, "override one config key, e.g. --set train.batch=8");
    cmd->add_option("--seed", f.seed, "RNG seed (train.seed)");
    cmd->add_option("--channels", f.channels, "generator feature width");
    cmd->add_option("--group", f.group,
                    "group size; values > 1 switch to the efficient blocks");
    cmd->add_flag("--tied", f.tied, "share residual-block weights within each block");
    cmd->add_flag("--dump-config", f.dump, "print the merged config and exit");
}

RunConfig merge_config(const CommonFlags& f) {
    RunConfig cfg = f.config_file.empty() ? RunConfig{} : RunConfig::from_file(f.config_file);
    for (const auto& kv : f.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (f.seed >= 0) cfg.train.seed = static_cast<uint64_t>(f.seed);
    if (f.channels > 0) cfg.model.channels = f.channels;
    if (f.group > 0) {
        cfg.model.group_size = f.group;
        cfg.model.efficient = f.group > 1;
    }
    if (f.tied) cfg.model.tied = true;
    return cfg;
}

// True when the command should stop after printing the merged config.
bool handle_dump(const CommonFlags& f, const RunConfig& cfg) {
    if (!f.dump) return false;
    std::cout << cfg.dump();
    return true;
}

void announce(const char* cmd, const RunConfig& cfg) {
    std::cerr << "pcarn " << cmd << ": seed=" << cfg.train.seed << "\n";
}

std::vector<Tensor> load_training_corpus(const RunConfig& cfg) {
    if (cfg.paths.corpus.empty())
        throw ConfigError("paths.corpus is required for this command");
    int max_scale = 1;
    for (int r : cfg.train.scales) max_scale = std::max(max_scale, r);
    ScanReport scan = corpus_scan(cfg.paths.corpus, cfg.train.patch * max_scale);
    for (const auto& [path, reason] : scan.skipped)
        std::cerr << "warning: skipped " << path << ": " << reason << "\n";
    if (scan.images.empty())
        throw DataError(cfg.paths.corpus + ": no usable images (need >= " +
                        std::to_string(cfg.train.patch * max_scale) + "px)");
    return load_corpus(scan);
}

std::ofstream open_log(const std::string& path) {
    std::ofstream log(path, std::ios::trunc);
    if (!log) throw DataError(path + ": cannot open log for writing");
    return log;
}

int cmd_analyze(const CommonFlags& f, const std::vector<int>& scales, bool csv, bool sweep) {
    RunConfig cfg = merge_config(f);
    if (handle_dump(f, cfg)) return 0;
    GeneratorModel model = GeneratorModel::build(cfg.model, cfg.init, cfg.train.seed);

    char line[160];
    // headline: whole multi-scale model (all upsample heads), tying honored
    if (csv)
        std::snprintf(line, sizeof line, "model_params,%lld,,\n",
                      static_cast<long long>(count_params(model)));
    else
        std::snprintf(line, sizeof line, "model parameters (all scales): %lld\n\n",
                      static_cast<long long>(count_params(model)));
    std::cout << line;

    const std::vector<int>& use = scales.empty() ? cfg.model.scales : scales;
    for (int r : use) {
        CostReport report = cost_report(model, r);
        std::cout << (csv ? report.render_csv() : report.render_text()) << "\n";
    }

    std::cout << "eresidual cost ratio (K=3):\n";
    for (int g : {1, 2, 4, 8, 16, 32, 64}) {
        const double ratio = eresidual_cost_ratio(3, g);
        std::snprintf(line, sizeof line, "G=%-3d ratio %.4f  reduction %.2fx\n", g, ratio,
                      1.0 / ratio);
        std::cout << line;
    }

    if (sweep) {
        std::cout << "\nefficiency sweep (x4, 720p):\n";
        for (const auto& row :
             efficiency_sweep(cfg.model, {1, 2, 4, 8, 16, 32, 64}, {false, true})) {
            std::snprintf(line, sizeof line, "%-6s params %10lld  mult_adds %14lld\n",
                          row.label.c_str(), static_cast<long long>(row.params),
                          static_cast<long long>(row.mult_adds));
            std::cout << line;
        }
    }
    return 0;
}

int cmd_train(const CommonFlags& f) {
    RunConfig cfg = merge_config(f);
    if (handle_dump(f, cfg)) return 0;
    announce("train", cfg);

    GeneratorModel gen = GeneratorModel::build(cfg.model, cfg.init, cfg.train.seed);
    if (!cfg.paths.weights_in.empty()) load_weights(cfg.paths.weights_in, gen.params());

    std::vector<Tensor> corpus = load_training_corpus(cfg);
    std::ofstream log = open_log(cfg.paths.log);
    train_phase1(gen, cfg.train, corpus, &log);
    save_weights(cfg.paths.weights_out, gen.params());
    std::cerr << "wrote " << cfg.paths.weights_out << " and " << cfg.paths.log << "\n";
    return 0;
}

int cmd_finetune(const CommonFlags& f) {
    RunConfig cfg = merge_config(f);
    if (handle_dump(f, cfg)) return 0;
    announce("finetune", cfg);
    if (cfg.paths.weights_in.empty())
        throw ConfigError("finetune requires paths.weights_in (a phase-1 generator)");

    GeneratorModel gen = GeneratorModel::build(cfg.model, cfg.init, cfg.train.seed);
    load_weights(cfg.paths.weights_in, gen.params());
    MultiScaleDiscriminator msd =
        MultiScaleDiscriminator::build(3, cfg.init, cfg.train.seed + 1);
    FeatureExtractor fx = FeatureExtractor::build(cfg.train.seed + 2);

    std::vector<Tensor> corpus = load_training_corpus(cfg);
    std::ofstream log = open_log(cfg.paths.log);
    train_phase2(gen, msd, fx, cfg.train, corpus, &log);
    save_weights(cfg.paths.weights_out, gen.params());
    if (!cfg.paths.disc_weights_out.empty())
        save_weights(cfg.paths.disc_weights_out, msd.params());
    std::cerr << "wrote " << cfg.paths.weights_out << " and " << cfg.paths.log << "\n";
    return 0;
}

int cmd_sr(const CommonFlags& f, const std::string& in_path, const std::string& out_path,
           int scale) {
    RunConfig cfg = merge_config(f);
    if (handle_dump(f, cfg)) return 0;
    announce("sr", cfg);
    if (cfg.paths.weights_in.empty()) throw ConfigError("sr requires paths.weights_in");

    GeneratorModel gen = GeneratorModel::build(cfg.model, cfg.init, cfg.train.seed);
    load_weights(cfg.paths.weights_in, gen.params());
    Tensor lr = to_tensor(load_png(in_path));
    Tensor sr = gen.infer(lr, scale);
    save_png(to_image(sr), out_path);
    std::cerr << "wrote " << out_path << " (" << sr.shape.w << "x" << sr.shape.h << ")\n";
    return 0;
}

// Largest top-left crop whose extents divide by r.
Tensor crop_to_multiple(const Tensor& t, int r) {
    const int64_t h = t.shape.h - t.shape.h % r;
    const int64_t w = t.shape.w - t.shape.w % r;
    return crop(t, 0, 0, h, w);
}

int cmd_eval(const CommonFlags& f, const std::string& hr_dir, const std::string& lr_dir,
             int scale) {
    RunConfig cfg = merge_config(f);
    if (handle_dump(f, cfg)) return 0;
    announce("eval", cfg);
    if (cfg.paths.weights_in.empty()) throw ConfigError("eval requires paths.weights_in");
    if (hr_dir.empty())
        throw ConfigError("eval needs --hr-dir (reference images; PSNR/SSIM are "
                          "undefined without ground truth). Pair with --lr-dir to "
                          "evaluate pre-degraded inputs.");

    GeneratorModel gen = GeneratorModel::build(cfg.model, cfg.init, cfg.train.seed);
    load_weights(cfg.paths.weights_in, gen.params());

    ScanReport hr_scan = corpus_scan(hr_dir, 16 * scale);
    for (const auto& [path, reason] : hr_scan.skipped)
        std::cerr << "warning: skipped " << path << ": " << reason << "\n";
    if (hr_scan.images.empty()) throw DataError(hr_dir + ": no usable images");

    double sum_p = 0, sum_s = 0, sum_bp = 0, sum_bs = 0;
    std::printf("%-28s %10s %8s %12s %10s\n", "image", "psnr", "ssim", "psnr_bicubic",
                "ssim_bicubic");
    for (const auto& entry : hr_scan.images) {
        Tensor hr = crop_to_multiple(to_tensor(load_png(entry.path)), scale);
        Tensor lr;
        if (lr_dir.empty()) {
            lr = degrade_bicubic(hr, scale);
        } else {
            namespace fs = std::filesystem;
            const std::string lr_path =
                (fs::path(lr_dir) / fs::path(entry.path).filename()).string();
            lr = to_tensor(load_png(lr_path));
            if (lr.shape.h != hr.shape.h / scale || lr.shape.w != hr.shape.w / scale)
                throw DataError(lr_path + ": LR extents " + lr.shape.str() +
                                " do not match HR/" + std::to_string(scale));
        }
        Tensor sr = gen.infer(lr, scale);
        Tensor bicubic = bicubic_resize(lr, hr.shape.h, hr.shape.w);
        const double p = psnr(sr, hr, 1.0), s = ssim(sr, hr);
        const double bp = psnr(bicubic, hr, 1.0), bs = ssim(bicubic, hr);
        sum_p += p;
        sum_s += s;
        sum_bp += bp;
        sum_bs += bs;
        std::printf("%-28s %10.4f %8.4f %12.4f %10.4f\n",
                    std::filesystem::path(entry.path).filename().string().c_str(), p, s,
                    bp, bs);
    }
    const double n = double(hr_scan.images.size());
    std::printf("%-28s %10.4f %8.4f %12.4f %10.4f\n", "mean", sum_p / n, sum_s / n,
                sum_bp / n, sum_bs / n);
    return 0;
}

int cmd_gradcheck(uint64_t seed, double tol) {
    bool all_pass = true;
    for (const auto& r : ref::gradcheck_suite(seed, tol)) {
        std::printf("%-22s max_rel_err %.3e  %s\n", r.name.c_str(), r.max_rel_err,
                    r.pass ? "PASS" : "FAIL");
        all_pass = all_pass && r.pass;
    }
    if (!all_pass) {
        std::cerr << "gradcheck: failures above tolerance " << tol << "\n";
        return 3;
    }
    return 0;
}

int cmd_init_hist(const CommonFlags& f, int bins, int64_t cap, const std::string& out) {
    RunConfig cfg = merge_config(f);
    if (handle_dump(f, cfg)) return 0;
    announce("init-hist", cfg);
    GeneratorModel model = GeneratorModel::build(cfg.model, cfg.init, cfg.train.seed);
    Histogram h = init_histogram(model.params(), bins, cap);
    if (out.empty()) {
        std::cout << h.render();
    } else {
        std::ofstream os(out, std::ios::trunc);
        if (!os) throw DataError(out + ": cannot open for writing");
        os << h.render();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCARN super-resolution: training, inference and model analysis"};
    app.require_subcommand(1);

    CommonFlags fa, ft, ff, fs, fe, fh;
    std::vector<int> analyze_scales;
    bool analyze_csv = false, analyze_sweep = false;
    std::string sr_in, sr_out, eval_hr, eval_lr, hist_out;
    int sr_scale = 2, eval_scale = 2;
    int hist_bins = 1000;
    int64_t hist_cap = 100000;
    int64_t gc_seed = 12345;
    double gc_tol = 1e-4;

    CLI::App* analyze = app.add_subcommand("analyze", "parameter and Mult-Adds report");
    add_common(analyze, fa);
    analyze->add_option("--scale", analyze_scales, "restrict to these scales");
    analyze->add_flag("--csv", analyze_csv, "machine-readable rows");
    analyze->add_flag("--sweep", analyze_sweep, "group-size/tying efficiency sweep");

    CLI::App* train = app.add_subcommand("train", "phase 1: pixel-loss training");
    add_common(train, ft);

    CLI::App* finetune = app.add_subcommand("finetune", "phase 2: adversarial fine-tune");
    add_common(finetune, ff);

    CLI::App* sr = app.add_subcommand("sr", "upscale one PNG");
    add_common(sr, fs);
    sr->add_option("--in", sr_in, "input PNG")->required();
    sr->add_option("--out", sr_out, "output PNG")->required();
    sr->add_option("--scale", sr_scale, "upscale factor")->required();

    CLI::App* eval = app.add_subcommand("eval", "PSNR/SSIM over a directory");
    add_common(eval, fe);
    eval->add_option("--hr-dir", eval_hr, "reference (HR) images");
    eval->add_option("--lr-dir", eval_lr, "optional pre-degraded inputs (paired by name)");
    eval->add_option("--scale", eval_scale, "upscale factor")->required();

    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference suite");
    gradcheck->add_option("--seed", gc_seed, "suite seed");
    gradcheck->add_option("--tol", gc_tol, "relative-error tolerance");

    CLI::App* init_hist = app.add_subcommand("init-hist", "initialization histogram");
    add_common(init_hist, fh);
    init_hist->add_option("--bins", hist_bins, "bin count");
    init_hist->add_option("--cap", hist_cap, "max sampled parameters");
    init_hist->add_option("--out", hist_out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed())
            return cmd_analyze(fa, analyze_scales, analyze_csv, analyze_sweep);
        if (train->parsed()) return cmd_train(ft);
        if (finetune->parsed()) return cmd_finetune(ff);
        if (sr->parsed()) return cmd_sr(fs, sr_in, sr_out, sr_scale);
        if (eval->parsed()) return cmd_eval(fe, eval_hr, eval_lr, eval_scale);
        if (gradcheck->parsed())
            return cmd_gradcheck(static_cast<uint64_t>(gc_seed), gc_tol);
        if (init_hist->parsed()) return cmd_init_hist(fh, hist_bins, hist_cap, hist_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
