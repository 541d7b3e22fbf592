// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pcarn/errors.hpp"

namespace pcarn {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

int64_t parse_i64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int64_t r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config: " + key + ": expected integer, got '" + v + "'");
    }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const uint64_t r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config: " + key + ": expected unsigned integer, got '" + v + "'");
    }
}

double parse_f64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config: " + key + ": expected number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: " + key + ": expected true/false, got '" + v + "'");
}

std::vector<int> parse_scales(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_i64(key, item)));
    }
    if (out.empty()) throw ConfigError("config: " + key + ": empty scale list");
    return out;
}

std::string scales_str(const std::vector<int>& scales) {
    std::string s;
    for (size_t i = 0; i < scales.size(); i++) {
        if (i) s += ",";
        s += std::to_string(scales[i]);
    }
    return s;
}

std::string f64_str(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "model.blocks") model.blocks = static_cast<int>(parse_i64(key, v));
    else if (key == "model.units") model.units = static_cast<int>(parse_i64(key, v));
    else if (key == "model.channels") model.channels = static_cast<int>(parse_i64(key, v));
    else if (key == "model.group_size") model.group_size = static_cast<int>(parse_i64(key, v));
    else if (key == "model.tied") model.tied = parse_bool(key, v);
    else if (key == "model.efficient") model.efficient = parse_bool(key, v);
    else if (key == "model.scales") model.scales = parse_scales(key, v);
    else if (key == "model.init") {
        try {
            init = InitScheme::parse(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: model.init: ") + e.what());
        }
    } else if (key == "train.batch") train.batch = static_cast<int>(parse_i64(key, v));
    else if (key == "train.lr0") train.lr0 = parse_f64(key, v);
    else if (key == "train.lr_half_period") train.lr_half_period = parse_i64(key, v);
    else if (key == "train.phase1_steps") train.phase1_steps = parse_i64(key, v);
    else if (key == "train.phase2_steps") train.phase2_steps = parse_i64(key, v);
    else if (key == "train.beta1") train.beta1 = parse_f64(key, v);
    else if (key == "train.beta2") train.beta2 = parse_f64(key, v);
    else if (key == "train.eps") train.eps = parse_f64(key, v);
    else if (key == "train.patch") train.patch = static_cast<int>(parse_i64(key, v));
    else if (key == "train.scales") train.scales = parse_scales(key, v);
    else if (key == "train.lambda_vgg") train.lambda_vgg = parse_f64(key, v);
    else if (key == "train.pixel_weight") train.pixel_weight = parse_f64(key, v);
    else if (key == "train.seed") train.seed = parse_u64(key, v);
    else if (key == "paths.corpus") paths.corpus = v;
    else if (key == "paths.weights_in") paths.weights_in = v;
    else if (key == "paths.weights_out") paths.weights_out = v;
    else if (key == "paths.disc_weights_out") paths.disc_weights_out = v;
    else if (key == "paths.log") paths.log = v;
    else throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig RunConfig::from_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        lineno++;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: " + origin + ":" + std::to_string(lineno) +
                              ": expected key=value, got '" + line + "'");
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    return from_text(buf.str(), path);
}

std::string RunConfig::dump() const {
    std::string out;
    out += "model.blocks = " + std::to_string(model.blocks) + "\n";
    out += "model.units = " + std::to_string(model.units) + "\n";
    out += "model.channels = " + std::to_string(model.channels) + "\n";
    out += "model.group_size = " + std::to_string(model.group_size) + "\n";
    out += std::string("model.tied = ") + (model.tied ? "true" : "false") + "\n";
    out += std::string("model.efficient = ") + (model.efficient ? "true" : "false") + "\n";
    out += "model.scales = " + scales_str(model.scales) + "\n";
    out += "model.init = " + init.str() + "\n";
    out += "train.batch = " + std::to_string(train.batch) + "\n";
    out += "train.lr0 = " + f64_str(train.lr0) + "\n";
    out += "train.lr_half_period = " + std::to_string(train.lr_half_period) + "\n";
    out += "train.phase1_steps = " + std::to_string(train.phase1_steps) + "\n";
    out += "train.phase2_steps = " + std::to_string(train.phase2_steps) + "\n";
    out += "train.beta1 = " + f64_str(train.beta1) + "\n";
    out += "train.beta2 = " + f64_str(train.beta2) + "\n";
    out += "train.eps = " + f64_str(train.eps) + "\n";
    out += "train.patch = " + std::to_string(train.patch) + "\n";
    out += "train.scales = " + scales_str(train.scales) + "\n";
    out += "train.lambda_vgg = " + f64_str(train.lambda_vgg) + "\n";
    out += "train.pixel_weight = " + f64_str(train.pixel_weight) + "\n";
    out += "train.seed = " + std::to_string(train.seed) + "\n";
    out += "paths.corpus = " + paths.corpus + "\n";
    out += "paths.weights_in = " + paths.weights_in + "\n";
    out += "paths.weights_out = " + paths.weights_out + "\n";
    out += "paths.disc_weights_out = " + paths.disc_weights_out + "\n";
    out += "paths.log = " + paths.log + "\n";
    return out;
}

} // namespace pcarn
