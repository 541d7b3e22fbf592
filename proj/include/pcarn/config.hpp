// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_CONFIG_HPP
#define PCARN_CONFIG_HPP

#include <string>

#include "pcarn/generator.hpp"
#include "pcarn/training.hpp"

namespace pcarn {

// Flat key=value configuration with section prefixes (model., train.,
// paths.). '#' starts a comment; unknown keys are errors; every field has a
// default, so an empty config is valid. dump() output re-parses to an
// equivalent config.
struct RunConfig {
    ModelSpec model;
    InitScheme init = InitScheme::defaults();
    TrainConfig train;
    struct Paths {
        std::string corpus;
        std::string weights_in;
        std::string weights_out = "weights.pcrn";
        std::string disc_weights_out;
        std::string log = "train.log";
    } paths;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_text(const std::string& text, const std::string& origin = "<text>");
    void set(const std::string& key, const std::string& value); // ConfigError on bad key
    std::string dump() const;
};

} // namespace pcarn

#endif
