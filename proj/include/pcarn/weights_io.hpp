// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_WEIGHTS_IO_HPP
#define PCARN_WEIGHTS_IO_HPP

#include <string>

#include "pcarn/params.hpp"

namespace pcarn {

// Weight file: magic "PCRN", u32 version (1), u32 canonical entry count,
// u32 alias count; per entry u32 name length + name bytes, shape as 4xu32,
// then little-endian f32 values; per alias two length-prefixed names
// (alias -> canonical). Save/load round-trips are bitwise exact.
void save_weights(const std::string& path, const ParamStore& store);

// Loads into a store built from the same spec: every file entry must match
// an existing canonical entry's name and shape, and alias records must agree.
void load_weights(const std::string& path, ParamStore& store);

} // namespace pcarn

#endif
