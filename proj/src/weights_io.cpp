// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/weights_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "pcarn/errors.hpp"

namespace pcarn {

namespace {

constexpr char kMagic[4] = {'P', 'C', 'R', 'N'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& os, uint32_t v) {
    uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is, const std::string& path) {
    uint8_t b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw DataError(path + ": truncated file");
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void put_string(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is, const std::string& path) {
    const uint32_t len = get_u32(is, path);
    std::string s(len, '\0');
    if (!is.read(s.data(), len)) throw DataError(path + ": truncated file");
    return s;
}

void put_f32(std::ostream& os, const float* data, size_t count) {
    // Little-endian both in the file and on every platform this builds for.
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(count * sizeof(float)));
}

} // namespace

void save_weights(const std::string& path, const ParamStore& store) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError(path + ": cannot open for writing");
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<uint32_t>(store.entries().size()));
    put_u32(os, static_cast<uint32_t>(store.aliases().size()));
    for (const auto& e : store.entries()) {
        put_string(os, e.name);
        const Shape s = e.value.shape;
        put_u32(os, static_cast<uint32_t>(s.n));
        put_u32(os, static_cast<uint32_t>(s.c));
        put_u32(os, static_cast<uint32_t>(s.h));
        put_u32(os, static_cast<uint32_t>(s.w));
        put_f32(os, e.value.data(), e.value.v.size());
    }
    for (const auto& [name, canonical] : store.aliases()) {
        put_string(os, name);
        put_string(os, canonical);
    }
    if (!os) throw DataError(path + ": write failed");
}

void load_weights(const std::string& path, ParamStore& store) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError(path + ": cannot open");
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError(path + ": bad magic (not a PCRN weight file)");
    const uint32_t version = get_u32(is, path);
    if (version != kVersion)
        throw DataError(path + ": unsupported version " + std::to_string(version));
    const uint32_t n_entries = get_u32(is, path);
    const uint32_t n_aliases = get_u32(is, path);
    if (n_entries != store.entries().size())
        throw DataError(path + ": entry count " + std::to_string(n_entries) +
                        " does not match model (" + std::to_string(store.entries().size()) + ")");
    for (uint32_t i = 0; i < n_entries; i++) {
        const std::string name = get_string(is, path);
        Shape s;
        s.n = get_u32(is, path);
        s.c = get_u32(is, path);
        s.h = get_u32(is, path);
        s.w = get_u32(is, path);
        if (!store.has(name) || store.is_alias(name))
            throw DataError(path + ": unknown canonical parameter '" + name + "'");
        Tensor& dst = store.value(name);
        if (dst.shape != s)
            throw DataError(path + ": shape mismatch for '" + name + "': file " + s.str() +
                            " vs model " + dst.shape.str());
        if (!is.read(reinterpret_cast<char*>(dst.data()),
                     static_cast<std::streamsize>(dst.v.size() * sizeof(float))))
            throw DataError(path + ": truncated tensor data for '" + name + "'");
    }
    std::map<std::string, std::string> file_aliases;
    for (uint32_t i = 0; i < n_aliases; i++) {
        std::string alias = get_string(is, path);
        std::string canonical = get_string(is, path);
        file_aliases[std::move(alias)] = std::move(canonical);
    }
    if (file_aliases != store.aliases())
        throw DataError(path + ": alias records do not match the model's weight tying");
}

} // namespace pcarn
