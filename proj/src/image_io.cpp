// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "pcarn/errors.hpp"

namespace pcarn {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
    throw DataError(path + ": " + reason);
}

// libpng's default handlers print to stderr before the longjmp; ours do not.
void quiet_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }
void quiet_warning(png_structp, png_const_charp) {}

} // namespace

ImageBuffer load_png(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) fail(path, "cannot open");

    uint8_t sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        fail(path, "not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             quiet_error, quiet_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng init failed");
    }
    ImageBuffer img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "malformed PNG");
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported bit depth 16 (8-bit only)");
    }
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    if (png_get_rowbytes(png, info) != size_t(w) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unexpected row layout after RGB normalization");
    }

    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.rgb.resize(size_t(w) * h * 3);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; y++) rows[y] = img.rgb.data() + size_t(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const ImageBuffer& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0 ||
        img.rgb.size() != size_t(img.width) * img.height * 3)
        throw DataError(path + ": inconsistent image buffer");
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              quiet_error, quiet_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG write failed");
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; y++)
        png_write_row(png, const_cast<png_bytep>(img.rgb.data() + size_t(y) * img.width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Tensor to_tensor(const ImageBuffer& img) {
    Tensor t(Shape{1, 3, img.height, img.width});
    for (int64_t y = 0; y < img.height; y++)
        for (int64_t x = 0; x < img.width; x++)
            for (int64_t c = 0; c < 3; c++)
                t.at(0, c, y, x) =
                    float(img.rgb[static_cast<size_t>((y * img.width + x) * 3 + c)]) / 255.f;
    return t;
}

ImageBuffer to_image(const Tensor& t) {
    if (t.shape.n != 1 || t.shape.c != 3)
        throw std::invalid_argument("to_image: expected (1,3,H,W), got " + t.shape.str());
    ImageBuffer img;
    img.height = static_cast<int>(t.shape.h);
    img.width = static_cast<int>(t.shape.w);
    img.rgb.resize(size_t(img.width) * img.height * 3);
    for (int64_t y = 0; y < t.shape.h; y++)
        for (int64_t x = 0; x < t.shape.w; x++)
            for (int64_t c = 0; c < 3; c++) {
                const long q = std::lround(double(t.at(0, c, y, x)) * 255.0);
                img.rgb[static_cast<size_t>((y * img.width + x) * 3 + c)] =
                    static_cast<uint8_t>(std::clamp(q, 0L, 255L));
            }
    return img;
}

ScanReport corpus_scan(const std::string& dir, int min_size) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw DataError(dir + ": not a readable directory");

    std::vector<std::string> paths;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
        if (!e.is_regular_file()) continue;
        if (e.path().extension() == ".png") paths.push_back(e.path().string());
    }
    if (ec) throw DataError(dir + ": " + ec.message());
    std::sort(paths.begin(), paths.end());

    ScanReport report;
    for (const auto& p : paths) {
        try {
            ImageBuffer img = load_png(p);
            if (img.width < min_size || img.height < min_size) {
                report.skipped.emplace_back(p, "smaller than minimum size " +
                                                   std::to_string(min_size));
                continue;
            }
            report.images.push_back({p, img.width, img.height});
        } catch (const DataError& err) {
            report.skipped.emplace_back(p, err.what());
        }
    }
    return report;
}

std::vector<Tensor> load_corpus(const ScanReport& scan) {
    std::vector<Tensor> out;
    out.reserve(scan.images.size());
    for (const auto& e : scan.images) out.push_back(to_tensor(load_png(e.path)));
    return out;
}

} // namespace pcarn
