// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pcarn/errors.hpp"
#include "pcarn/image_io.hpp"
#include "pcarn/rng.hpp"
#include "support/png_fixtures.hpp"

using namespace pcarn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir(const char* tag) : dir(fs::temp_directory_path() / tag) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string operator/(const char* name) const { return (dir / name).string(); }
};

void write_bytes(const std::string& path, const unsigned char* data, size_t len) {
    std::ofstream os(path, std::ios::binary);
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
}

} // namespace

TEST_CASE("png: lossless 8-bit RGB round-trip") {
    TempDir tmp("pcarn_io_rt");
    Rng rng(1);
    ImageBuffer img;
    img.width = 13;
    img.height = 7;
    img.rgb.resize(13 * 7 * 3);
    for (auto& s : img.rgb) s = static_cast<uint8_t>(rng.below(256));

    const std::string path = tmp / "rt.png";
    save_png(img, path);
    ImageBuffer back = load_png(path);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.rgb == img.rgb);
}

TEST_CASE("png: 1x1 red pixel") {
    TempDir tmp("pcarn_io_red");
    ImageBuffer img;
    img.width = img.height = 1;
    img.rgb = {255, 0, 0};
    const std::string path = tmp / "red.png";
    save_png(img, path);
    ImageBuffer back = load_png(path);
    CHECK(back.rgb == std::vector<uint8_t>{255, 0, 0});
}

TEST_CASE("png: 16-bit depth rejected with path and reason") {
    TempDir tmp("pcarn_io_16");
    const std::string path = tmp / "deep.png";
    write_bytes(path, testsupport::kPng16, testsupport::kPng16_len);
    CHECK_THROWS_WITH_AS(load_png(path), doctest::Contains("bit depth"), DataError);
    CHECK_THROWS_WITH_AS(load_png(path), doctest::Contains("deep.png"), DataError);
}

TEST_CASE("png: grayscale replicates into three channels") {
    TempDir tmp("pcarn_io_gray");
    const std::string path = tmp / "gray.png";
    write_bytes(path, testsupport::kPngGray, testsupport::kPngGray_len);
    ImageBuffer img = load_png(path);
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 2);
    const uint8_t expect[4] = {0, 128, 255, 64};
    for (int i = 0; i < 4; i++)
        for (int c = 0; c < 3; c++) CHECK(img.rgb[static_cast<size_t>(i * 3 + c)] == expect[i]);
}

TEST_CASE("tensor conversion: exact forward map, round-half-away inverse, clamping") {
    ImageBuffer img;
    img.width = 2;
    img.height = 1;
    img.rgb = {0, 51, 255, 128, 7, 200};
    Tensor t = to_tensor(img);
    CHECK(t.shape == Shape{1, 3, 1, 2});
    CHECK(t.at(0, 0, 0, 0) == 0.f);
    CHECK(t.at(0, 1, 0, 0) == doctest::Approx(51.f / 255.f));
    CHECK(t.at(0, 2, 0, 1) == doctest::Approx(200.f / 255.f));

    ImageBuffer back = to_image(t);
    CHECK(back.rgb == img.rgb);

    Tensor wild(Shape{1, 3, 1, 1});
    wild.at(0, 0, 0, 0) = -0.5f;          // clamps to 0
    wild.at(0, 1, 0, 0) = 1.7f;           // clamps to 255
    wild.at(0, 2, 0, 0) = 76.5f / 255.f;  // rounds half away from zero -> 77
    ImageBuffer w = to_image(wild);
    CHECK(w.rgb[0] == 0);
    CHECK(w.rgb[1] == 255);
    CHECK(w.rgb[2] == 77);
}

TEST_CASE("corpus_scan: ordering, skip reports, empty dir") {
    TempDir tmp("pcarn_io_scan");
    ScanReport empty = corpus_scan(tmp.dir.string(), 1);
    CHECK(empty.images.empty());

    ImageBuffer big;
    big.width = big.height = 32;
    big.rgb.assign(32 * 32 * 3, 100);
    ImageBuffer small;
    small.width = small.height = 4;
    small.rgb.assign(4 * 4 * 3, 100);
    save_png(big, tmp / "b.png");
    save_png(big, tmp / "a.png");
    save_png(small, tmp / "tiny.png");
    write_bytes(tmp / "broken.png", testsupport::kPngGray, 20); // truncated file

    ScanReport r = corpus_scan(tmp.dir.string(), 16);
    REQUIRE(r.images.size() == 2);
    CHECK(r.images[0].path < r.images[1].path); // lexicographic
    CHECK(r.images[0].path.find("a.png") != std::string::npos);
    REQUIRE(r.skipped.size() == 2);

    ScanReport r2 = corpus_scan(tmp.dir.string(), 16);
    CHECK(r2.images.size() == r.images.size());
    CHECK(r2.images[0].path == r.images[0].path); // stable across runs

    CHECK(load_corpus(r).size() == 2);
    CHECK_THROWS_AS(corpus_scan((tmp.dir / "missing").string(), 1), DataError);
}
