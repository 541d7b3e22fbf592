// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_IMAGE_IO_HPP
#define PCARN_IMAGE_IO_HPP

#include <string>
#include <vector>

#include "pcarn/tensor.hpp"

namespace pcarn {

// 8-bit RGB raster, rows top-down, samples interleaved.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb; // 3 * width * height
};

// 8-bit PNGs only; grayscale/palette/alpha inputs are normalized to RGB,
// 16-bit depth is rejected. Errors carry the path and reason (DataError).
ImageBuffer load_png(const std::string& path);
void save_png(const ImageBuffer& img, const std::string& path);

// s -> s/255 into a (1,3,H,W) tensor; inverse rounds half away from zero and
// clamps to [0,255].
Tensor to_tensor(const ImageBuffer& img);
ImageBuffer to_image(const Tensor& t);

struct CorpusEntry {
    std::string path;
    int width = 0;
    int height = 0;
};

struct ScanReport {
    std::vector<CorpusEntry> images; // lexicographic by path
    std::vector<std::pair<std::string, std::string>> skipped; // path, reason
};

// Lists *.png under dir (non-recursive), skipping corrupt or sub-min_size
// files into the report. Rejects an unreadable directory.
ScanReport corpus_scan(const std::string& dir, int min_size);

// Decodes every scanned image into a (1,3,H,W) tensor, scan order preserved.
std::vector<Tensor> load_corpus(const ScanReport& scan);

} // namespace pcarn

#endif
