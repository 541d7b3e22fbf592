// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Tiny pre-encoded PNGs: a 4x3 16-bit grayscale image (unsupported depth)
// and a 2x2 8-bit grayscale image with samples {0,128 / 255,64}.

#ifndef PCARN_TESTS_SUPPORT_PNG_FIXTURES_HPP
#define PCARN_TESTS_SUPPORT_PNG_FIXTURES_HPP

#include <cstddef>

namespace pcarn::testsupport {

inline constexpr unsigned char kPng16[] = {
    137, 80, 78, 71, 13, 10, 26, 10, 0, 0, 0, 13, 73, 72, 68, 82,
    0, 0, 0, 4, 0, 0, 0, 3, 16, 0, 0, 0, 0, 193, 15, 45,
    89, 0, 0, 0, 28, 73, 68, 65, 84, 120, 156, 99, 96, 96, 16, 238,
    80, 23, 176, 154, 193, 226, 167, 32, 172, 32, 162, 32, 172, 0, 103, 0,
    0, 54, 249, 3, 189, 17, 60, 167, 61, 0, 0, 0, 0, 73, 69, 78,
    68, 174, 66, 96, 130,
};
inline constexpr size_t kPng16_len = 85;

inline constexpr unsigned char kPngGray[] = {
    137, 80, 78, 71, 13, 10, 26, 10, 0, 0, 0, 13, 73, 72, 68, 82,
    0, 0, 0, 2, 0, 0, 0, 2, 8, 0, 0, 0, 0, 87, 221, 82,
    248, 0, 0, 0, 14, 73, 68, 65, 84, 120, 156, 99, 96, 104, 96, 248,
    239, 0, 0, 4, 68, 1, 192, 234, 106, 225, 223, 0, 0, 0, 0, 73,
    69, 78, 68, 174, 66, 96, 130,
};
inline constexpr size_t kPngGray_len = 71;

} // namespace pcarn::testsupport

#endif
