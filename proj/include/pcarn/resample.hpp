// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_RESAMPLE_HPP
#define PCARN_RESAMPLE_HPP

#include "pcarn/tensor.hpp"

namespace pcarn {

// Separable bicubic resampling (Keys kernel, a = -0.5) with the symmetric
// half-pixel grid: output i samples input at (i+0.5)*in/out - 0.5. When
// shrinking, the kernel is widened by the scale factor (anti-aliased), the
// standard protocol for producing SR training pairs. Border taps clamp and
// weights are renormalized, so constants are preserved exactly.
Tensor bicubic_resize(const Tensor& src, int64_t out_h, int64_t out_w);

// hr extents must be divisible by r.
Tensor degrade_bicubic(const Tensor& hr, int r);

// Spatial helpers used by the augmentation pipeline (square-preserving).
Tensor crop(const Tensor& t, int64_t y0, int64_t x0, int64_t h, int64_t w);
Tensor hflip(const Tensor& t);
Tensor rot90(const Tensor& t, int quarter_turns);

} // namespace pcarn

#endif
