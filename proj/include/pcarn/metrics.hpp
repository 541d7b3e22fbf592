// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_METRICS_HPP
#define PCARN_METRICS_HPP

#include "pcarn/tensor.hpp"

namespace pcarn {

// PSNR cap reported when the images are identical (MSE = 0).
inline constexpr double kPsnrCap = 100.0;

// 10*log10(peak^2 / MSE) over all elements, in dB.
double psnr(const Tensor& a, const Tensor& b, double peak);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), stabilizers
// C1=(0.01L)^2, C2=(0.03L)^2 with L=1 ([0,1] images). 3-channel inputs are
// reduced to BT.601 luminance first. Window shrinks to the largest odd size
// that fits when an image is smaller than 11; inputs below 8x8 are rejected.
double ssim(const Tensor& a, const Tensor& b);

} // namespace pcarn

#endif
