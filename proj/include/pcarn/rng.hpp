// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_RNG_HPP
#define PCARN_RNG_HPP

#include <cstdint>

namespace pcarn {

// xoshiro256** seeded through splitmix64. Self-contained so that streams are
// bit-identical across standard libraries and platforms; std::* distributions
// are implementation-defined and would break run-to-run reproducibility
// guarantees the trainer relies on.
class Rng {
public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64();

    // Strictly inside (0,1): 53 mantissa bits, offset by half an ulp.
    double uniform01();
    // Strictly inside (lo,hi).
    double uniform(double lo, double hi);
    // Box-Muller; second draw of each pair is cached.
    double normal(double mean, double sigma);
    // Unbiased integer in [0,n), n >= 1.
    uint32_t below(uint32_t n);
    bool coin() { return (next_u64() >> 63) != 0; }

private:
    uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace pcarn

#endif
