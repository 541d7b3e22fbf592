// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_SRC_GEMM_HPP
#define PCARN_SRC_GEMM_HPP

namespace pcarn {

// Row-major C = alpha * op(A) * op(B) + beta * C. Single-threaded so the
// reduction order is fixed and results are reproducible run to run.
void sgemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
           const float* a, int lda, const float* b, int ldb, float beta,
           float* c, int ldc);

} // namespace pcarn

#endif
