// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "gemm.hpp"

#include <cblas.h>
#include <mutex>

extern "C" void openblas_set_num_threads(int);

namespace pcarn {

void sgemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
           const float* a, int lda, const float* b, int ldb, float beta,
           float* c, int ldc) {
    static std::once_flag once;
    std::call_once(once, [] { openblas_set_num_threads(1); });
    cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b,
                ldb, beta, c, ldc);
}

} // namespace pcarn
