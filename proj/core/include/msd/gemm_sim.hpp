#pragma once
// Simulated linear-layer pipelines. y = x * dequant(w)^T throughout, with
// x of shape b x n and w of shape m x n (one output channel per weight
// row). Bit accuracy over speed.

#include <span>

#include "msd/int8_decompose.hpp"
#include "msd/mx_formats.hpp"
#include "msd/sim_matrix.hpp"

namespace msd {

// Ground truth: no truncation, binary64 accumulation.
SimMatrix gemm_fp32_oracle(const SimMatrix& x, const QuantizedWeight& w);

// Baseline: weights dequantized entry-wise to BF16, activations BF16,
// products in binary32 with sequential binary32 accumulation over the
// reduction dimension (fixed order; no pairwise summation).
SimMatrix gemm_dequant(const SimMatrix& x, const QuantizedWeight& w);

// Coarse-scale-only INT8 quantization of each activation row (the K=1
// ablation): one integer GEMM, then alpha and the weight scale applied.
SimMatrix gemm_single_scale(const SimMatrix& x, const QuantizedWeight& w);

// Two-pass path: each activation row is decomposed, both passes run as
// integer GEMMs with 64-bit accumulation, and the result is rebuilt as
// s_W * (alpha*y1 + beta*y2) in binary32.
SimMatrix gemm_msd_int8(const SimMatrix& x, const QuantizedWeight& w,
                        ScaleMode mode = ScaleMode::standard);

// Both passes as one integer GEMM over the concatenated code rows, scales
// applied afterwards. Integer arithmetic makes this bit-identical to
// gemm_msd_int8; kept separate so tests can assert that.
SimMatrix gemm_msd_int8_fused(const SimMatrix& x, const QuantizedWeight& w,
                              ScaleMode mode = ScaleMode::standard);

enum class MxGemmMethod { mxfp8_baseline, msd_mxfp4 };

// Activation-side quantization error study: activations quantized per
// 32-block by the chosen method, weight is a block-format FP4 matrix.
// Per-block dot products accumulate decoded values in binary32 (products
// are exact; both operands carry few significand bits) with the block
// scale applied after accumulation.
SimMatrix gemm_mxfp4(const SimMatrix& x, const MxWeight& w, MxGemmMethod method,
                     MxVariant variant = MxVariant::v3);

// Reference for gemm_mxfp4: untouched FP32 activations against the same
// dequantized weight, binary64 accumulation.
SimMatrix gemm_mxfp4_reference(const SimMatrix& x, const MxWeight& w);

}  // namespace msd
