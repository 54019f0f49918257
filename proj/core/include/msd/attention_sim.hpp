#pragma once
// Attention pipelines over an INT8 KV cache: FP32 oracle, monolithic
// dequant, tiled flash (dequant), tiled flash with two-pass INT8
// decomposition of Q and P, and a full-precision tiled variant used to
// isolate tiling error from quantization error.

#include "msd/sim_matrix.hpp"

namespace msd {

// Ground truth: softmax(Q Kd^T / sqrt(d)) Vd, all in binary64, with K/V
// dequantized at full precision.
SimMatrix attention_oracle(const SimMatrix& q, const KvCache& kv);

// Monolithic baseline: Q, dequantized K/V and the softmax numerator
// exp(S - m) are BF16-truncated; GEMMs accumulate in binary32; the
// normalizer divide happens after the PV GEMM. Identical accumulation
// order to attention_flash, so attention_flash(bc == M) is bit-equal.
SimMatrix attention_dequant(const SimMatrix& q, const KvCache& kv);

// Tiled version of attention_dequant with online softmax (running row
// max, normalizer, and rescaled output accumulator). bc must divide M.
SimMatrix attention_flash(const SimMatrix& q, const KvCache& kv, int bc);

// Tiled attention with integer GEMMs throughout: the K scale is absorbed
// into Q before a per-row two-pass decomposition; the softmax numerator
// is decomposed against the constant scales 1/127 and 1/(127*254); the V
// scale is applied after the PV GEMMs.
SimMatrix attention_flash_msd(const SimMatrix& q, const KvCache& kv, int bc);

// Tiled control in binary64 with no quantization inside tiles; agrees
// with attention_oracle up to tiling rescale rounding.
SimMatrix attention_flash_exact(const SimMatrix& q, const KvCache& kv, int bc);

}  // namespace msd
