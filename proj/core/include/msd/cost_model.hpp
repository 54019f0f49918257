#pragma once
// Closed-form analytical models: vector-op counts for attention decode,
// HBM traffic for linear layers and attention, and a simple latency model
// with configurable engine throughput ratios.

#include <cstdint>

namespace msd {

struct AttnCostInput {
  std::int64_t n = 1;    // queries per kv head
  std::int64_t m = 1;    // kv length
  std::int64_t d = 1;    // head dim
  std::int64_t bc = 1;   // kv tile size; must divide m
  std::int64_t tc() const { return m / bc; }
};

enum class AttnMethod { dequant, msd };

// Vector-side op count per kv head:
//   dequant: 4Md + 4NM + 3Nd*Tc
//   msd:     6Nd + 12NM + 7Nd*Tc
std::int64_t attn_vector_ops(const AttnCostInput& in, AttnMethod method);

struct CrossoverResult {
  double approx = 0.0;  // 4Md / (12M + 7d*Tc)
  double exact = 0.0;   // root of dequant(N) == msd(N): 4Md / (6d + 8M + 4d*Tc)
};

// Query count at which the two vector-op costs meet. Both the commonly
// quoted approximation and the exact root are returned; they differ
// noticeably (about 20 vs 32 at d=128, M=8192, Bc=64).
CrossoverResult attn_crossover(std::int64_t m, std::int64_t d, std::int64_t bc);

struct LinearCostInput {
  std::int64_t b = 1;  // activation rows
  std::int64_t m = 1;  // output channels
  std::int64_t n = 1;  // reduction dim
};

enum class LinearTrafficMethod { dequant, msd_resident, msd_conservative, bf16 };

struct TrafficResult {
  std::int64_t bytes = 0;
  double dominant_ratio_vs_dequant = 0.0;  // dequant dominant term / this one
};

// Per-layer HBM traffic in bytes (element counts weighted by width):
//   dequant:          3mn + 2bn + 2bm
//   msd_resident:      mn + 4bn + 2bm   (weights stay on chip across passes)
//   msd_conservative: 2mn + 4bn + 2bm   (weights re-read per pass)
//   bf16:             2mn + 2bn + 2bm
TrafficResult linear_hbm_traffic(const LinearCostInput& in,
                                 LinearTrafficMethod method);

// Attention decode traffic per head: 5Md (dequant round-trip) vs 2Md
// (K+V read once by the matrix engine).
std::int64_t attn_hbm_traffic(std::int64_t m, std::int64_t d, AttnMethod method);

struct ThroughputProfile {
  double r_vector = 1e12;
  double r_gemm_bf16 = 1e14;
  double r_gemm_int8 = 2e14;  // 2x bf16
  double r_gemm_fp8 = 2e14;   // 2x bf16
  double r_gemm_fp4 = 4e14;   // 4x bf16
  double t_sync = 0.0;
  double hbm_bandwidth = 0.0;  // bytes/sec; 0 disables the bandwidth term
};

enum class LinearLatencyMethod { dequant, msd_int8, msd_mxfp4, fp8_baseline };

struct LatencyResult {
  double t_vector = 0.0;
  double t_cube = 0.0;
  double t_total = 0.0;  // max(t_vector, t_cube) + t_sync [+ traffic/BW]
};

// Decode-shape linear layer (b == 1 activations folded into the vector
// counts): dequant spends mn vector ops on dequantization; the two-pass
// paths spend 8n + 2m. Cube time counts bf16-equivalent MACs against the
// format's throughput.
LatencyResult linear_latency(const LinearCostInput& in,
                             const ThroughputProfile& prof,
                             LinearLatencyMethod method);

// Speculative decoding with grouped queries: N = (1 + n_spec) * g.
std::int64_t effective_queries(std::int64_t n_spec, std::int64_t g);

enum class VectorFlopsMethod { dequant, msd };

// Vector-side compute per linear layer: 2mn type conversions for dequant,
// 3n + 5n + 2m (two decomposition passes plus reconstruction) for msd.
std::int64_t vector_flops_linear(std::int64_t n, std::int64_t m,
                                 VectorFlopsMethod method);

}  // namespace msd
