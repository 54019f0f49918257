#pragma once
// Seeded, deterministic generation of activations, INT8 weights with
// per-channel scales, and KV caches.
//
// The generator is counter-based: every sample is a pure function of
// (seed, stream, element index), built on splitmix64-style mixing. Output
// is therefore byte-identical regardless of how generation is split
// across threads.

#include <cstdint>
#include <span>

#include "msd/sim_matrix.hpp"

namespace msd {

enum class DistKind {
  gaussian,           // p1 = mean, p2 = sigma
  uniform,            // p1 = a, p2 = b
  laplacian,          // p1 = mu, p2 = b
  exponential,        // p1 = lambda
  student_t,          // p1 = df (integer, 1..7); df=1 is Cauchy
  cauchy,             //
  gaussian_outliers,  // p1 = rate in [0,1], p2 = magnitude
};

struct DistributionSpec {
  DistKind kind = DistKind::gaussian;
  double p1 = 0.0;
  double p2 = 1.0;
};

struct ExperimentSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Samples drawn from `spec`, each passed through bf16_truncate. Heavy-tail
// kinds (student_t, cauchy) are clipped at +-1e6 before truncation so the
// FP32/FP64 GEMM references stay finite.
SimMatrix gen_activation(int rows, int cols, const DistributionSpec& spec,
                         ExperimentSeed seed);

// Same samples as gen_activation, left in binary32. Experiments feed these
// to the pipelines: the ground truth and the decomposition paths see the
// pre-truncation values; the dequant baseline truncates internally.
SimMatrix gen_activation_raw(int rows, int cols, const DistributionSpec& spec,
                             ExperimentSeed seed);

// Values uniform over the symmetric integer range [-127, 127]; per-row
// scales uniform over [0.01, 1.0].
QuantizedWeight gen_int8_weight(int rows, int cols, ExperimentSeed seed);

// Same recipe as gen_int8_weight, but scales indexed along the head
// dimension (length dim).
KvCache gen_kv_cache(int tokens, int dim, ExperimentSeed seed);

namespace detail {
std::uint64_t mix64(std::uint64_t z);
double sample(const DistributionSpec& spec, std::uint64_t key, std::uint64_t index);
}  // namespace detail

}  // namespace msd
