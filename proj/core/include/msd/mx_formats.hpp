#pragma once
// MX block formats: FP4 (E1M2) codes with shared E8M0 power-of-two scales,
// the two-pass MXFP4 decomposition, and the single-pass MXFP8 baseline.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "msd/sim_matrix.hpp"

namespace msd {

inline constexpr int kMxBlock = 32;
inline constexpr int kE8m0Min = -127;
inline constexpr int kE8m0Max = 127;
inline constexpr double kFp4Max = 1.75;

// Sign + E1M2; magnitude grid {0, 0.25, ..., 1.75} with uniform step 0.25.
// bit 3 = sign, bits 0..2 = magnitude index (value = index * 0.25).
struct Fp4Code {
  std::uint8_t bits = 0;
  bool operator==(const Fp4Code&) const = default;
};

inline float fp4_decode(Fp4Code c) {
  const float m = 0.25f * static_cast<float>(c.bits & 7u);
  return (c.bits & 8u) ? -m : m;
}

Fp4Code fp4_encode(float grid_value);

// Round-to-nearest on the E1M2 grid, ties to even in grid-index units;
// |s| > 1.75 saturates to +-1.75.
Fp4Code round_to_fp4(double s);

// Power-of-two shared scale, value 2^exponent.
struct E8m0Scale {
  int exponent = 0;
  double value() const { return std::ldexp(1.0, exponent); }
  bool operator==(const E8m0Scale&) const = default;
};

// Smallest exponent e with 2^e * bound >= max_abs, computed by exponent
// inspection (exact at boundaries). max_abs == 0 yields the minimum
// exponent as the zero-block sentinel.
E8m0Scale mxfp4_alpha(float max_abs, double bound = 1.859375);

// Design iterations of the two-pass MXFP4 decomposition:
//   v1: alpha bound 1.75,     beta = alpha/8
//   v2: alpha bound 1.75,     beta = alpha/16
//   v3: alpha bound 1.859375, beta = alpha/16  (default)
enum class MxVariant { v1, v2, v3 };

struct MxBlockPair {
  E8m0Scale alpha;
  E8m0Scale beta;
  std::array<Fp4Code, kMxBlock> q1{};
  std::array<Fp4Code, kMxBlock> q2{};
};

MxBlockPair mxfp4_decompose_block(std::span<const float> x,
                                  MxVariant variant = MxVariant::v3);
std::array<float, kMxBlock> mxfp4_reconstruct(const MxBlockPair& b);

// Single-pass MXFP8: E4M3 elements (subnormals included, saturating at
// +-448) under one E8M0 scale.
struct Mxfp8Block {
  E8m0Scale scale;
  std::array<std::uint8_t, kMxBlock> codes{};
};

Mxfp8Block mxfp8_quantize_block(std::span<const float> x);
std::array<float, kMxBlock> mxfp8_reconstruct(const Mxfp8Block& b);

float e4m3_decode(std::uint8_t code);
std::uint8_t e4m3_round(double v);

// Single-pass MXFP4 weight, blocked along the reduction dimension.
struct MxWeight {
  int rows = 0;
  int cols = 0;                      // must be a multiple of kMxBlock
  std::vector<Fp4Code> codes;        // rows x cols
  std::vector<int> block_exponents;  // one per 32-element block, row-major
};

MxWeight mxfp4_quantize_weight(const SimMatrix& w);
SimMatrix mxfp4_dequant_weight(const MxWeight& w);

}  // namespace msd
