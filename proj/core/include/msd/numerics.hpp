#pragma once
// Bit-exact simulated precision primitives shared by all pipelines.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace msd {

// BF16 storage is simulated by masking the low 16 bits of the binary32
// pattern (round-toward-zero onto the BF16 grid). Idempotent; sign
// preserved; zero maps to zero.
inline float bf16_truncate(float v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite value");
  const auto bits = std::bit_cast<std::uint32_t>(v);
  return std::bit_cast<float>(bits & 0xFFFF0000u);
}

inline bool is_bf16(float v) {
  return (std::bit_cast<std::uint32_t>(v) & 0xFFFFu) == 0u;
}

// Round-to-nearest, ties to even. The default FP environment is
// FE_TONEAREST, which nearbyint honors; nothing in this library changes
// the rounding mode.
inline int round_half_even(float v) {
  return static_cast<int>(std::nearbyintf(v));
}

inline long long round_half_even(double v) {
  return static_cast<long long>(std::nearbyint(v));
}

}  // namespace msd
