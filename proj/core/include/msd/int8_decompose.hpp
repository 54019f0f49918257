#pragma once
// Two-pass (and generic K-pass) INT8 decomposition of a high-precision
// vector, plus reconstruction.

#include <cstdint>
#include <span>
#include <vector>

namespace msd {

enum class ScaleMode { standard, fractional };

// x ~ alpha * x1 + beta * x2, with x1/x2 signed 8-bit and
// beta = alpha/254 (standard) resp. alpha/254.98 (fractional).
struct Int8Decomposition {
  float alpha = 0.0f;
  float beta = 0.0f;
  std::vector<std::int8_t> x1;
  std::vector<std::int8_t> x2;
};

// Generalized K-pass form: scales[i+1] = scales[i]/254.
struct KDecomposition {
  std::vector<float> scales;
  std::vector<std::vector<std::int8_t>> components;
};

Int8Decomposition decompose2(std::span<const float> x,
                             ScaleMode mode = ScaleMode::standard);

// Decomposition against caller-supplied scales. Performs no reduction over
// the data at all; used for the attention-weight path where alpha is the
// constant 1/127.
void decompose2_fixed(std::span<const float> x, float alpha, float beta,
                      std::int8_t* x1, std::int8_t* x2);

std::vector<float> reconstruct(const Int8Decomposition& d);

KDecomposition decompose_k(std::span<const float> x, int k);
std::vector<float> reconstruct(const KDecomposition& d);

// Process-wide count of max-reductions performed by the decomposition
// routines. Lets tests assert structurally that a code path derived its
// scales without scanning the data.
std::uint64_t max_reduction_count();

namespace detail {
// Largest binary32 scale s with s * divisor <= max_abs. Keeping the scale
// on the small side of the exact quotient is what makes the worst-case
// reconstruction bound hold in float arithmetic, not just on paper.
float scale_below(float max_abs, double divisor);
}  // namespace detail

}  // namespace msd
