#include "msd/mx_formats.hpp"

#include <algorithm>
#include <stdexcept>

#include "msd/numerics.hpp"

namespace msd {

namespace {

float block_max_abs(std::span<const float> x) {
  float m = 0.0f;
  for (float v : x) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite value");
    m = std::max(m, std::fabs(v));
  }
  return m;
}

// Positive E4M3 values in increasing order; index == code. Subnormals are
// m/8 * 2^-6 for codes 1..7; code 0x7F (the NaN pattern) is excluded, so
// the largest finite magnitude is 448 at index 126.
const std::array<double, 127>& e4m3_table() {
  static const std::array<double, 127> table = [] {
    std::array<double, 127> t{};
    for (int code = 0; code < 127; ++code) {
      const int e = code >> 3;
      const int m = code & 7;
      t[code] = (e == 0) ? std::ldexp(m / 8.0, -6)
                         : std::ldexp(1.0 + m / 8.0, e - 7);
    }
    return t;
  }();
  return table;
}

}  // namespace

Fp4Code fp4_encode(float grid_value) {
  const Fp4Code c = round_to_fp4(grid_value);
  if (fp4_decode(c) != grid_value) throw std::invalid_argument("not an FP4 grid value");
  return c;
}

Fp4Code round_to_fp4(double s) {
  const double u = std::fabs(s) * 4.0;  // grid-index units
  long long idx = round_half_even(u);
  if (idx > 7) idx = 7;
  if (idx == 0) return Fp4Code{0};
  std::uint8_t bits = static_cast<std::uint8_t>(idx);
  if (s < 0.0) bits |= 8u;
  return Fp4Code{bits};
}

E8m0Scale mxfp4_alpha(float max_abs, double bound) {
  if (!std::isfinite(max_abs) || max_abs < 0.0f) {
    throw std::domain_error("non-finite value");
  }
  if (max_abs == 0.0f) return E8m0Scale{kE8m0Min};  // zero-block sentinel

  const double m = max_abs;
  int e = std::ilogb(m / bound);
  while (std::ldexp(bound, e) < m) ++e;
  while (e > kE8m0Min && std::ldexp(bound, e - 1) >= m) --e;
  if (e > kE8m0Max) throw std::domain_error("E8M0 overflow");
  return E8m0Scale{e};
}

MxBlockPair mxfp4_decompose_block(std::span<const float> x, MxVariant variant) {
  if (x.size() != kMxBlock) throw std::invalid_argument("block length must be 32");

  const double bound = (variant == MxVariant::v3) ? 1.859375 : 1.75;
  const int beta_shift = (variant == MxVariant::v1) ? 3 : 4;

  MxBlockPair b;
  b.alpha = mxfp4_alpha(block_max_abs(x), bound);
  // beta follows from alpha alone; no reduction over the residual.
  b.beta = E8m0Scale{b.alpha.exponent - beta_shift};

  const double av = b.alpha.value();
  const double bv = b.beta.value();
  for (int i = 0; i < kMxBlock; ++i) {
    b.q1[i] = round_to_fp4(x[i] / av);
    const double r = static_cast<double>(x[i]) - av * fp4_decode(b.q1[i]);
    b.q2[i] = round_to_fp4(r / bv);
  }
  return b;
}

std::array<float, kMxBlock> mxfp4_reconstruct(const MxBlockPair& b) {
  const double av = b.alpha.value();
  const double bv = b.beta.value();
  std::array<float, kMxBlock> out{};
  for (int i = 0; i < kMxBlock; ++i) {
    // Exactly representable in binary32: alpha*(q1 + q2/16) has at most
    // 11 significand bits times a power of two.
    out[i] = static_cast<float>(av * fp4_decode(b.q1[i]) + bv * fp4_decode(b.q2[i]));
  }
  return out;
}

float e4m3_decode(std::uint8_t code) {
  const double mag = e4m3_table()[code & 0x7Fu];
  return static_cast<float>((code & 0x80u) ? -mag : mag);
}

std::uint8_t e4m3_round(double v) {
  const auto& t = e4m3_table();
  const double a = std::fabs(v);
  std::uint8_t idx;
  if (a >= t.back()) {
    idx = 126;  // saturate at 448
  } else {
    const auto it = std::lower_bound(t.begin(), t.end(), a);
    const int hi = static_cast<int>(it - t.begin());
    if (hi == 0) {
      idx = 0;
    } else {
      const double dlo = a - t[hi - 1];
      const double dhi = t[hi] - a;
      if (dlo < dhi) {
        idx = static_cast<std::uint8_t>(hi - 1);
      } else if (dhi < dlo) {
        idx = static_cast<std::uint8_t>(hi);
      } else {
        // tie: even code (code parity == mantissa parity)
        idx = static_cast<std::uint8_t>((hi % 2 == 0) ? hi : hi - 1);
      }
    }
  }
  if (idx == 0) return 0;
  return (v < 0.0) ? static_cast<std::uint8_t>(idx | 0x80u) : idx;
}

Mxfp8Block mxfp8_quantize_block(std::span<const float> x) {
  if (x.size() != kMxBlock) throw std::invalid_argument("block length must be 32");

  Mxfp8Block b;
  const float m = block_max_abs(x);
  if (m == 0.0f) {
    b.scale = E8m0Scale{kE8m0Min};
    return b;
  }
  // Scale the block maximum to at most 2^8, E4M3's top power of two, so
  // the maximum never saturates: exponent = ceil(log2(m)) - 8, exact via
  // exponent inspection.
  int e = std::ilogb(m) - 8;
  if (m > std::ldexp(1.0f, std::ilogb(m))) ++e;
  e = std::clamp(e, kE8m0Min, kE8m0Max);
  b.scale = E8m0Scale{e};
  const double sv = b.scale.value();
  for (int i = 0; i < kMxBlock; ++i) {
    b.codes[i] = e4m3_round(x[i] / sv);
  }
  return b;
}

std::array<float, kMxBlock> mxfp8_reconstruct(const Mxfp8Block& b) {
  const double sv = b.scale.value();
  std::array<float, kMxBlock> out{};
  for (int i = 0; i < kMxBlock; ++i) {
    out[i] = static_cast<float>(sv * e4m3_decode(b.codes[i]));
  }
  return out;
}

MxWeight mxfp4_quantize_weight(const SimMatrix& w) {
  if (w.cols % kMxBlock != 0) {
    throw std::invalid_argument("reduction dimension must be a multiple of 32");
  }
  MxWeight out;
  out.rows = w.rows;
  out.cols = w.cols;
  out.codes.resize(w.size());
  out.block_exponents.reserve(w.size() / kMxBlock);
  for (int i = 0; i < w.rows; ++i) {
    const float* row = w.row(i);
    for (int b0 = 0; b0 < w.cols; b0 += kMxBlock) {
      const std::span<const float> blk(row + b0, kMxBlock);
      const E8m0Scale alpha = mxfp4_alpha(block_max_abs(blk), 1.75);
      out.block_exponents.push_back(alpha.exponent);
      const double av = alpha.value();
      for (int j = 0; j < kMxBlock; ++j) {
        out.codes[static_cast<std::size_t>(i) * w.cols + b0 + j] =
            round_to_fp4(blk[j] / av);
      }
    }
  }
  return out;
}

SimMatrix mxfp4_dequant_weight(const MxWeight& w) {
  SimMatrix out(w.rows, w.cols);
  const int blocks_per_row = w.cols / kMxBlock;
  for (int i = 0; i < w.rows; ++i) {
    for (int b = 0; b < blocks_per_row; ++b) {
      const double av =
          std::ldexp(1.0, w.block_exponents[static_cast<std::size_t>(i) * blocks_per_row + b]);
      for (int j = 0; j < kMxBlock; ++j) {
        const std::size_t idx =
            static_cast<std::size_t>(i) * w.cols + b * kMxBlock + j;
        out.data[idx] = static_cast<float>(av * fp4_decode(w.codes[idx]));
      }
    }
  }
  return out;
}

}  // namespace msd
