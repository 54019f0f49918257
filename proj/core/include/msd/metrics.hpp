#pragma once
// Error measurement: L2 relative error, pointwise threshold exceedance,
// effective bits, and block-format bound tightness. All metric arithmetic
// runs in binary64 so metric noise stays below the effects being measured.

#include <array>
#include <limits>
#include <span>
#include <vector>

#include "msd/mx_formats.hpp"

namespace msd {

inline constexpr std::array<double, 4> kExceedThresholds{0.001, 0.005, 0.01,
                                                         0.05};

struct ErrorReport {
  double l2_rel = 0.0;
  std::array<double, 4> exceed{};  // aligned with kExceedThresholds
  double eff_bits = std::numeric_limits<double>::infinity();
  std::size_t excluded = 0;  // zero-reference elements left out of exceed
};

// Frobenius-norm ratio ||y - y_ref|| / ||y_ref||. Throws on shape
// mismatch or a zero reference norm ("degenerate reference").
double l2_relative(std::span<const float> y, std::span<const float> y_ref);

// Fraction of elements with |y_i - ref_i| / |ref_i| > threshold. Elements
// with ref_i == 0 are excluded from numerator and denominator; *excluded,
// if given, receives their count.
double exceed_fraction(std::span<const float> y, std::span<const float> y_ref,
                       double threshold, std::size_t* excluded = nullptr);

// -log2(l2_rel); +infinity when the error is exactly zero.
double effective_bits(double l2_rel);

ErrorReport compare(std::span<const float> y, std::span<const float> y_ref);

struct BoundRatioReport {
  double max_ratio = 0.0;  // max |err| / (alpha/64) over all elements
  double clip_rate = 0.0;  // fraction of pass-2 values with |r/beta| > 1.75
  std::size_t violations = 0;  // elements with ratio > 1 + 2^-20
};

// Tightness of the two-pass block bound: `data` holds the original values
// for each block in `blocks`, concatenated in order.
BoundRatioReport bound_ratio_report(std::span<const float> data,
                                    std::span<const MxBlockPair> blocks);

}  // namespace msd
