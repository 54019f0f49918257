#include "msd/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace msd {

double l2_relative(std::span<const float> y, std::span<const float> y_ref) {
  if (y.size() != y_ref.size()) throw std::invalid_argument("shape mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = static_cast<double>(y[i]) - static_cast<double>(y_ref[i]);
    num += d * d;
    den += static_cast<double>(y_ref[i]) * static_cast<double>(y_ref[i]);
  }
  if (den == 0.0) throw std::invalid_argument("degenerate reference");
  return std::sqrt(num / den);
}

double exceed_fraction(std::span<const float> y, std::span<const float> y_ref,
                       double threshold, std::size_t* excluded) {
  if (y.size() != y_ref.size()) throw std::invalid_argument("shape mismatch");
  std::size_t counted = 0;
  std::size_t over = 0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double ref = y_ref[i];
    if (ref == 0.0) {
      ++skipped;
      continue;
    }
    ++counted;
    const double rel = std::fabs(static_cast<double>(y[i]) - ref) / std::fabs(ref);
    if (rel > threshold) ++over;
  }
  if (excluded) *excluded = skipped;
  return counted == 0 ? 0.0 : static_cast<double>(over) / counted;
}

double effective_bits(double l2_rel) {
  if (l2_rel < 0.0) throw std::invalid_argument("negative error");
  if (l2_rel == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log2(l2_rel);
}

ErrorReport compare(std::span<const float> y, std::span<const float> y_ref) {
  ErrorReport r;
  r.l2_rel = l2_relative(y, y_ref);
  for (std::size_t t = 0; t < kExceedThresholds.size(); ++t) {
    r.exceed[t] = exceed_fraction(y, y_ref, kExceedThresholds[t], &r.excluded);
  }
  r.eff_bits = effective_bits(r.l2_rel);
  return r;
}

BoundRatioReport bound_ratio_report(std::span<const float> data,
                                    std::span<const MxBlockPair> blocks) {
  if (blocks.empty()) throw std::invalid_argument("empty block set");
  if (data.size() != blocks.size() * kMxBlock) {
    throw std::invalid_argument("shape mismatch");
  }
  BoundRatioReport rep;
  std::size_t clipped = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const MxBlockPair& blk = blocks[b];
    const double av = blk.alpha.value();
    const double bv = blk.beta.value();
    const double bound = av / 64.0;
    const auto recon = mxfp4_reconstruct(blk);
    for (int i = 0; i < kMxBlock; ++i) {
      const double x = data[b * kMxBlock + i];
      const double err = std::fabs(x - recon[i]);
      const double ratio = err / bound;
      if (ratio > rep.max_ratio) rep.max_ratio = ratio;
      if (ratio > 1.0 + 0x1.0p-20) ++rep.violations;
      const double r = x - av * fp4_decode(blk.q1[i]);
      if (std::fabs(r / bv) > kFp4Max) ++clipped;
    }
  }
  rep.clip_rate = static_cast<double>(clipped) /
                  static_cast<double>(blocks.size() * kMxBlock);
  return rep;
}

}  // namespace msd
