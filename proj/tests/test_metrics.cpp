#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "msd/datagen.hpp"
#include "msd/metrics.hpp"
#include "msd/mx_formats.hpp"

TEST_SUITE("metrics") {

TEST_CASE("l2_relative basics") {
  const std::vector<float> ref{1.0f, -2.0f, 3.0f};
  CHECK(msd::l2_relative(ref, ref) == 0.0);
  const std::vector<float> twice{2.0f, -4.0f, 6.0f};
  CHECK(msd::l2_relative(twice, ref) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<float> zeros{0.0f, 0.0f, 0.0f};
  CHECK_THROWS_WITH_AS(msd::l2_relative(ref, zeros), "degenerate reference",
                       std::invalid_argument);
  const std::vector<float> wrong{1.0f};
  CHECK_THROWS_AS(msd::l2_relative(wrong, ref), std::invalid_argument);
}

TEST_CASE("l2_relative against an independent accumulation order") {
  const msd::SimMatrix a =
      msd::gen_activation(16, 100, {msd::DistKind::gaussian, 0.0, 1.0}, {31, 0});
  const msd::SimMatrix b =
      msd::gen_activation(16, 100, {msd::DistKind::gaussian, 0.0, 1.0}, {31, 1});
  // Reverse-order binary64 recomputation.
  long double num = 0.0L;
  long double den = 0.0L;
  for (std::size_t i = a.size(); i-- > 0;) {
    const long double d = static_cast<long double>(a.data[i]) - b.data[i];
    num += d * d;
    den += static_cast<long double>(b.data[i]) * b.data[i];
  }
  const double expect = static_cast<double>(std::sqrt(num / den));
  CHECK(msd::l2_relative(a.data, b.data) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("exceed_fraction thresholds") {
  const std::vector<float> ref{1.0f, -2.0f, 4.0f, 8.0f};
  CHECK(msd::exceed_fraction(ref, ref, 0.001) == 0.0);

  std::vector<float> y(ref);
  for (float& v : y) v *= 1.02f;
  CHECK(msd::exceed_fraction(y, ref, 0.01) == 1.0);
  CHECK(msd::exceed_fraction(y, ref, 0.05) == 0.0);

  // Zero-reference elements are excluded from both sides of the fraction.
  const std::vector<float> ref0{1.0f, 0.0f};
  const std::vector<float> y0{1.02f, 5.0f};
  std::size_t excluded = 0;
  CHECK(msd::exceed_fraction(y0, ref0, 0.01) == 1.0);
  (void)msd::exceed_fraction(y0, ref0, 0.01, &excluded);
  CHECK(excluded == 1);
}

TEST_CASE("exceedance is monotone in the threshold") {
  const msd::SimMatrix ref =
      msd::gen_activation(64, 64, {msd::DistKind::gaussian, 0.0, 1.0}, {32, 0});
  const msd::SimMatrix noise =
      msd::gen_activation(64, 64, {msd::DistKind::gaussian, 0.0, 0.01}, {32, 1});
  std::vector<float> y(ref.data);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += noise.data[i];
  double prev = 1.0;
  for (double t : msd::kExceedThresholds) {
    const double f = msd::exceed_fraction(y, ref.data, t);
    CHECK(f <= prev);
    prev = f;
  }
  const msd::ErrorReport rep = msd::compare(y, ref.data);
  CHECK(rep.exceed[0] >= rep.exceed[1]);
  CHECK(rep.exceed[1] >= rep.exceed[2]);
  CHECK(rep.exceed[2] >= rep.exceed[3]);
  CHECK(rep.eff_bits == doctest::Approx(-std::log2(rep.l2_rel)));
}

TEST_CASE("effective_bits reference points") {
  CHECK(msd::effective_bits(0.5) == doctest::Approx(1.0));
  CHECK(msd::effective_bits(0.0265) == doctest::Approx(5.24).epsilon(0.002));
  CHECK(msd::effective_bits(0.0102) == doctest::Approx(6.62).epsilon(0.002));
  CHECK(std::isinf(msd::effective_bits(0.0)));
}

TEST_CASE("bound_ratio_report on exactly representable blocks") {
  msd::SimMatrix x(4, msd::kMxBlock);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < msd::kMxBlock; ++c) {
      x.at(r, c) = 0.25f * static_cast<float>(c % 8);
    }
  }
  std::vector<msd::MxBlockPair> blocks(4);
  for (int r = 0; r < 4; ++r) {
    blocks[r] = msd::mxfp4_decompose_block({x.row(r), msd::kMxBlock});
  }
  const auto rep = msd::bound_ratio_report(x.data, blocks);
  CHECK(rep.max_ratio == 0.0);
  CHECK(rep.clip_rate == 0.0);
  CHECK(rep.violations == 0);
}

TEST_CASE("bound_ratio_report on gaussian blocks") {
  const int n = 20000;
  const msd::SimMatrix x = msd::gen_activation(
      n, msd::kMxBlock, {msd::DistKind::gaussian, 0.0, 1.0}, {33, 0});
  std::vector<msd::MxBlockPair> blocks(n);
  for (int r = 0; r < n; ++r) {
    blocks[r] = msd::mxfp4_decompose_block({x.row(r), msd::kMxBlock});
  }
  const auto rep = msd::bound_ratio_report(x.data, blocks);
  CHECK(rep.violations == 0);
  CHECK(rep.max_ratio >= 0.99);
  CHECK(rep.max_ratio <= 1.0 + 0x1.0p-20);
  CHECK(rep.clip_rate > 0.10);
  CHECK(rep.clip_rate < 0.14);
}

}  // TEST_SUITE
