#include <cmath>
#include <stdexcept>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "msd/datagen.hpp"
#include "msd/int8_decompose.hpp"

namespace {

// Reconstruction error measured against the exact binary64 combination of
// the stored scales and codes; scale-times-code products are exact there.
double max_abs_err64(std::span<const float> x, const msd::Int8Decomposition& d) {
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double rec = static_cast<double>(d.alpha) * d.x1[i] +
                       static_cast<double>(d.beta) * d.x2[i];
    err = std::max(err, std::fabs(static_cast<double>(x[i]) - rec));
  }
  return err;
}

float max_abs(std::span<const float> x) {
  float m = 0.0f;
  for (float v : x) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

TEST_SUITE("int8") {

TEST_CASE("zero vector decomposes to zero") {
  const std::vector<float> x{0.0f, 0.0f, 0.0f};
  const auto d = msd::decompose2(x);
  CHECK(d.alpha == 0.0f);
  CHECK(d.beta == 0.0f);
  for (auto c : d.x1) CHECK(c == 0);
  for (auto c : d.x2) CHECK(c == 0);
  const auto rec = msd::reconstruct(d);
  for (float v : rec) CHECK(v == 0.0f);
}

TEST_CASE("extremal element maps exactly") {
  const std::vector<float> x{127.0f};
  const auto d = msd::decompose2(x);
  CHECK(d.alpha == 1.0f);
  CHECK(d.x1[0] == 127);
  CHECK(d.x2[0] == 0);
  CHECK(msd::reconstruct(d)[0] == 127.0f);
}

TEST_CASE("beta is derived from alpha alone") {
  const std::vector<float> x{0.3f, -1.7f, 0.05f, 2.2f};
  const auto d = msd::decompose2(x);
  CHECK(d.beta == msd::detail::scale_below(d.alpha, 254.0));
  // Exactly one reduction over the data: the alpha max. No max over r.
  const auto before = msd::max_reduction_count();
  (void)msd::decompose2(x);
  CHECK(msd::max_reduction_count() - before == 1);
}

TEST_CASE("theorem bound, standard and fractional") {
  const msd::DistributionSpec dists[] = {
      {msd::DistKind::gaussian, 0.0, 1.0},
      {msd::DistKind::uniform, -3.0, 3.0},
      {msd::DistKind::laplacian, 0.0, 1.0},
      {msd::DistKind::cauchy, 0.0, 0.0},
      {msd::DistKind::gaussian_outliers, 0.01, 100.0},
  };
  std::uint64_t stream = 0;
  for (const auto& spec : dists) {
    const msd::SimMatrix m = msd::gen_activation(200, 1024, spec, {99, stream++});
    for (int r = 0; r < m.rows; ++r) {
      const std::span<const float> row(m.row(r), 1024);
      const float mx = max_abs(row);
      if (mx == 0.0f) continue;
      const auto ds = msd::decompose2(row, msd::ScaleMode::standard);
      CHECK(max_abs_err64(row, ds) <= static_cast<double>(mx) / 64516.0);
      const auto df = msd::decompose2(row, msd::ScaleMode::fractional);
      CHECK(max_abs_err64(row, df) <= static_cast<double>(mx) / 65015.0);
      // Binary32 reconstruction adds two roundings of magnitude <= ~M ulps:
      // one in alpha*x1, one in the sum. 3*M*2^-24 covers both.
      const auto rec = msd::reconstruct(ds);
      for (std::size_t i = 0; i < rec.size(); ++i) {
        CHECK(std::fabs(row[i] - rec[i]) <=
              static_cast<double>(mx) * (1.0 / 64516.0 + 3.0 * 0x1.0p-24));
      }
    }
  }
}

TEST_CASE("pass-1 residual bound and zero clipping in standard mode") {
  const msd::SimMatrix m =
      msd::gen_activation(100, 512, {msd::DistKind::gaussian, 0.0, 2.0}, {5, 0});
  for (int r = 0; r < m.rows; ++r) {
    const std::span<const float> row(m.row(r), 512);
    const auto d = msd::decompose2(row);
    for (std::size_t i = 0; i < row.size(); ++i) {
      CHECK(std::abs(static_cast<int>(d.x1[i])) <= 127);
      CHECK(std::abs(static_cast<int>(d.x2[i])) <= 127);
      const double res = static_cast<double>(row[i]) -
                         static_cast<double>(d.alpha) * d.x1[i];
      CHECK(std::fabs(res) <= d.alpha / 2.0 * (1.0 + 0x1.0p-20));
    }
  }
}

TEST_CASE("codes are invariant under power-of-two scaling") {
  const msd::SimMatrix m =
      msd::gen_activation(8, 256, {msd::DistKind::gaussian, 0.0, 1.0}, {7, 0});
  for (int r = 0; r < m.rows; ++r) {
    const std::span<const float> row(m.row(r), 256);
    std::vector<float> scaled(row.begin(), row.end());
    for (float& v : scaled) v *= 8.0f;
    const auto a = msd::decompose2(row);
    const auto b = msd::decompose2(scaled);
    CHECK(a.x1 == b.x1);
    CHECK(a.x2 == b.x2);
    CHECK(b.alpha == 8.0f * a.alpha);
    CHECK(b.beta == 8.0f * a.beta);
  }
}

TEST_CASE("decompose_k: k=2 agrees bit-exactly with decompose2") {
  const msd::SimMatrix m =
      msd::gen_activation(20, 333, {msd::DistKind::laplacian, 0.0, 1.0}, {8, 0});
  for (int r = 0; r < m.rows; ++r) {
    const std::span<const float> row(m.row(r), 333);
    const auto d2 = msd::decompose2(row);
    const auto dk = msd::decompose_k(row, 2);
    CHECK(dk.scales[0] == d2.alpha);
    CHECK(dk.scales[1] == d2.beta);
    CHECK(dk.components[0] == d2.x1);
    CHECK(dk.components[1] == d2.x2);
  }
}

TEST_CASE("decompose_k: k=3 extends the bound by another factor of 254") {
  const msd::SimMatrix m =
      msd::gen_activation(100, 1024, {msd::DistKind::gaussian, 0.0, 1.0}, {9, 0});
  for (int r = 0; r < m.rows; ++r) {
    const std::span<const float> row(m.row(r), 1024);
    const float mx = max_abs(row);
    const auto d = msd::decompose_k(row, 3);
    double err = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      double rec = 0.0;
      for (int p = 0; p < 3; ++p) {
        rec += static_cast<double>(d.scales[p]) * d.components[p][i];
      }
      err = std::max(err, std::fabs(static_cast<double>(row[i]) - rec));
    }
    CHECK(err <= static_cast<double>(mx) / (127.0 * 2.0 * 254.0 * 254.0));
  }
}

TEST_CASE("decompose2_fixed performs no reduction and matches quantization") {
  const std::vector<float> p{1.0f, 0.5f, 0.003f, 0.0f, 0.9999f};
  const float alpha = 1.0f / 127.0f;
  const float beta = alpha / 254.0f;
  std::vector<std::int8_t> p1(p.size());
  std::vector<std::int8_t> p2(p.size());
  const auto before = msd::max_reduction_count();
  msd::decompose2_fixed(p, alpha, beta, p1.data(), p2.data());
  CHECK(msd::max_reduction_count() == before);
  CHECK(p1[0] == 127);  // exp(0) == 1 lands on the top code exactly
  CHECK(p1[3] == 0);
  CHECK(p2[3] == 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double rec = static_cast<double>(alpha) * p1[i] +
                       static_cast<double>(beta) * p2[i];
    CHECK(std::fabs(p[i] - rec) <= beta / 2.0 * (1.0 + 0x1.0p-20));
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(msd::decompose2({}), std::invalid_argument);
  const std::vector<float> bad{1.0f, std::numeric_limits<float>::infinity()};
  CHECK_THROWS_AS(msd::decompose2(bad), std::domain_error);
  const std::vector<float> x{1.0f};
  CHECK_THROWS_AS(msd::decompose_k(x, 0), std::invalid_argument);
}

}  // TEST_SUITE
