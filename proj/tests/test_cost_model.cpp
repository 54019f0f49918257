#include <cmath>
#include <stdexcept>
#include <cstdint>

#include "doctest.h"
#include "msd/cost_model.hpp"

TEST_SUITE("cost") {

TEST_CASE("attention vector ops, d=128 M=8192 Bc=64") {
  // dequant = 4Md + 81920N, msd = 213760N at these shapes.
  const std::int64_t dq[] = {4276224, 4358144, 4521984, 4849664, 5505024};
  const std::int64_t ms[] = {213760, 427520, 855040, 1710080, 3420160};
  int i = 0;
  for (std::int64_t n : {1, 2, 4, 8, 16}) {
    const msd::AttnCostInput in{n, 8192, 128, 64};
    CHECK(msd::attn_vector_ops(in, msd::AttnMethod::dequant) == dq[i]);
    CHECK(msd::attn_vector_ops(in, msd::AttnMethod::msd) == ms[i]);
    ++i;
  }
  const msd::AttnCostInput one{1, 8192, 128, 64};
  const double ratio =
      static_cast<double>(msd::attn_vector_ops(one, msd::AttnMethod::dequant)) /
      msd::attn_vector_ops(one, msd::AttnMethod::msd);
  CHECK(ratio == doctest::Approx(20.0).epsilon(0.001));
}

TEST_CASE("attention vector ops, grouped heads d=576") {
  const msd::AttnCostInput in{12, 8192, 576, 64};
  const std::int64_t dq = msd::attn_vector_ops(in, msd::AttnMethod::dequant);
  const std::int64_t ms = msd::attn_vector_ops(in, msd::AttnMethod::msd);
  CHECK(dq == 21921792);
  CHECK(ms == 7414272);
  CHECK(static_cast<double>(dq) / ms == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("crossover query counts") {
  const auto c128 = msd::attn_crossover(8192, 128, 64);
  CHECK(c128.approx == doctest::Approx(19.6923).epsilon(1e-4));
  CHECK(c128.exact == doctest::Approx(31.8136).epsilon(1e-4));
  const auto c576 = msd::attn_crossover(8192, 576, 64);
  CHECK(c576.approx == doctest::Approx(30.72).epsilon(1e-4));
  // The exact root always sits above the approximation: the approximation
  // drops the N-dependence of the dequant side.
  CHECK(c128.exact > c128.approx);
  CHECK(c576.exact > c576.approx);
  CHECK_THROWS_AS(msd::attn_crossover(100, 128, 48), std::invalid_argument);
}

TEST_CASE("linear layer hbm traffic") {
  const msd::LinearCostInput in{8, 4096, 4096};
  const std::int64_t mn = 4096 * 4096;
  const auto dq = msd::linear_hbm_traffic(in, msd::LinearTrafficMethod::dequant);
  const auto mr =
      msd::linear_hbm_traffic(in, msd::LinearTrafficMethod::msd_resident);
  const auto mc =
      msd::linear_hbm_traffic(in, msd::LinearTrafficMethod::msd_conservative);
  const auto bf = msd::linear_hbm_traffic(in, msd::LinearTrafficMethod::bf16);
  CHECK(dq.bytes == 3 * mn + 2 * 8 * 4096 + 2 * 8 * 4096);
  CHECK(mr.bytes == mn + 4 * 8 * 4096 + 2 * 8 * 4096);
  CHECK(mc.bytes == 2 * mn + 4 * 8 * 4096 + 2 * 8 * 4096);
  CHECK(bf.bytes == 2 * mn + 2 * 8 * 4096 + 2 * 8 * 4096);
  CHECK(mr.dominant_ratio_vs_dequant == 3.0);
  CHECK(mc.dominant_ratio_vs_dequant == 1.5);
  CHECK(bf.dominant_ratio_vs_dequant == 1.5);
  CHECK(dq.dominant_ratio_vs_dequant == 1.0);
  // Full-byte ratio tracks the dominant-term ratio within 5% at this shape.
  CHECK(static_cast<double>(dq.bytes) / mr.bytes ==
        doctest::Approx(3.0).epsilon(0.05));
  // b = 0 leaves the weight term only.
  const auto w0 = msd::linear_hbm_traffic({0, 4096, 4096},
                                          msd::LinearTrafficMethod::dequant);
  CHECK(w0.bytes == 3 * mn);
}

TEST_CASE("attention hbm traffic") {
  CHECK(msd::attn_hbm_traffic(1, 1, msd::AttnMethod::dequant) == 5);
  CHECK(msd::attn_hbm_traffic(1, 1, msd::AttnMethod::msd) == 2);
  CHECK(msd::attn_hbm_traffic(8192, 128, msd::AttnMethod::dequant) == 5242880);
  CHECK(msd::attn_hbm_traffic(8192, 128, msd::AttnMethod::msd) == 2097152);
  CHECK(static_cast<double>(
            msd::attn_hbm_traffic(8192, 128, msd::AttnMethod::dequant)) /
            msd::attn_hbm_traffic(8192, 128, msd::AttnMethod::msd) ==
        2.5);
}

TEST_CASE("latency identities") {
  const msd::LinearCostInput in{1, 4096, 4096};
  msd::ThroughputProfile prof;
  const double mn = 4096.0 * 4096.0;
  const auto dq =
      msd::linear_latency(in, prof, msd::LinearLatencyMethod::dequant);
  CHECK(dq.t_vector == mn / prof.r_vector);
  CHECK(dq.t_cube == 2.0 * mn / prof.r_gemm_bf16);
  CHECK(dq.t_total == std::max(dq.t_vector, dq.t_cube));

  const auto m8 =
      msd::linear_latency(in, prof, msd::LinearLatencyMethod::msd_int8);
  CHECK(m8.t_vector == (8.0 * 4096 + 2.0 * 4096) / prof.r_vector);
  CHECK(m8.t_cube == 4.0 * mn / prof.r_gemm_int8);

  const auto m4 =
      msd::linear_latency(in, prof, msd::LinearLatencyMethod::msd_mxfp4);
  CHECK(m4.t_vector == m8.t_vector);
  CHECK(m4.t_cube == 4.0 * mn / prof.r_gemm_fp4);
  CHECK(m4.t_cube == 0.5 * m8.t_cube);

  const auto f8 =
      msd::linear_latency(in, prof, msd::LinearLatencyMethod::fp8_baseline);
  CHECK(f8.t_vector == 3.0 * 4096 / prof.r_vector);

  // The dequant path is vector-bound at these shapes; the msd paths are not.
  CHECK(dq.t_total == dq.t_vector);
  CHECK(m8.t_total == m8.t_cube);

  prof.t_sync = 1e-6;
  prof.hbm_bandwidth = 1e12;
  const auto wb =
      msd::linear_latency(in, prof, msd::LinearLatencyMethod::dequant);
  const double bytes = static_cast<double>(
      msd::linear_hbm_traffic(in, msd::LinearTrafficMethod::dequant).bytes);
  CHECK(wb.t_total ==
        doctest::Approx(dq.t_total + 1e-6 + bytes / 1e12).epsilon(1e-12));
}

TEST_CASE("effective queries and vector flops") {
  CHECK(msd::effective_queries(2, 4) == 12);
  CHECK(msd::effective_queries(0, 1) == 1);
  CHECK_THROWS_AS(msd::effective_queries(-1, 1), std::invalid_argument);
  CHECK(msd::vector_flops_linear(4096, 4096, msd::VectorFlopsMethod::dequant) ==
        33554432);
  CHECK(msd::vector_flops_linear(4096, 4096, msd::VectorFlopsMethod::msd) ==
        8 * 4096 + 2 * 4096);
}

}  // TEST_SUITE
