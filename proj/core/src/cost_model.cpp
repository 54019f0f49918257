#include "msd/cost_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace msd {

namespace {

void check_attn(const AttnCostInput& in) {
  if (in.n < 0 || in.m < 1 || in.d < 1 || in.bc < 1 || in.m % in.bc != 0) {
    throw std::invalid_argument("invalid attention cost input");
  }
}

}  // namespace

std::int64_t attn_vector_ops(const AttnCostInput& in, AttnMethod method) {
  check_attn(in);
  const std::int64_t tc = in.tc();
  if (method == AttnMethod::dequant) {
    return 4 * in.m * in.d + 4 * in.n * in.m + 3 * in.n * in.d * tc;
  }
  return 6 * in.n * in.d + 12 * in.n * in.m + 7 * in.n * in.d * tc;
}

CrossoverResult attn_crossover(std::int64_t m, std::int64_t d, std::int64_t bc) {
  if (m < 1 || d < 0 || bc < 1 || m % bc != 0) {
    throw std::invalid_argument("invalid attention cost input");
  }
  const double tc = static_cast<double>(m) / bc;
  CrossoverResult r;
  r.approx = 4.0 * m * d / (12.0 * m + 7.0 * d * tc);
  // dequant(N) == msd(N) solved exactly from the two op-count formulas.
  r.exact = 4.0 * m * d / (6.0 * d + 8.0 * m + 4.0 * d * tc);
  return r;
}

TrafficResult linear_hbm_traffic(const LinearCostInput& in,
                                 LinearTrafficMethod method) {
  if (in.b < 0 || in.m < 1 || in.n < 1) {
    throw std::invalid_argument("invalid linear cost input");
  }
  const std::int64_t mn = in.m * in.n;
  const std::int64_t bn = in.b * in.n;
  const std::int64_t bm = in.b * in.m;
  TrafficResult r;
  std::int64_t dominant = 0;
  switch (method) {
    case LinearTrafficMethod::dequant:
      r.bytes = 3 * mn + 2 * bn + 2 * bm;
      dominant = 3 * mn;
      break;
    case LinearTrafficMethod::msd_resident:
      r.bytes = mn + 4 * bn + 2 * bm;
      dominant = mn;
      break;
    case LinearTrafficMethod::msd_conservative:
      r.bytes = 2 * mn + 4 * bn + 2 * bm;
      dominant = 2 * mn;
      break;
    case LinearTrafficMethod::bf16:
      r.bytes = 2 * mn + 2 * bn + 2 * bm;
      dominant = 2 * mn;
      break;
  }
  r.dominant_ratio_vs_dequant = 3.0 * mn / static_cast<double>(dominant);
  return r;
}

std::int64_t attn_hbm_traffic(std::int64_t m, std::int64_t d,
                              AttnMethod method) {
  if (m < 1 || d < 1) throw std::invalid_argument("invalid attention cost input");
  return (method == AttnMethod::dequant) ? 5 * m * d : 2 * m * d;
}

LatencyResult linear_latency(const LinearCostInput& in,
                             const ThroughputProfile& prof,
                             LinearLatencyMethod method) {
  if (in.m < 1 || in.n < 1) throw std::invalid_argument("invalid linear cost input");
  const double mn = static_cast<double>(in.m) * in.n;
  LatencyResult r;
  LinearTrafficMethod traffic = LinearTrafficMethod::bf16;
  switch (method) {
    case LinearLatencyMethod::dequant:
      r.t_vector = mn / prof.r_vector;
      r.t_cube = 2.0 * mn / prof.r_gemm_bf16;
      traffic = LinearTrafficMethod::dequant;
      break;
    case LinearLatencyMethod::msd_int8:
      r.t_vector = (8.0 * in.n + 2.0 * in.m) / prof.r_vector;
      r.t_cube = 4.0 * mn / prof.r_gemm_int8;
      traffic = LinearTrafficMethod::msd_resident;
      break;
    case LinearLatencyMethod::msd_mxfp4:
      r.t_vector = (8.0 * in.n + 2.0 * in.m) / prof.r_vector;
      r.t_cube = 4.0 * mn / prof.r_gemm_fp4;
      traffic = LinearTrafficMethod::msd_resident;
      break;
    case LinearLatencyMethod::fp8_baseline:
      r.t_vector = 3.0 * in.n / prof.r_vector;
      r.t_cube = 2.0 * mn / prof.r_gemm_fp8;
      traffic = LinearTrafficMethod::bf16;
      break;
  }
  r.t_total = std::max(r.t_vector, r.t_cube) + prof.t_sync;
  if (prof.hbm_bandwidth > 0.0) {
    r.t_total += linear_hbm_traffic(in, traffic).bytes / prof.hbm_bandwidth;
  }
  return r;
}

std::int64_t effective_queries(std::int64_t n_spec, std::int64_t g) {
  if (n_spec < 0 || g < 1) throw std::invalid_argument("invalid input");
  return (1 + n_spec) * g;
}

std::int64_t vector_flops_linear(std::int64_t n, std::int64_t m,
                                 VectorFlopsMethod method) {
  if (n < 1 || m < 1) throw std::invalid_argument("invalid input");
  if (method == VectorFlopsMethod::dequant) return 2 * m * n;
  return 8 * n + 2 * m;  // 3n pass 1, 5n pass 2, 2m reconstruction
}

}  // namespace msd
