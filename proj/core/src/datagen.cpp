#include "msd/datagen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "msd/numerics.hpp"

namespace msd {

namespace {

constexpr double kHeavyTailClip = 1e6;
constexpr std::uint64_t kLanesPerElement = 16;

// One 64-bit draw per (key, counter).
std::uint64_t draw(std::uint64_t key, std::uint64_t counter) {
  return detail::mix64(key ^ detail::mix64(counter + 0x632be59bd9b4e019ull));
}

// [0, 1)
double unit(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(draw(key, counter) >> 11) * 0x1.0p-53;
}

// (0, 1)
double unit_open(std::uint64_t key, std::uint64_t counter) {
  return (static_cast<double>(draw(key, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller; lane pair (2j, 2j+1) within the element's counter window.
double gaussian01(std::uint64_t key, std::uint64_t base, std::uint64_t lane_pair) {
  const double u1 = unit_open(key, base + 2 * lane_pair);
  const double u2 = unit(key, base + 2 * lane_pair + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double clip(double v, double lim) { return std::fmin(std::fmax(v, -lim), lim); }

std::uint64_t make_key(ExperimentSeed s, std::uint64_t salt) {
  return detail::mix64(s.seed) ^ detail::mix64(detail::mix64(s.stream) + salt);
}

}  // namespace

std::uint64_t detail::mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double detail::sample(const DistributionSpec& spec, std::uint64_t key,
                      std::uint64_t index) {
  const std::uint64_t base = index * kLanesPerElement;
  switch (spec.kind) {
    case DistKind::gaussian:
      return spec.p1 + spec.p2 * gaussian01(key, base, 0);
    case DistKind::uniform:
      return spec.p1 + (spec.p2 - spec.p1) * unit(key, base);
    case DistKind::laplacian: {
      const double u = unit_open(key, base);
      return (u < 0.5) ? spec.p1 + spec.p2 * std::log(2.0 * u)
                       : spec.p1 - spec.p2 * std::log(2.0 * (1.0 - u));
    }
    case DistKind::exponential:
      return -std::log(unit_open(key, base)) / spec.p1;
    case DistKind::student_t: {
      const int df = static_cast<int>(spec.p1);
      if (df < 1 || df > 7) throw std::invalid_argument("student_t df must be in 1..7");
      const double z = gaussian01(key, base, 0);
      double chi2 = 0.0;
      for (int j = 1; j <= df; ++j) {
        const double g = gaussian01(key, base, j);
        chi2 += g * g;
      }
      return clip(z / std::sqrt(chi2 / df), kHeavyTailClip);
    }
    case DistKind::cauchy:
      return clip(std::tan(std::numbers::pi * (unit_open(key, base) - 0.5)),
                  kHeavyTailClip);
    case DistKind::gaussian_outliers: {
      double z = gaussian01(key, base, 0);
      if (unit(key, base + 4) < spec.p1) z *= spec.p2;
      return z;
    }
  }
  throw std::invalid_argument("unknown distribution kind");
}

SimMatrix gen_activation(int rows, int cols, const DistributionSpec& spec,
                         ExperimentSeed seed) {
  SimMatrix m = gen_activation_raw(rows, cols, spec, seed);
  m.bf16 = true;
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.data[i] = bf16_truncate(m.data[i]);
  }
  return m;
}

SimMatrix gen_activation_raw(int rows, int cols, const DistributionSpec& spec,
                             ExperimentSeed seed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("positive shape required");
  SimMatrix m(rows, cols, /*truncated=*/false);
  const std::uint64_t key = make_key(seed, 0x41435456ull);  // activations
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.data[i] = static_cast<float>(detail::sample(spec, key, i));
  }
  return m;
}

QuantizedWeight gen_int8_weight(int rows, int cols, ExperimentSeed seed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("positive shape required");
  QuantizedWeight w;
  w.rows = rows;
  w.cols = cols;
  w.values.resize(static_cast<std::size_t>(rows) * cols);
  w.scales.resize(rows);
  const std::uint64_t vkey = make_key(seed, 0x57474854ull);  // weight values
  const std::uint64_t skey = make_key(seed, 0x5343414cull);  // scales
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    w.values[i] = static_cast<std::int8_t>(
        static_cast<int>(unit(vkey, i) * 255.0) - 127);
  }
  for (int r = 0; r < rows; ++r) {
    w.scales[r] = static_cast<float>(0.01 + 0.99 * unit(skey, r));
  }
  return w;
}

KvCache gen_kv_cache(int tokens, int dim, ExperimentSeed seed) {
  if (tokens < 1 || dim < 1) throw std::invalid_argument("positive shape required");
  KvCache kv;
  kv.tokens = tokens;
  kv.dim = dim;
  kv.k.resize(static_cast<std::size_t>(tokens) * dim);
  kv.v.resize(kv.k.size());
  kv.sk.resize(dim);
  kv.sv.resize(dim);
  const std::uint64_t kkey = make_key(seed, 0x4b564b31ull);
  const std::uint64_t vkey = make_key(seed, 0x4b564b32ull);
  const std::uint64_t skey = make_key(seed, 0x4b564b33ull);
  for (std::size_t i = 0; i < kv.k.size(); ++i) {
    kv.k[i] = static_cast<std::int8_t>(static_cast<int>(unit(kkey, i) * 255.0) - 127);
    kv.v[i] = static_cast<std::int8_t>(static_cast<int>(unit(vkey, i) * 255.0) - 127);
  }
  for (int c = 0; c < dim; ++c) {
    kv.sk[c] = static_cast<float>(0.01 + 0.99 * unit(skey, 2 * c));
    kv.sv[c] = static_cast<float>(0.01 + 0.99 * unit(skey, 2 * c + 1));
  }
  return kv;
}

}  // namespace msd
