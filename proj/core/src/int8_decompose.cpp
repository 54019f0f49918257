#include "msd/int8_decompose.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "msd/numerics.hpp"

namespace msd {

namespace {

std::atomic<std::uint64_t> g_max_reductions{0};

float checked_max_abs(std::span<const float> x) {
  g_max_reductions.fetch_add(1, std::memory_order_relaxed);
  float m = 0.0f;
  for (float v : x) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite value");
    const float a = std::fabs(v);
    if (a > m) m = a;
  }
  return m;
}

std::int8_t quantize_code(double q) {
  long long i = round_half_even(q);
  if (i < -128) i = -128;
  if (i > 127) i = 127;
  return static_cast<std::int8_t>(i);
}

}  // namespace

std::uint64_t max_reduction_count() {
  return g_max_reductions.load(std::memory_order_relaxed);
}

float detail::scale_below(float max_abs, double divisor) {
  if (max_abs == 0.0f) return 0.0f;
  float s = static_cast<float>(static_cast<double>(max_abs) / divisor);
  while (static_cast<double>(s) * divisor > static_cast<double>(max_abs)) {
    s = std::nextafterf(s, 0.0f);
  }
  return s;
}

Int8Decomposition decompose2(std::span<const float> x, ScaleMode mode) {
  if (x.empty()) throw std::invalid_argument("empty vector");
  const double div1 = (mode == ScaleMode::standard) ? 127.0 : 127.49;
  const double div2 = (mode == ScaleMode::standard) ? 254.0 : 254.98;

  Int8Decomposition d;
  d.x1.resize(x.size());
  d.x2.resize(x.size());

  const float m = checked_max_abs(x);
  if (m == 0.0f) return d;  // alpha = beta = 0, zero codes, exact

  d.alpha = detail::scale_below(m, div1);
  d.beta = detail::scale_below(d.alpha, div2);
  if (mode == ScaleMode::fractional) {
    // Keep beta/2 at or below m/65015 (the divisors' product is 65014.8,
    // a hair looser); one extra nudge preserves the stated bound exactly.
    while (static_cast<double>(d.beta) * 32507.5 > static_cast<double>(m)) {
      d.beta = std::nextafterf(d.beta, 0.0f);
    }
  }
  const double a = d.alpha;
  const double b = d.beta;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::int8_t q1 = quantize_code(x[i] / a);
    const double r = static_cast<double>(x[i]) - a * q1;  // exact in double
    d.x1[i] = q1;
    d.x2[i] = quantize_code(r / b);
  }
  return d;
}

void decompose2_fixed(std::span<const float> x, float alpha, float beta,
                      std::int8_t* x1, std::int8_t* x2) {
  const double a = alpha;
  const double b = beta;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::int8_t q1 = quantize_code(x[i] / a);
    const double r = static_cast<double>(x[i]) - a * q1;
    x1[i] = q1;
    x2[i] = quantize_code(r / b);
  }
}

std::vector<float> reconstruct(const Int8Decomposition& d) {
  std::vector<float> out(d.x1.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = d.alpha * static_cast<float>(d.x1[i]) +
             d.beta * static_cast<float>(d.x2[i]);
  }
  return out;
}

KDecomposition decompose_k(std::span<const float> x, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (x.empty()) throw std::invalid_argument("empty vector");

  KDecomposition d;
  d.scales.resize(k);
  d.components.assign(k, std::vector<std::int8_t>(x.size(), 0));

  const float m = checked_max_abs(x);
  std::vector<double> res(x.begin(), x.end());

  float scale = detail::scale_below(m, 127.0);
  for (int p = 0; p < k; ++p) {
    d.scales[p] = scale;
    if (scale != 0.0f) {
      const double s = scale;
      for (std::size_t i = 0; i < res.size(); ++i) {
        const std::int8_t q = quantize_code(res[i] / s);
        d.components[p][i] = q;
        res[i] -= s * q;
      }
    }
    scale = detail::scale_below(scale, 254.0);
  }
  return d;
}

std::vector<float> reconstruct(const KDecomposition& d) {
  const std::size_t n = d.components.empty() ? 0 : d.components[0].size();
  std::vector<float> out(n, 0.0f);
  for (std::size_t p = 0; p < d.components.size(); ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += d.scales[p] * static_cast<float>(d.components[p][i]);
    }
  }
  return out;
}

}  // namespace msd
