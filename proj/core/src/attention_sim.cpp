#include "msd/attention_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "msd/int8_decompose.hpp"
#include "msd/numerics.hpp"

namespace msd {

namespace {

void check_shapes(const SimMatrix& q, const KvCache& kv, int bc) {
  if (q.cols != kv.dim || q.rows < 1 || kv.tokens < 1) {
    throw std::invalid_argument("shape mismatch");
  }
  if (bc < 1 || kv.tokens % bc != 0) {
    throw std::invalid_argument("tile size must divide the kv length");
  }
}

}  // namespace

SimMatrix attention_oracle(const SimMatrix& q, const KvCache& kv) {
  check_shapes(q, kv, kv.tokens);
  const int n = q.rows;
  const int m = kv.tokens;
  const int d = kv.dim;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  SimMatrix o(n, d);
  std::vector<double> s(m);
  std::vector<double> acc(d);
  for (int i = 0; i < n; ++i) {
    const float* qr = q.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < m; ++t) {
      const std::int8_t* kr = kv.k_row(t);
      double dot = 0.0;
      for (int c = 0; c < d; ++c) {
        dot += static_cast<double>(qr[c]) *
               (static_cast<double>(kv.sk[c]) * kr[c]);
      }
      s[t] = dot * inv_sqrt_d;
      if (s[t] > mx) mx = s[t];
    }
    double l = 0.0;
    for (int t = 0; t < m; ++t) {
      s[t] = std::exp(s[t] - mx);
      l += s[t];
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int t = 0; t < m; ++t) {
      const std::int8_t* vr = kv.v_row(t);
      for (int c = 0; c < d; ++c) {
        acc[c] += s[t] * (static_cast<double>(kv.sv[c]) * vr[c]);
      }
    }
    for (int c = 0; c < d; ++c) {
      o.at(i, c) = static_cast<float>(acc[c] / l);
    }
  }
  return o;
}

SimMatrix attention_dequant(const SimMatrix& q, const KvCache& kv) {
  return attention_flash(q, kv, kv.tokens);
}

SimMatrix attention_flash(const SimMatrix& q, const KvCache& kv, int bc) {
  check_shapes(q, kv, bc);
  const int n = q.rows;
  const int m = kv.tokens;
  const int d = kv.dim;
  const float inv_sqrt_d = 1.0f / std::sqrt(static_cast<float>(d));

  // BF16 inputs, dequantized once up front.
  std::vector<float> qb(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) qb[i] = bf16_truncate(q.data[i]);
  std::vector<float> kd(kv.k.size());
  std::vector<float> vd(kv.v.size());
  for (int t = 0; t < m; ++t) {
    for (int c = 0; c < d; ++c) {
      const std::size_t idx = static_cast<std::size_t>(t) * d + c;
      kd[idx] = bf16_truncate(kv.sk[c] * static_cast<float>(kv.k[idx]));
      vd[idx] = bf16_truncate(kv.sv[c] * static_cast<float>(kv.v[idx]));
    }
  }

  SimMatrix o(n, d);
  std::vector<float> row_m(n, -std::numeric_limits<float>::infinity());
  std::vector<float> row_l(n, 0.0f);
  std::vector<float> s(bc);
  for (int t0 = 0; t0 < m; t0 += bc) {
    for (int i = 0; i < n; ++i) {
      const float* qr = qb.data() + static_cast<std::size_t>(i) * d;
      float tile_max = -std::numeric_limits<float>::infinity();
      for (int j = 0; j < bc; ++j) {
        const float* kr = kd.data() + static_cast<std::size_t>(t0 + j) * d;
        float acc = 0.0f;
        for (int c = 0; c < d; ++c) acc += qr[c] * kr[c];
        s[j] = acc * inv_sqrt_d;
        if (s[j] > tile_max) tile_max = s[j];
      }
      const float old_m = row_m[i];
      const float new_m = std::max(old_m, tile_max);
      const float rescale = (t0 == 0) ? 0.0f : std::exp(old_m - new_m);
      row_m[i] = new_m;
      row_l[i] *= rescale;
      float* orow = o.row(i);
      for (int c = 0; c < d; ++c) orow[c] *= rescale;
      for (int j = 0; j < bc; ++j) {
        const float p = std::exp(s[j] - new_m);
        row_l[i] += p;
        const float pb = bf16_truncate(p);
        const float* vr = vd.data() + static_cast<std::size_t>(t0 + j) * d;
        for (int c = 0; c < d; ++c) orow[c] += pb * vr[c];
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    float* orow = o.row(i);
    for (int c = 0; c < d; ++c) orow[c] /= row_l[i];
  }
  return o;
}

SimMatrix attention_flash_msd(const SimMatrix& q, const KvCache& kv, int bc) {
  check_shapes(q, kv, bc);
  const int n = q.rows;
  const int m = kv.tokens;
  const int d = kv.dim;
  const float inv_sqrt_d = 1.0f / std::sqrt(static_cast<float>(d));
  const float alpha_p = 1.0f / 127.0f;  // ||P||inf == 1 by construction
  const float beta_p = alpha_p / 254.0f;

  // Absorb the K scale into Q, then decompose each query row once; the
  // scales are tile-independent.
  std::vector<Int8Decomposition> qd(n);
  {
    std::vector<float> qt(d);
    for (int i = 0; i < n; ++i) {
      const float* qr = q.row(i);
      for (int c = 0; c < d; ++c) qt[c] = bf16_truncate(qr[c]) * kv.sk[c];
      qd[i] = decompose2(qt);
    }
  }

  SimMatrix o(n, d);
  std::vector<float> row_m(n, -std::numeric_limits<float>::infinity());
  std::vector<float> row_l(n, 0.0f);
  std::vector<float> s(bc);
  std::vector<float> p(bc);
  std::vector<std::int8_t> p1(bc);
  std::vector<std::int8_t> p2(bc);
  for (int t0 = 0; t0 < m; t0 += bc) {
    for (int i = 0; i < n; ++i) {
      const Int8Decomposition& dq = qd[i];
      float tile_max = -std::numeric_limits<float>::infinity();
      for (int j = 0; j < bc; ++j) {
        const std::int8_t* kr = kv.k_row(t0 + j);
        std::int64_t a1 = 0;
        std::int64_t a2 = 0;
        for (int c = 0; c < d; ++c) {
          a1 += static_cast<std::int64_t>(dq.x1[c]) * kr[c];
          a2 += static_cast<std::int64_t>(dq.x2[c]) * kr[c];
        }
        s[j] = (dq.alpha * static_cast<float>(a1) +
                dq.beta * static_cast<float>(a2)) *
               inv_sqrt_d;
        if (s[j] > tile_max) tile_max = s[j];
      }
      const float old_m = row_m[i];
      const float new_m = std::max(old_m, tile_max);
      const float rescale = (t0 == 0) ? 0.0f : std::exp(old_m - new_m);
      row_m[i] = new_m;
      row_l[i] *= rescale;
      float* orow = o.row(i);
      for (int c = 0; c < d; ++c) orow[c] *= rescale;
      for (int j = 0; j < bc; ++j) {
        p[j] = std::exp(s[j] - new_m);
        row_l[i] += p[j];
      }
      // Constant scales: no reduction over P.
      decompose2_fixed({p.data(), static_cast<std::size_t>(bc)}, alpha_p,
                       beta_p, p1.data(), p2.data());
      for (int c = 0; c < d; ++c) {
        std::int64_t a1 = 0;
        std::int64_t a2 = 0;
        for (int j = 0; j < bc; ++j) {
          const std::int8_t v = kv.v[static_cast<std::size_t>(t0 + j) * d + c];
          a1 += static_cast<std::int64_t>(p1[j]) * v;
          a2 += static_cast<std::int64_t>(p2[j]) * v;
        }
        orow[c] += alpha_p * static_cast<float>(a1) +
                   beta_p * static_cast<float>(a2);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    float* orow = o.row(i);
    for (int c = 0; c < d; ++c) orow[c] = orow[c] * kv.sv[c] / row_l[i];
  }
  return o;
}

SimMatrix attention_flash_exact(const SimMatrix& q, const KvCache& kv, int bc) {
  check_shapes(q, kv, bc);
  const int n = q.rows;
  const int m = kv.tokens;
  const int d = kv.dim;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  std::vector<double> oacc(static_cast<std::size_t>(n) * d, 0.0);
  std::vector<double> row_m(n, -std::numeric_limits<double>::infinity());
  std::vector<double> row_l(n, 0.0);
  std::vector<double> s(bc);
  for (int t0 = 0; t0 < m; t0 += bc) {
    for (int i = 0; i < n; ++i) {
      const float* qr = q.row(i);
      double tile_max = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < bc; ++j) {
        const std::int8_t* kr = kv.k_row(t0 + j);
        double acc = 0.0;
        for (int c = 0; c < d; ++c) {
          acc += static_cast<double>(qr[c]) *
                 (static_cast<double>(kv.sk[c]) * kr[c]);
        }
        s[j] = acc * inv_sqrt_d;
        if (s[j] > tile_max) tile_max = s[j];
      }
      const double old_m = row_m[i];
      const double new_m = std::max(old_m, tile_max);
      const double rescale = (t0 == 0) ? 0.0 : std::exp(old_m - new_m);
      row_m[i] = new_m;
      row_l[i] *= rescale;
      double* orow = oacc.data() + static_cast<std::size_t>(i) * d;
      for (int c = 0; c < d; ++c) orow[c] *= rescale;
      for (int j = 0; j < bc; ++j) {
        const double p = std::exp(s[j] - new_m);
        row_l[i] += p;
        const std::int8_t* vr = kv.v_row(t0 + j);
        for (int c = 0; c < d; ++c) {
          orow[c] += p * (static_cast<double>(kv.sv[c]) * vr[c]);
        }
      }
    }
  }
  SimMatrix o(n, d);
  for (int i = 0; i < n; ++i) {
    const double* orow = oacc.data() + static_cast<std::size_t>(i) * d;
    for (int c = 0; c < d; ++c) {
      o.at(i, c) = static_cast<float>(orow[c] / row_l[i]);
    }
  }
  return o;
}

}  // namespace msd
