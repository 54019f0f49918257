#include "msd/gemm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "msd/numerics.hpp"

namespace msd {

namespace {

void check_shapes(const SimMatrix& x, int w_rows, int w_cols) {
  if (x.cols != w_cols || x.rows < 1 || w_rows < 1) {
    throw std::invalid_argument("shape mismatch");
  }
}

std::vector<float> dequant_weight_bf16(const QuantizedWeight& w) {
  std::vector<float> out(static_cast<std::size_t>(w.rows) * w.cols);
  for (int j = 0; j < w.rows; ++j) {
    const std::int8_t* wr = w.row(j);
    for (int k = 0; k < w.cols; ++k) {
      out[static_cast<std::size_t>(j) * w.cols + k] =
          bf16_truncate(w.scales[j] * static_cast<float>(wr[k]));
    }
  }
  return out;
}

// One integer GEMM row: codes (length n) against all weight rows.
void int8_dot_rows(const std::int8_t* codes, const QuantizedWeight& w,
                   std::int64_t* acc) {
  for (int j = 0; j < w.rows; ++j) {
    const std::int8_t* wr = w.row(j);
    std::int64_t s = 0;
    for (int k = 0; k < w.cols; ++k) {
      s += static_cast<std::int64_t>(codes[k]) * wr[k];
    }
    acc[j] = s;
  }
}

}  // namespace

SimMatrix gemm_fp32_oracle(const SimMatrix& x, const QuantizedWeight& w) {
  check_shapes(x, w.rows, w.cols);
  SimMatrix y(x.rows, w.rows);
  for (int i = 0; i < x.rows; ++i) {
    const float* xr = x.row(i);
    for (int j = 0; j < w.rows; ++j) {
      const std::int8_t* wr = w.row(j);
      const double s = w.scales[j];
      double acc = 0.0;
      for (int k = 0; k < w.cols; ++k) {
        acc += static_cast<double>(xr[k]) * (s * wr[k]);
      }
      y.at(i, j) = static_cast<float>(acc);
    }
  }
  return y;
}

SimMatrix gemm_dequant(const SimMatrix& x, const QuantizedWeight& w) {
  check_shapes(x, w.rows, w.cols);
  const std::vector<float> wd = dequant_weight_bf16(w);
  SimMatrix y(x.rows, w.rows);
  std::vector<float> xb(x.cols);
  for (int i = 0; i < x.rows; ++i) {
    const float* xr = x.row(i);
    for (int k = 0; k < x.cols; ++k) xb[k] = bf16_truncate(xr[k]);
    for (int j = 0; j < w.rows; ++j) {
      const float* wr = wd.data() + static_cast<std::size_t>(j) * w.cols;
      float acc = 0.0f;
      for (int k = 0; k < x.cols; ++k) acc += xb[k] * wr[k];
      y.at(i, j) = acc;
    }
  }
  return y;
}

SimMatrix gemm_single_scale(const SimMatrix& x, const QuantizedWeight& w) {
  check_shapes(x, w.rows, w.cols);
  SimMatrix y(x.rows, w.rows);
  std::vector<std::int64_t> acc(w.rows);
  for (int i = 0; i < x.rows; ++i) {
    const KDecomposition d = decompose_k({x.row(i), static_cast<std::size_t>(x.cols)}, 1);
    int8_dot_rows(d.components[0].data(), w, acc.data());
    for (int j = 0; j < w.rows; ++j) {
      y.at(i, j) = w.scales[j] * (d.scales[0] * static_cast<float>(acc[j]));
    }
  }
  return y;
}

SimMatrix gemm_msd_int8(const SimMatrix& x, const QuantizedWeight& w,
                        ScaleMode mode) {
  check_shapes(x, w.rows, w.cols);
  SimMatrix y(x.rows, w.rows);
  std::vector<std::int64_t> acc1(w.rows);
  std::vector<std::int64_t> acc2(w.rows);
  for (int i = 0; i < x.rows; ++i) {
    const Int8Decomposition d =
        decompose2({x.row(i), static_cast<std::size_t>(x.cols)}, mode);
    int8_dot_rows(d.x1.data(), w, acc1.data());
    int8_dot_rows(d.x2.data(), w, acc2.data());
    for (int j = 0; j < w.rows; ++j) {
      y.at(i, j) = w.scales[j] * (d.alpha * static_cast<float>(acc1[j]) +
                                  d.beta * static_cast<float>(acc2[j]));
    }
  }
  return y;
}

SimMatrix gemm_msd_int8_fused(const SimMatrix& x, const QuantizedWeight& w,
                              ScaleMode mode) {
  check_shapes(x, w.rows, w.cols);
  SimMatrix y(x.rows, w.rows);
  // Concatenated code rows: row 2i holds x1, row 2i+1 holds x2.
  std::vector<std::int8_t> codes(static_cast<std::size_t>(2) * x.rows * x.cols);
  std::vector<float> alphas(x.rows);
  std::vector<float> betas(x.rows);
  for (int i = 0; i < x.rows; ++i) {
    const Int8Decomposition d =
        decompose2({x.row(i), static_cast<std::size_t>(x.cols)}, mode);
    alphas[i] = d.alpha;
    betas[i] = d.beta;
    std::copy(d.x1.begin(), d.x1.end(),
              codes.begin() + static_cast<std::size_t>(2 * i) * x.cols);
    std::copy(d.x2.begin(), d.x2.end(),
              codes.begin() + static_cast<std::size_t>(2 * i + 1) * x.cols);
  }
  std::vector<std::int64_t> acc(static_cast<std::size_t>(2) * x.rows * w.rows);
  for (int r = 0; r < 2 * x.rows; ++r) {
    int8_dot_rows(codes.data() + static_cast<std::size_t>(r) * x.cols, w,
                  acc.data() + static_cast<std::size_t>(r) * w.rows);
  }
  for (int i = 0; i < x.rows; ++i) {
    const std::int64_t* a1 = acc.data() + static_cast<std::size_t>(2 * i) * w.rows;
    const std::int64_t* a2 = a1 + w.rows;
    for (int j = 0; j < w.rows; ++j) {
      y.at(i, j) = w.scales[j] * (alphas[i] * static_cast<float>(a1[j]) +
                                  betas[i] * static_cast<float>(a2[j]));
    }
  }
  return y;
}

SimMatrix gemm_mxfp4(const SimMatrix& x, const MxWeight& w, MxGemmMethod method,
                     MxVariant variant) {
  check_shapes(x, w.rows, w.cols);
  if (x.cols % kMxBlock != 0) {
    throw std::invalid_argument("reduction dimension must be a multiple of 32");
  }
  const int blocks = x.cols / kMxBlock;

  // Decoded quantized activations; reconstruction is exact in binary32.
  SimMatrix xq(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    const float* xr = x.row(i);
    float* qr = xq.row(i);
    for (int b = 0; b < blocks; ++b) {
      const std::span<const float> blk(xr + b * kMxBlock, kMxBlock);
      if (method == MxGemmMethod::mxfp8_baseline) {
        const auto rec = mxfp8_reconstruct(mxfp8_quantize_block(blk));
        std::copy(rec.begin(), rec.end(), qr + b * kMxBlock);
      } else {
        const auto rec = mxfp4_reconstruct(mxfp4_decompose_block(blk, variant));
        std::copy(rec.begin(), rec.end(), qr + b * kMxBlock);
      }
    }
  }

  SimMatrix y(x.rows, w.rows);
  for (int i = 0; i < x.rows; ++i) {
    const float* qr = xq.row(i);
    for (int j = 0; j < w.rows; ++j) {
      const Fp4Code* wr = w.codes.data() + static_cast<std::size_t>(j) * w.cols;
      const int* we = w.block_exponents.data() + static_cast<std::size_t>(j) * blocks;
      float acc = 0.0f;
      for (int b = 0; b < blocks; ++b) {
        float part = 0.0f;
        for (int k = 0; k < kMxBlock; ++k) {
          part += qr[b * kMxBlock + k] * fp4_decode(wr[b * kMxBlock + k]);
        }
        // Power-of-two block scale: exact in binary32.
        acc += std::ldexp(part, we[b]);
      }
      y.at(i, j) = acc;
    }
  }
  return y;
}

SimMatrix gemm_mxfp4_reference(const SimMatrix& x, const MxWeight& w) {
  check_shapes(x, w.rows, w.cols);
  const SimMatrix wd = mxfp4_dequant_weight(w);
  SimMatrix y(x.rows, w.rows);
  for (int i = 0; i < x.rows; ++i) {
    const float* xr = x.row(i);
    for (int j = 0; j < w.rows; ++j) {
      const float* wr = wd.row(j);
      double acc = 0.0;
      for (int k = 0; k < x.cols; ++k) {
        acc += static_cast<double>(xr[k]) * wr[k];
      }
      y.at(i, j) = static_cast<float>(acc);
    }
  }
  return y;
}

}  // namespace msd
