#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace msd {

// FP32-backed matrix; `bf16` records that every entry has been pushed
// through bf16_truncate.
struct SimMatrix {
  int rows = 0;
  int cols = 0;
  bool bf16 = false;
  std::vector<float> data;

  SimMatrix() = default;
  SimMatrix(int r, int c, bool truncated = false)
      : rows(r), cols(c), bf16(truncated),
        data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0f) {}

  float& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  float at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  float* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const float* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  std::size_t size() const { return data.size(); }
};

// INT8 value matrix with one FP32 dequantization scale per output row.
struct QuantizedWeight {
  int rows = 0;
  int cols = 0;
  std::vector<std::int8_t> values;  // rows x cols, row-major
  std::vector<float> scales;        // length rows

  const std::int8_t* row(int r) const {
    return values.data() + static_cast<std::size_t>(r) * cols;
  }
};

// INT8 K/V cache for one head; per-channel scales run along the head
// dimension (length dim), not along tokens.
struct KvCache {
  int tokens = 0;
  int dim = 0;
  std::vector<std::int8_t> k;  // tokens x dim
  std::vector<std::int8_t> v;  // tokens x dim
  std::vector<float> sk;       // length dim
  std::vector<float> sv;       // length dim

  const std::int8_t* k_row(int t) const { return k.data() + static_cast<std::size_t>(t) * dim; }
  const std::int8_t* v_row(int t) const { return v.data() + static_cast<std::size_t>(t) * dim; }
};

}  // namespace msd
