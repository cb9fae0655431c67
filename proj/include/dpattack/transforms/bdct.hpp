#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "dpattack/core/tensor.hpp"
#include "dpattack/transforms/padding.hpp"

namespace dpattack {

/// Orthonormal DCT-II basis: row k holds alpha(k) cos(pi (2n+1) k / 2w).
inline std::vector<double> dct_matrix(std::size_t w) {
  std::vector<double> m(w * w);
  for (std::size_t k = 0; k < w; ++k) {
    const double alpha = k == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
    for (std::size_t n = 0; n < w; ++n) {
      m[k * w + n] = alpha * std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / (2.0 * w));
    }
  }
  return m;
}

/// Per-block DCT coefficients laid out as C×Z×w×w, blocks in row-major
/// order over the (padded) block grid.
struct BdctCoefficients {
  std::size_t channels = 0;
  std::size_t block_size = 0;
  std::size_t blocks_y = 0;  // block rows in the padded grid
  std::size_t blocks_x = 0;  // block columns in the padded grid
  std::size_t height = 0;    // source (unpadded) height
  std::size_t width = 0;     // source (unpadded) width
  std::vector<double> data;

  std::size_t blocks() const { return blocks_y * blocks_x; }
  std::size_t band_count() const { return block_size * block_size; }

  double& at(std::size_t c, std::size_t z, std::size_t i, std::size_t j) {
    return data[((c * blocks() + z) * block_size + i) * block_size + j];
  }
  double at(std::size_t c, std::size_t z, std::size_t i, std::size_t j) const {
    return data[((c * blocks() + z) * block_size + i) * block_size + j];
  }
  const double* block(std::size_t c, std::size_t z) const {
    return data.data() + (c * blocks() + z) * block_size * block_size;
  }
};

namespace bdct_detail {

inline void check_block_size(std::size_t w, std::size_t h, std::size_t wd) {
  if (w == 0 || w > std::min(h, wd)) {
    throw BlockSizeError("block size " + std::to_string(w) +
                         " invalid for " + std::to_string(h) + "x" +
                         std::to_string(wd) + " image");
  }
}

// out = M * in * M^T  (forward) or M^T * in * M (inverse) on a w×w block.
inline void transform_block(const std::vector<double>& m, std::size_t w,
                            const double* in, double* out, bool inverse,
                            std::vector<double>& tmp) {
  tmp.assign(w * w, 0.0);
  for (std::size_t k = 0; k < w; ++k) {
    for (std::size_t j = 0; j < w; ++j) {
      double s = 0.0;
      for (std::size_t n = 0; n < w; ++n) {
        s += (inverse ? m[n * w + k] : m[k * w + n]) * in[n * w + j];
      }
      tmp[k * w + j] = s;
    }
  }
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t l = 0; l < w; ++l) {
      double s = 0.0;
      for (std::size_t n = 0; n < w; ++n) {
        s += tmp[i * w + n] * (inverse ? m[n * w + l] : m[l * w + n]);
      }
      out[i * w + l] = s;
    }
  }
}

}  // namespace bdct_detail

/// Block-wise orthonormal 2-D DCT-II. Dimensions that are not multiples of
/// `w` are replicate-padded on the right/bottom.
inline BdctCoefficients bdct(const Tensor& x, std::size_t w) {
  bdct_detail::check_block_size(w, x.height(), x.width());
  const Tensor p = replicate_pad(x, w);
  BdctCoefficients out;
  out.channels = x.channels();
  out.block_size = w;
  out.blocks_y = p.height() / w;
  out.blocks_x = p.width() / w;
  out.height = x.height();
  out.width = x.width();
  out.data.assign(out.channels * out.blocks() * w * w, 0.0);

  const auto m = dct_matrix(w);
  std::vector<double> block(w * w), tmp;
  for (std::size_t c = 0; c < out.channels; ++c) {
    for (std::size_t by = 0; by < out.blocks_y; ++by) {
      for (std::size_t bx = 0; bx < out.blocks_x; ++bx) {
        for (std::size_t i = 0; i < w; ++i) {
          for (std::size_t j = 0; j < w; ++j) block[i * w + j] = p(c, by * w + i, bx * w + j);
        }
        const std::size_t z = by * out.blocks_x + bx;
        bdct_detail::transform_block(m, w, block.data(), &out.at(c, z, 0, 0), false, tmp);
      }
    }
  }
  return out;
}

/// Inverse of bdct; output is cropped back to the source H×W.
inline Tensor ibdct(const BdctCoefficients& coef) {
  const std::size_t w = coef.block_size;
  if (w == 0 || coef.data.size() != coef.channels * coef.blocks() * w * w ||
      coef.blocks_y * w < coef.height || coef.blocks_x * w < coef.width) {
    throw ShapeError("inconsistent BDCT coefficient shape");
  }
  Tensor p(Shape{coef.channels, coef.blocks_y * w, coef.blocks_x * w});
  const auto m = dct_matrix(w);
  std::vector<double> block(w * w), tmp;
  for (std::size_t c = 0; c < coef.channels; ++c) {
    for (std::size_t by = 0; by < coef.blocks_y; ++by) {
      for (std::size_t bx = 0; bx < coef.blocks_x; ++bx) {
        const std::size_t z = by * coef.blocks_x + bx;
        bdct_detail::transform_block(m, w, coef.block(c, z), block.data(), true, tmp);
        for (std::size_t i = 0; i < w; ++i) {
          for (std::size_t j = 0; j < w; ++j) p(c, by * w + i, bx * w + j) = block[i * w + j];
        }
      }
    }
  }
  return crop(p, coef.height, coef.width);
}

inline Tensor ibdct(const BdctCoefficients& coef, std::size_t w) {
  if (w != coef.block_size) throw ShapeError("block size does not match coefficients");
  return ibdct(coef);
}

}  // namespace dpattack
