#pragma once

#include "dpattack/core/tensor.hpp"

namespace dpattack {

inline std::size_t round_up(std::size_t n, std::size_t multiple) {
  return (n + multiple - 1) / multiple * multiple;
}

/// Replicates the last row/column so that H and W become multiples of `m`.
inline Tensor replicate_pad(const Tensor& t, std::size_t m) {
  const std::size_t hp = round_up(t.height(), m);
  const std::size_t wp = round_up(t.width(), m);
  if (hp == t.height() && wp == t.width()) return t;
  Tensor out(Shape{t.channels(), hp, wp});
  for (std::size_t c = 0; c < t.channels(); ++c) {
    for (std::size_t i = 0; i < hp; ++i) {
      const std::size_t si = std::min(i, t.height() - 1);
      for (std::size_t j = 0; j < wp; ++j) {
        out(c, i, j) = t(c, si, std::min(j, t.width() - 1));
      }
    }
  }
  return out;
}

/// Keeps the top-left H×W window.
inline Tensor crop(const Tensor& t, std::size_t h, std::size_t w) {
  if (h > t.height() || w > t.width()) throw ShapeError("crop larger than source");
  if (h == t.height() && w == t.width()) return t;
  Tensor out(Shape{t.channels(), h, w});
  for (std::size_t c = 0; c < t.channels(); ++c) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) out(c, i, j) = t(c, i, j);
    }
  }
  return out;
}

}  // namespace dpattack
