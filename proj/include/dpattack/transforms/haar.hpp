#pragma once

#include <cmath>
#include <vector>

#include "dpattack/core/tensor.hpp"

namespace dpattack {

/// Detail subbands produced by one level of the 2-D Haar transform.
struct HaarDetail {
  Tensor lh;  // horizontal low, vertical high
  Tensor hl;  // horizontal high, vertical low
  Tensor hh;
};

/// Multilevel orthonormal Haar decomposition. `details[0]` is the finest
/// level; `low` is the C×H/2^levels×W/2^levels approximation.
struct DwtDecomposition {
  Tensor low;
  std::vector<HaarDetail> details;
  std::size_t levels = 0;
};

namespace haar_detail {

inline constexpr double kHalf = 0.5;  // (1/sqrt2)^2 for a 2×2 orthonormal step

inline void split(const Tensor& x, Tensor& ll, HaarDetail& det) {
  const Shape s{x.channels(), x.height() / 2, x.width() / 2};
  ll = Tensor(s);
  det = HaarDetail{Tensor(s), Tensor(s), Tensor(s)};
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t i = 0; i < s.height; ++i) {
      for (std::size_t j = 0; j < s.width; ++j) {
        const double a = x(c, 2 * i, 2 * j), b = x(c, 2 * i, 2 * j + 1);
        const double p = x(c, 2 * i + 1, 2 * j), q = x(c, 2 * i + 1, 2 * j + 1);
        ll(c, i, j) = kHalf * (a + b + p + q);
        det.lh(c, i, j) = kHalf * (a + b - p - q);
        det.hl(c, i, j) = kHalf * (a - b + p - q);
        det.hh(c, i, j) = kHalf * (a - b - p + q);
      }
    }
  }
}

inline Tensor merge(const Tensor& ll, const HaarDetail* det) {
  const Shape s = ll.shape();
  Tensor x(Shape{s.channels, s.height * 2, s.width * 2});
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t i = 0; i < s.height; ++i) {
      for (std::size_t j = 0; j < s.width; ++j) {
        const double L = ll(c, i, j);
        const double V = det ? det->lh(c, i, j) : 0.0;
        const double H = det ? det->hl(c, i, j) : 0.0;
        const double D = det ? det->hh(c, i, j) : 0.0;
        x(c, 2 * i, 2 * j) = kHalf * (L + V + H + D);
        x(c, 2 * i, 2 * j + 1) = kHalf * (L + V - H - D);
        x(c, 2 * i + 1, 2 * j) = kHalf * (L - V + H - D);
        x(c, 2 * i + 1, 2 * j + 1) = kHalf * (L - V - H + D);
      }
    }
  }
  return x;
}

}  // namespace haar_detail

inline DwtDecomposition dwt(const Tensor& x, std::size_t levels) {
  const std::size_t f = std::size_t{1} << levels;
  if (levels > 0 && (x.height() % f != 0 || x.width() % f != 0)) {
    throw LevelError("image " + to_string(x.shape()) + " not divisible by 2^" +
                     std::to_string(levels));
  }
  DwtDecomposition out;
  out.levels = levels;
  out.low = x;
  for (std::size_t l = 0; l < levels; ++l) {
    Tensor ll;
    HaarDetail det;
    haar_detail::split(out.low, ll, det);
    out.low = std::move(ll);
    out.details.push_back(std::move(det));
  }
  return out;
}

/// Reconstructs from `low` and `details`; an empty `details` vector means all
/// detail bands are zero (pure low-pass projection).
inline Tensor idwt(const Tensor& low, const std::vector<HaarDetail>& details,
                   std::size_t levels) {
  if (!details.empty() && details.size() != levels) {
    throw ShapeError("detail band count does not match level count");
  }
  Tensor x = low;
  for (std::size_t l = levels; l-- > 0;) {
    const HaarDetail* det = details.empty() ? nullptr : &details[l];
    if (det && (det->lh.shape() != x.shape() || det->hl.shape() != x.shape() ||
                det->hh.shape() != x.shape())) {
      throw ShapeError("detail band shape mismatch at level " + std::to_string(l));
    }
    x = haar_detail::merge(x, det);
  }
  return x;
}

inline Tensor idwt(const DwtDecomposition& dec) {
  return idwt(dec.low, dec.details, dec.levels);
}

/// IDWT(DWT_LL(x), 0): projection onto the level-`levels` Haar low band.
inline Tensor lowpass(const Tensor& x, std::size_t levels) {
  return idwt(dwt(x, levels).low, {}, levels);
}

}  // namespace dpattack
