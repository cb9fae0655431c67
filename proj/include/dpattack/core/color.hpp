#pragma once

#include <array>

#include "dpattack/core/tensor.hpp"

namespace dpattack {

// ITU-R BT.601 full-range (JPEG) RGB <-> YCbCr on [0,1] pixels. Chroma is
// centred on 0.5. No subsampling.
namespace color_detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr Mat3 kRgbToYcc = {{{0.299, 0.587, 0.114},
                                    {-0.168736, -0.331264, 0.5},
                                    {0.5, -0.418688, -0.081312}}};
inline constexpr std::array<double, 3> kYccOffset = {0.0, 0.5, 0.5};

inline constexpr Mat3 invert(const Mat3& m) {
  const double a = m[0][0], b = m[0][1], c = m[0][2];
  const double d = m[1][0], e = m[1][1], f = m[1][2];
  const double g = m[2][0], h = m[2][1], i = m[2][2];
  const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  return {{{(e * i - f * h) / det, (c * h - b * i) / det, (b * f - c * e) / det},
           {(f * g - d * i) / det, (a * i - c * g) / det, (c * d - a * f) / det},
           {(d * h - e * g) / det, (b * g - a * h) / det, (a * e - b * d) / det}}};
}

inline constexpr Mat3 kYccToRgb = invert(kRgbToYcc);

inline Tensor apply(const Tensor& in, const Mat3& m,
                    const std::array<double, 3>& pre,
                    const std::array<double, 3>& post) {
  if (in.channels() != 3) {
    throw ChannelMismatch("colour conversion needs 3 channels, got " +
                          std::to_string(in.channels()));
  }
  Tensor out(in.shape());
  const std::size_t n = in.shape().plane();
  const auto src = in.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < n; ++k) {
    const double v0 = src[k] - pre[0];
    const double v1 = src[n + k] - pre[1];
    const double v2 = src[2 * n + k] - pre[2];
    for (std::size_t c = 0; c < 3; ++c) {
      dst[c * n + k] = m[c][0] * v0 + m[c][1] * v1 + m[c][2] * v2 + post[c];
    }
  }
  return out;
}

}  // namespace color_detail

inline Tensor rgb_to_ycbcr(const Tensor& rgb) {
  return color_detail::apply(rgb, color_detail::kRgbToYcc, {0, 0, 0},
                             color_detail::kYccOffset);
}

inline Tensor ycbcr_to_rgb(const Tensor& ycc) {
  return color_detail::apply(ycc, color_detail::kYccToRgb,
                             color_detail::kYccOffset, {0, 0, 0});
}

inline ImageTensor rgb_to_ycbcr(const ImageTensor& img) {
  return ImageTensor::clipped(rgb_to_ycbcr(img.tensor()));
}

inline ImageTensor ycbcr_to_rgb(const ImageTensor& img) {
  return ImageTensor::clipped(ycbcr_to_rgb(img.tensor()));
}

/// Maps a YCbCr-domain difference back to an RGB-domain difference (the
/// linear part of the inverse transform; offsets cancel).
inline Tensor ycbcr_delta_to_rgb(const Tensor& delta) {
  return color_detail::apply(delta, color_detail::kYccToRgb, {0, 0, 0}, {0, 0, 0});
}

}  // namespace dpattack
