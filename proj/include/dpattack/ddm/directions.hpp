#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "dpattack/core/color.hpp"
#include "dpattack/core/tensor.hpp"
#include "dpattack/ddm/freq_stats.hpp"
#include "dpattack/transforms/bdct.hpp"
#include "dpattack/transforms/haar.hpp"
#include "dpattack/transforms/padding.hpp"

namespace dpattack {

enum class BaseDirection { dn, db, dr };

inline BaseDirection parse_base_direction(const std::string& s) {
  if (s == "dn") return BaseDirection::dn;
  if (s == "db") return BaseDirection::db;
  if (s == "dr") return BaseDirection::dr;
  throw FormatError("unknown base direction '" + s + "'");
}

inline const char* base_name(BaseDirection b) {
  switch (b) {
    case BaseDirection::dn: return "dn";
    case BaseDirection::db: return "db";
    case BaseDirection::dr: return "dr";
  }
  return "?";
}

/// Pixel-domain perturbation IBDCT(noise) with noise[c,z,i,j] ~ N(0, sigma_cij^2),
/// mapped back to RGB when the statistics live in YCbCr.
inline Tensor frequency_noise(const Shape& shape, const FrequencyStats& stats,
                              std::uint64_t seed) {
  if (stats.channels != shape.channels) {
    throw ChannelMismatch("frequency statistics have " + std::to_string(stats.channels) +
                          " channels, image has " + std::to_string(shape.channels));
  }
  const std::size_t w = stats.block_size;
  BdctCoefficients coef;
  coef.channels = shape.channels;
  coef.block_size = w;
  coef.blocks_y = round_up(shape.height, w) / w;
  coef.blocks_x = round_up(shape.width, w) / w;
  coef.height = shape.height;
  coef.width = shape.width;
  coef.data.assign(coef.channels * coef.blocks() * w * w, 0.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t c = 0; c < coef.channels; ++c) {
    for (std::size_t z = 0; z < coef.blocks(); ++z) {
      for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          coef.at(c, z, i, j) = stats.sigma_at(c, i, j) * gauss(rng);
        }
      }
    }
  }
  Tensor delta = ibdct(coef);
  if (shape.channels == 3 && stats.space == StatsSpace::ycbcr) delta = ycbcr_delta_to_rgb(delta);
  return delta;
}

/// Frequency-prior direction: sign of IBDCT(I + noise) - x. By linearity the
/// clean coefficients cancel, leaving the sign of the noise image.
inline Direction sample_dn(const ImageTensor& x, const FrequencyStats& stats,
                           std::uint64_t seed) {
  return sign_with_one(frequency_noise(x.shape(), stats, seed).data());
}

/// Block pattern: entry i (0-based) is (-1)^floor(i / n_hat).
inline Direction make_db(std::size_t d, std::size_t n_hat) {
  if (n_hat == 0) throw ShapeError("segment length must be positive");
  std::vector<std::int8_t> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = (i / n_hat) % 2 == 0 ? 1 : -1;
  return Direction(std::move(v));
}

/// Image of h×h squares, each filled with an independent uniform colour on
/// the 8-bit grid. Squares overhanging the border are cropped.
inline Tensor random_squares(const Shape& shape, std::size_t h, std::uint64_t seed) {
  if (h == 0) throw ShapeError("square side must be positive");
  const std::size_t ky = (shape.height + h - 1) / h;
  const std::size_t kx = (shape.width + h - 1) / h;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(0, 255);
  std::vector<double> colour(shape.channels * ky * kx);
  for (double& v : colour) v = level(rng) / 255.0;
  Tensor out(shape);
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (std::size_t i = 0; i < shape.height; ++i) {
      for (std::size_t j = 0; j < shape.width; ++j) {
        out(c, i, j) = colour[(c * ky + i / h) * kx + j / h];
      }
    }
  }
  return out;
}

inline Direction make_dr(const ImageTensor& x, std::size_t h, std::uint64_t seed) {
  return sign_with_one(difference(random_squares(x.shape(), h, seed), x.tensor()));
}

/// Base direction generated directly at the resolution of x.
inline Direction base_direction(const ImageTensor& x, BaseDirection base,
                                std::size_t pattern, std::uint64_t seed,
                                StatsSpace space = StatsSpace::ycbcr) {
  pattern = std::max<std::size_t>(pattern, 1);
  switch (base) {
    case BaseDirection::dn: {
      const std::size_t w = std::min({pattern, x.height(), x.width()});
      return sample_dn(x, compute_freq_stats(x, w, space), seed);
    }
    case BaseDirection::db:
      return make_db(x.size(), pattern);
    case BaseDirection::dr:
      return make_dr(x, pattern, seed);
  }
  throw FormatError("unknown base direction");
}

/// Low-frequency image x'_a. With dl = floor(log2 pattern): generate the base
/// direction on the 2^dl-downsampled image with pattern size pattern/2^dl,
/// add it to the Haar LL band and reconstruct with zero detail bands.
/// Returns nullopt when dl = 0 (no wrapping).
inline std::optional<Tensor> lowfreq_image(const ImageTensor& x, BaseDirection base,
                                           std::size_t pattern, std::uint64_t seed,
                                           StatsSpace space = StatsSpace::ycbcr) {
  if (pattern == 0) throw ShapeError("pattern size must be positive");
  std::size_t dl = 0;
  while ((std::size_t{2} << dl) <= pattern) ++dl;
  const std::size_t f = std::size_t{1} << dl;
  if (dl == 0) return std::nullopt;
  if (f > std::min(x.height(), x.width())) {
    throw LevelError("pattern size " + std::to_string(pattern) + " too large for " +
                     to_string(x.shape()));
  }
  const Tensor xp = replicate_pad(x.tensor(), f);
  DwtDecomposition dec = dwt(xp, dl);

  // LL at level dl is 2^dl times the block mean.
  Tensor mean = dec.low;
  for (double& v : mean.data()) v /= static_cast<double>(f);
  const ImageTensor small = ImageTensor::clipped(std::move(mean));
  const Direction dhat = base_direction(small, base, std::max<std::size_t>(pattern / f, 1),
                                        seed, space);

  Tensor low = dec.low;
  for (std::size_t k = 0; k < low.size(); ++k) low[k] += dhat[k];
  return crop(idwt(low, {}, dl), x.height(), x.width());
}

/// Low-frequency wrapper: sign of x'_a - x, or the base direction itself
/// when dl = 0.
inline Direction lowfreq_wrap(const ImageTensor& x, BaseDirection base, std::size_t pattern,
                              std::uint64_t seed, StatsSpace space = StatsSpace::ycbcr) {
  const auto rec = lowfreq_image(x, base, pattern, seed, space);
  if (!rec) return base_direction(x, base, pattern, seed, space);
  return sign_with_one(difference(*rec, x.tensor()));
}

}  // namespace dpattack
