#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dpattack/core/color.hpp"
#include "dpattack/core/tensor.hpp"
#include "dpattack/transforms/bdct.hpp"

namespace dpattack {

/// Colour space in which block statistics and noise live. Ignored for
/// single-channel images.
enum class StatsSpace { ycbcr, rgb };

inline StatsSpace parse_stats_space(const std::string& s) {
  if (s == "ycbcr") return StatsSpace::ycbcr;
  if (s == "rgb") return StatsSpace::rgb;
  throw FormatError("unknown colour space '" + s + "'");
}

/// Per-band mean and population standard deviation of BDCT coefficients
/// across blocks, laid out C×w×w.
struct FrequencyStats {
  std::size_t channels = 0;
  std::size_t block_size = 0;
  StatsSpace space = StatsSpace::ycbcr;
  std::vector<double> sigma;
  std::vector<double> mu;

  double sigma_at(std::size_t c, std::size_t i, std::size_t j) const {
    return sigma[(c * block_size + i) * block_size + j];
  }
  double mu_at(std::size_t c, std::size_t i, std::size_t j) const {
    return mu[(c * block_size + i) * block_size + j];
  }
};

inline FrequencyStats compute_freq_stats(const BdctCoefficients& coef) {
  const std::size_t w = coef.block_size;
  const std::size_t Z = coef.blocks();
  FrequencyStats s;
  s.channels = coef.channels;
  s.block_size = w;
  s.sigma.assign(coef.channels * w * w, 0.0);
  s.mu.assign(coef.channels * w * w, 0.0);
  for (std::size_t c = 0; c < coef.channels; ++c) {
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        double mean = 0.0;
        for (std::size_t z = 0; z < Z; ++z) mean += coef.at(c, z, i, j);
        mean /= static_cast<double>(Z);
        double var = 0.0;
        for (std::size_t z = 0; z < Z; ++z) {
          const double e = coef.at(c, z, i, j) - mean;
          var += e * e;
        }
        const std::size_t k = (c * w + i) * w + j;
        s.mu[k] = mean;
        s.sigma[k] = std::sqrt(var / static_cast<double>(Z));
      }
    }
  }
  return s;
}

/// Tensor in the statistics colour space (YCbCr for 3-channel input unless
/// `space` is rgb).
inline Tensor to_stats_space(const ImageTensor& x, StatsSpace space) {
  if (x.channels() == 3 && space == StatsSpace::ycbcr) return rgb_to_ycbcr(x.tensor());
  return x.tensor();
}

inline FrequencyStats compute_freq_stats(const ImageTensor& x, std::size_t w,
                                         StatsSpace space = StatsSpace::ycbcr) {
  FrequencyStats s = compute_freq_stats(bdct(to_stats_space(x, space), w));
  s.space = space;
  return s;
}

}  // namespace dpattack
