#pragma once

// Frequency-sensitivity profiling needs the victim's loss, so it is kept
// apart from the hard-label attack path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dpattack/core/color.hpp"
#include "dpattack/core/tensor.hpp"
#include "dpattack/ddm/freq_stats.hpp"
#include "dpattack/oracle/builtin_model.hpp"
#include "dpattack/transforms/bdct.hpp"
#include "dpattack/transforms/padding.hpp"

namespace dpattack {

struct BfsOptions {
  std::size_t block_size = 8;
  double eps = 0.05;
  std::size_t samples = 8;
  Norm norm = Norm::linf;
  StatsSpace space = StatsSpace::ycbcr;
  std::size_t calibration_draws = 32;
  std::uint64_t seed = 0;
};

/// Mean cross-entropy per band (C×w×w) under band-limited noise.
struct BfsProfile {
  std::size_t channels = 0;
  std::size_t block_size = 0;
  std::vector<double> sensitivity;
  std::vector<std::size_t> samples;
  double epsilon = 0.0;
  double sigma_max = 0.0;

  double at(std::size_t c, std::size_t i, std::size_t j) const {
    return sensitivity[(c * block_size + i) * block_size + j];
  }
  /// Sensitivities of one channel in row-major band order.
  std::vector<double> channel(std::size_t c) const {
    const std::size_t n = block_size * block_size;
    return {sensitivity.begin() + c * n, sensitivity.begin() + (c + 1) * n};
  }
};

namespace bfs_detail {

/// Pixel-domain image of unit-variance noise placed in band (c,i,j) of every
/// block, scaled by sigma.
inline Tensor band_noise(const Shape& shape, std::size_t w, std::size_t c, std::size_t i,
                         std::size_t j, double sigma, StatsSpace space, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, sigma);
  BdctCoefficients coef;
  coef.channels = shape.channels;
  coef.block_size = w;
  coef.blocks_y = round_up(shape.height, w) / w;
  coef.blocks_x = round_up(shape.width, w) / w;
  coef.height = shape.height;
  coef.width = shape.width;
  coef.data.assign(coef.channels * coef.blocks() * w * w, 0.0);
  for (std::size_t z = 0; z < coef.blocks(); ++z) coef.at(c, z, i, j) = gauss(rng);
  Tensor delta = ibdct(coef);
  if (shape.channels == 3 && space == StatsSpace::ycbcr) delta = ycbcr_delta_to_rgb(delta);
  return delta;
}

inline void project(Tensor& delta, double eps, Norm norm) {
  if (norm == Norm::linf) {
    for (double& v : delta.data()) v = std::clamp(v, -eps, eps);
    return;
  }
  const double n = dpattack::norm(delta.data(), Norm::l2);
  if (n > eps) {
    for (double& v : delta.data()) v *= eps / n;
  }
}

}  // namespace bfs_detail

/// Noise scale whose band-limited perturbations have median pixel-domain
/// norm eps. Norms are homogeneous in sigma, so the median of unit-sigma
/// draws fixes the scale exactly.
inline double calibrate_sigma_max(const Shape& shape, const BfsOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0xca11b7a7eULL);
  const std::size_t w = opt.block_size;
  std::uniform_int_distribution<std::size_t> band(0, shape.channels * w * w - 1);
  std::vector<double> norms;
  for (std::size_t k = 0; k < opt.calibration_draws; ++k) {
    const std::size_t b = band(rng);
    const Tensor n = bfs_detail::band_noise(shape, w, b / (w * w), (b / w) % w, b % w, 1.0,
                                            opt.space, rng);
    norms.push_back(norm(n.data(), opt.norm));
  }
  std::sort(norms.begin(), norms.end());
  const std::size_t m = norms.size();
  const double median = m % 2 ? norms[m / 2] : 0.5 * (norms[m / 2 - 1] + norms[m / 2]);
  return median > 0.0 ? opt.eps / median : 0.0;
}

inline BfsProfile bfs_profile(const BuiltinModel& model, const std::vector<ImageTensor>& images,
                              const std::vector<Label>& labels, const BfsOptions& opt) {
  if (images.empty() || images.size() != labels.size()) {
    throw ShapeError("bfs needs matching, non-empty image and label lists");
  }
  const Shape shape = images.front().shape();
  const std::size_t w = opt.block_size;
  bdct_detail::check_block_size(w, shape.height, shape.width);
  BfsProfile out;
  out.channels = shape.channels;
  out.block_size = w;
  out.epsilon = opt.eps;
  out.sigma_max = calibrate_sigma_max(shape, opt);
  const std::size_t bands = shape.channels * w * w;
  out.sensitivity.assign(bands, 0.0);
  out.samples.assign(bands, 0);

  for (std::size_t b = 0; b < bands; ++b) {
    const std::size_t c = b / (w * w), i = (b / w) % w, j = b % w;
    std::mt19937_64 rng(opt.seed + 0x9e3779b97f4a7c15ULL * (b + 1));
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < std::max<std::size_t>(opt.samples, 1); ++s) {
      Tensor delta = bfs_detail::band_noise(shape, w, c, i, j, out.sigma_max, opt.space, rng);
      bfs_detail::project(delta, opt.eps, opt.norm);
      for (std::size_t n = 0; n < images.size(); ++n) {
        Tensor xp = images[n].tensor();
        for (std::size_t k = 0; k < xp.size(); ++k) xp[k] = std::clamp(xp[k] + delta[k], 0.0, 1.0);
        total += model.loss(xp.data(), labels[n]);
        ++count;
      }
    }
    out.sensitivity[b] = total / static_cast<double>(count);
    out.samples[b] = std::max<std::size_t>(opt.samples, 1);
  }
  return out;
}

inline BfsProfile bfs_profile(const Oracle& oracle, const std::vector<ImageTensor>& images,
                              const std::vector<Label>& labels, const BfsOptions& opt) {
  const auto* b = dynamic_cast<const BuiltinOracle*>(&oracle);
  if (b == nullptr) {
    throw CapabilityError("frequency profiling requires a loss-exposing builtin backend, got " +
                          oracle.backend());
  }
  return bfs_profile(b->model(), images, labels, opt);
}

}  // namespace dpattack
