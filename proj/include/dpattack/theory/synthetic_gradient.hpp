#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "dpattack/core/tensor.hpp"
#include "dpattack/search/partition.hpp"

namespace dpattack {

/// Block-coherent gradient sign: u is constant on each block.
struct SyntheticGradient {
  std::vector<Span> blocks;
  std::vector<int> signs;
  Direction u;
  std::vector<double> magnitude;  // |gradient| per coordinate, all > 0

  std::size_t dim() const { return u.size(); }
};

inline SyntheticGradient gradient_from_blocks(std::vector<Span> blocks, std::vector<int> signs,
                                              std::vector<double> magnitude = {}) {
  SyntheticGradient g;
  const std::size_t d = blocks.empty() ? 0 : blocks.back().end;
  std::vector<std::int8_t> u(d, 1);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (std::size_t i = blocks[k].begin; i < blocks[k].end; ++i) u[i] = signs[k] > 0 ? 1 : -1;
  }
  g.blocks = std::move(blocks);
  g.signs = std::move(signs);
  g.u = Direction(std::move(u));
  g.magnitude = magnitude.empty() ? std::vector<double>(d, 1.0) : std::move(magnitude);
  return g;
}

/// K equal (or random-length, when `random_lengths`) blocks with random signs
/// and per-coordinate magnitudes in [0.5, 1.5].
inline SyntheticGradient make_block_gradient(std::size_t d, std::size_t K, std::mt19937_64& rng,
                                             bool random_lengths = true) {
  std::vector<std::size_t> cuts{0};
  if (random_lengths && K > 1) {
    // K-1 distinct interior cut points, each block at least d/(4K) long.
    const std::size_t min_len = std::max<std::size_t>(1, d / (4 * K));
    std::uniform_int_distribution<std::size_t> pos(0, d - K * min_len);
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k + 1 < K; ++k) free.push_back(pos(rng));
    std::sort(free.begin(), free.end());
    for (std::size_t k = 0; k + 1 < K; ++k) cuts.push_back(free[k] + (k + 1) * min_len);
  } else {
    for (std::size_t k = 1; k < K; ++k) cuts.push_back(k * d / K);
  }
  cuts.push_back(d);
  std::vector<Span> blocks;
  std::vector<int> signs;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t k = 0; k < K; ++k) {
    blocks.push_back({cuts[k], cuts[k + 1]});
    signs.push_back(coin(rng) ? 1 : -1);
  }
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::vector<double> a(d);
  for (double& v : a) v = mag(rng);
  return gradient_from_blocks(std::move(blocks), std::move(signs), std::move(a));
}

enum class InitKind {
  structured,  // runs inside blocks, each run agrees with u w.p. 1/2 + delta
  iid,         // every coordinate agrees with u independently w.p. 1/2 + delta
  single_run,  // all +1
  exact,       // d0 = u
};

struct InitSpec {
  InitKind kind = InitKind::structured;
  double delta = 0.1;
  std::size_t runs_per_block = 2;
};

inline Direction make_initial_direction(const SyntheticGradient& g, const InitSpec& spec,
                                        std::mt19937_64& rng) {
  const std::size_t d = g.dim();
  switch (spec.kind) {
    case InitKind::single_run: return Direction(d);
    case InitKind::exact: return g.u;
    case InitKind::iid: {
      std::bernoulli_distribution agree(0.5 + spec.delta);
      std::vector<std::int8_t> v(d);
      for (std::size_t i = 0; i < d; ++i) v[i] = agree(rng) ? g.u[i] : -g.u[i];
      return Direction(std::move(v));
    }
    case InitKind::structured: break;
  }
  std::bernoulli_distribution agree(0.5 + spec.delta);
  std::vector<std::int8_t> v(d);
  for (std::size_t k = 0; k < g.blocks.size(); ++k) {
    const Span b = g.blocks[k];
    const std::size_t n = std::min(spec.runs_per_block, b.size());
    std::vector<std::size_t> cuts{b.begin};
    if (n > 1) {
      std::vector<std::size_t> pos(b.size() - 1);
      for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = b.begin + 1 + i;
      std::shuffle(pos.begin(), pos.end(), rng);
      pos.resize(n - 1);
      std::sort(pos.begin(), pos.end());
      cuts.insert(cuts.end(), pos.begin(), pos.end());
    }
    cuts.push_back(b.end);
    for (std::size_t r = 0; r + 1 < cuts.size(); ++r) {
      const std::int8_t s = static_cast<std::int8_t>(agree(rng) ? g.signs[k] : -g.signs[k]);
      for (std::size_t i = cuts[r]; i < cuts[r + 1]; ++i) v[i] = s;
    }
  }
  return Direction(std::move(v));
}

}  // namespace dpattack
