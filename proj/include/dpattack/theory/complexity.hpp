#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dpattack/search/partition.hpp"
#include "dpattack/theory/synthetic_gradient.hpp"

namespace dpattack {

/// Node-expansion counts for recovering every block's sign.
struct ComplexityReport {
  std::size_t t_pat = 0;
  std::size_t t_dyad = 0;
  std::vector<std::size_t> gamma;       // runs of d0 intersecting each block
  std::vector<double> log_ratio;        // log2(d / |B_k|)
  std::vector<std::size_t> dyad_per_block;
  std::size_t sum_gamma = 0;
  double sum_log_ratio = 0.0;
};

namespace complexity_detail {

// Expansions needed to cover `block` by dyadic cells lying inside it.
inline std::size_t dyadic_expansions(Span cell, Span block) {
  if (cell.end <= block.begin || cell.begin >= block.end) return 0;
  if (cell.begin >= block.begin && cell.end <= block.end) return 0;
  if (cell.size() < 2) return 0;
  const std::size_t mid = cell.begin + (cell.size() + 1) / 2;
  return 1 + dyadic_expansions({cell.begin, mid}, block) + dyadic_expansions({mid, cell.end}, block);
}

}  // namespace complexity_detail

/// Dyadic tree: a block costs the internal nodes expanded before it is
/// covered by cells that lie inside it (log2(d/|B|) for an aligned block).
/// Pattern tree: every run of d0 that meets the block is one leaf
/// evaluation, so a block costs gamma_k.
inline ComplexityReport recovery_complexity(const SyntheticGradient& g, const Direction& d0) {
  if (d0.size() != g.dim()) throw ShapeError("d0 and gradient differ in dimension");
  const RunPartition part = build_run_partition(d0);
  // Original-index extent of every run; runs are contiguous by construction.
  std::vector<Span> extent;
  for (const Span& r : part.runs) {
    extent.push_back({part.gamma[r.begin], part.gamma[r.end - 1] + 1});
  }
  ComplexityReport out;
  const double d = static_cast<double>(g.dim());
  for (const Span& b : g.blocks) {
    std::size_t gamma = 0;
    for (const Span& e : extent) gamma += e.begin < b.end && b.begin < e.end;
    const std::size_t dy = complexity_detail::dyadic_expansions({0, g.dim()}, b);
    out.gamma.push_back(gamma);
    out.dyad_per_block.push_back(dy);
    out.log_ratio.push_back(std::log2(d / static_cast<double>(b.size())));
    out.t_pat += gamma;
    out.t_dyad += dy;
    out.sum_gamma += gamma;
    out.sum_log_ratio += out.log_ratio.back();
  }
  return out;
}

/// K equal blocks; d0 has `gamma` runs per block, alternating in sign, so no
/// run crosses a block boundary.
inline std::pair<SyntheticGradient, Direction> aligned_instance(std::size_t d, std::size_t K,
                                                                std::size_t gamma) {
  std::vector<Span> blocks;
  std::vector<int> signs;
  for (std::size_t k = 0; k < K; ++k) {
    blocks.push_back({k * d / K, (k + 1) * d / K});
    signs.push_back(k % 2 ? -1 : 1);
  }
  SyntheticGradient g = gradient_from_blocks(blocks, signs);
  std::vector<std::int8_t> v(d);
  int s = 1;
  for (const Span& b : blocks) {
    for (std::size_t r = 0; r < gamma; ++r) {
      const std::size_t lo = b.begin + r * b.size() / gamma;
      const std::size_t hi = b.begin + (r + 1) * b.size() / gamma;
      for (std::size_t i = lo; i < hi; ++i) v[i] = static_cast<std::int8_t>(s);
      s = -s;
    }
  }
  return {std::move(g), Direction(std::move(v))};
}

/// K equal blocks; d0 alternates sign every `run_len` coordinates starting
/// at offset run_len/2, so its runs straddle block boundaries.
inline std::pair<SyntheticGradient, Direction> straddling_instance(std::size_t d, std::size_t K,
                                                                   std::size_t run_len) {
  std::vector<Span> blocks;
  std::vector<int> signs;
  for (std::size_t k = 0; k < K; ++k) {
    blocks.push_back({k * d / K, (k + 1) * d / K});
    signs.push_back(k % 2 ? -1 : 1);
  }
  SyntheticGradient g = gradient_from_blocks(blocks, signs);
  std::vector<std::int8_t> v(d);
  const std::size_t off = run_len / 2;
  for (std::size_t i = 0; i < d; ++i) v[i] = ((i + off) / run_len) % 2 ? -1 : 1;
  return {std::move(g), Direction(std::move(v))};
}

}  // namespace dpattack
