#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "dpattack/core/tensor.hpp"

namespace dpattack {

/// Half-open range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

inline int ceil_log2(std::size_t n) {
  int l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

/// Recursive halving of [0, n) to depth `level`. A cell of size >= 2 splits
/// into [a, a + ceil(len/2)) and the remainder; singletons are kept as is.
/// Level s yields min(2^s, n) cells with sizes floor/ceil(n / 2^s).
inline std::vector<Span> dyadic_cells(std::size_t n, int level) {
  std::vector<Span> cells{{0, n}};
  for (int s = 0; s < level; ++s) {
    std::vector<Span> next;
    next.reserve(cells.size() * 2);
    for (const Span& c : cells) {
      if (c.size() >= 2) {
        const std::size_t mid = c.begin + (c.size() + 1) / 2;
        next.push_back({c.begin, mid});
        next.push_back({mid, c.end});
      } else {
        next.push_back(c);
      }
    }
    cells = std::move(next);
  }
  return cells;
}

/// Sign-consistent runs of d0 in sorted order.
///
/// gamma is the stable sort of indices by d0 value (-1 before +1). A run is a
/// maximal stretch of gamma whose entries share a sign and whose original
/// indices are consecutive, so every run is a spatially contiguous
/// equal-sign segment of d0.
struct RunPartition {
  std::vector<std::size_t> gamma;
  std::vector<Span> runs;  // ranges over positions of gamma

  std::size_t count() const { return runs.size(); }
  std::size_t dim() const { return gamma.size(); }

  /// Original indices covered by runs [first, last).
  std::vector<std::size_t> indices(std::size_t first, std::size_t last) const {
    std::vector<std::size_t> out;
    for (std::size_t k = first; k < last; ++k) {
      out.insert(out.end(), gamma.begin() + runs[k].begin, gamma.begin() + runs[k].end);
    }
    return out;
  }

  bool splittable() const {
    return std::any_of(runs.begin(), runs.end(), [](const Span& r) { return r.size() > 1; });
  }

  /// Splits every run of length >= 2 at its midpoint (first half rounded up).
  void split_runs() {
    std::vector<Span> next;
    next.reserve(runs.size() * 2);
    for (const Span& r : runs) {
      if (r.size() >= 2) {
        const std::size_t mid = r.begin + (r.size() + 1) / 2;
        next.push_back({r.begin, mid});
        next.push_back({mid, r.end});
      } else {
        next.push_back(r);
      }
    }
    runs = std::move(next);
  }
};

inline RunPartition build_run_partition(const Direction& d0) {
  RunPartition p;
  const std::size_t d = d0.size();
  p.gamma.resize(d);
  std::iota(p.gamma.begin(), p.gamma.end(), std::size_t{0});
  std::stable_sort(p.gamma.begin(), p.gamma.end(),
                   [&](std::size_t a, std::size_t b) { return d0[a] < d0[b]; });
  std::size_t start = 0;
  for (std::size_t k = 1; k <= d; ++k) {
    const bool boundary = k == d || d0[p.gamma[k]] != d0[p.gamma[k - 1]] ||
                          p.gamma[k] != p.gamma[k - 1] + 1;
    if (boundary) {
      p.runs.push_back({start, k});
      start = k;
    }
  }
  return p;
}

/// Level-s grouping of runs: recursive halving by run count. Groups are
/// contiguous in gamma order and never split a run.
struct PatternTree {
  const RunPartition* partition = nullptr;

  int depth() const { return ceil_log2(partition->count()); }

  /// Groups at level s as ranges over run indices.
  std::vector<Span> groups(int s) const { return dyadic_cells(partition->count(), s); }

  std::vector<std::vector<std::size_t>> group_indices(int s) const {
    std::vector<std::vector<std::size_t>> out;
    for (const Span& g : groups(s)) out.push_back(partition->indices(g.begin, g.end));
    return out;
  }
};

}  // namespace dpattack
