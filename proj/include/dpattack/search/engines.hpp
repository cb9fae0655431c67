#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dpattack/search/boundary.hpp"
#include "dpattack/search/pair_rule.hpp"
#include "dpattack/search/partition.hpp"
#include "dpattack/search/prober.hpp"
#include "dpattack/search/state.hpp"

namespace dpattack {

namespace detail {

inline std::vector<std::vector<std::size_t>> span_indices(const std::vector<Span>& cells) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(cells.size());
  for (const Span& c : cells) {
    std::vector<std::size_t> idx(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) idx[i] = c.begin + i;
    out.push_back(std::move(idx));
  }
  return out;
}

inline bool done(const SearchState& st, const SearchOptions& opt) {
  return st.confirmed && st.r <= opt.eps;
}

/// Ray-search refinement of one candidate: accept iff its boundary distance
/// is strictly smaller than the current r.
inline void try_flip(Prober& p, SearchState& st, Direction cand, const SearchOptions& opt,
                     int level) {
  p.set_context("flip", level);
  auto res = p.probe(cand, st.r);
  if (!res.adversarial) return;
  p.set_context("bisect", level);
  auto br = boundary_distance(p, cand, 0.0, st.r, opt.tol, std::move(res.image));
  if (br.r < st.r) st.accept(std::move(cand), br.r, std::move(br.witness), p.queries());
}

/// Establishes g(d_best) by bisection when the starting r is unconfirmed.
inline bool confirm_start(Prober& p, SearchState& st, const SearchOptions& opt) {
  if (st.confirmed) return true;
  p.set_context("bisect", 0);
  try {
    auto br = boundary_distance(p, st.d_best, 0.0, st.r, opt.tol);
    st.r = br.r;
    st.confirmed = true;
    st.witness = std::move(br.witness);
    st.r_history.push_back(st.r);
    return true;
  } catch (const NotAdversarialAtMax&) {
    return false;
  }
}

}  // namespace detail

/// Pairwise dyadic search. An unconfirmed start is first bisected. At level s the index set is halved recursively
/// into cells, adjacent cells form candidate pairs, and the four-case pair
/// rule decides. After the finest level the search restarts at level 1.
inline SearchState adba_run(Prober& p, SearchState st, std::size_t budget,
                            const SearchOptions& opt = {}) {
  ProbeBudget guard(p, budget);
  const std::size_t q0 = p.queries();
  const std::size_t d = st.d_best.size();
  const int depth = std::max(1, ceil_log2(d));
  try {
    if (detail::confirm_start(p, st, opt)) {
      for (int s = 1; !detail::done(st, opt);) {
        st.level = s;
        if (!detail::sweep_level(p, st, detail::span_indices(dyadic_cells(d, s)), s,
                                 detail::PairRule::plain, opt)) {
          break;
        }
        s = s >= depth ? 1 : s + 1;
      }
    }
  } catch (const BudgetExhausted&) {
    st.budget_exhausted = true;
  }
  st.queries += p.queries() - q0;
  return st;
}

/// Pattern-driven search. Groups are unions of sign-consistent runs of the
/// starting direction; when it has more than one run, solitary successes are
/// compared against the history buffer. When the run tree is exhausted, every
/// run is split at its midpoint and the search continues one level deeper;
/// once runs are single pixels the search restarts at level 1.
inline SearchState pdo_run(Prober& p, SearchState st, std::size_t budget,
                           const SearchOptions& opt = {}) {
  ProbeBudget guard(p, budget);
  const std::size_t q0 = p.queries();
  RunPartition part = build_run_partition(st.d_best);
  PatternTree tree{&part};
  // A single-run start carries no pattern to remember; PDO is then ADBA.
  const auto rule = part.count() > 1 ? detail::PairRule::history : detail::PairRule::plain;
  try {
    for (int s = 1; !detail::done(st, opt);) {
      if (s > tree.depth()) {
        if (part.splittable()) {
          part.split_runs();
        } else {
          s = 1;
        }
      }
      st.level = s;
      if (!detail::sweep_level(p, st, tree.group_indices(s), s, rule, opt)) {
        break;
      }
      ++s;
    }
  } catch (const BudgetExhausted&) {
    st.budget_exhausted = true;
  }
  st.queries += p.queries() - q0;
  return st;
}

/// Hierarchical ray search: flip dyadic cells one at a time and keep a flip
/// when its boundary distance is strictly smaller.
inline SearchState hrays_run(Prober& p, SearchState st, std::size_t budget,
                             const SearchOptions& opt = {}) {
  ProbeBudget guard(p, budget);
  const std::size_t q0 = p.queries();
  const std::size_t d = st.d_best.size();
  const int depth = std::max(1, ceil_log2(d));
  try {
    if (detail::confirm_start(p, st, opt)) {
      for (int s = 1; !detail::done(st, opt);) {
        st.level = s;
        for (const Span& c : dyadic_cells(d, s)) {
          if (detail::done(st, opt)) break;
          detail::try_flip(p, st, flipped(st.d_best, c.begin, c.end), opt, s);
        }
        s = s >= depth ? 1 : s + 1;
      }
    }
  } catch (const BudgetExhausted&) {
    st.budget_exhausted = true;
  }
  st.queries += p.queries() - q0;
  return st;
}

/// Naive ray search: single-coordinate flips in index order, cycling.
inline SearchState nrays_run(Prober& p, SearchState st, std::size_t budget,
                             const SearchOptions& opt = {}) {
  ProbeBudget guard(p, budget);
  const std::size_t q0 = p.queries();
  const std::size_t d = st.d_best.size();
  try {
    if (detail::confirm_start(p, st, opt)) {
      for (std::size_t i = 0; !detail::done(st, opt); i = (i + 1) % d) {
        st.level = 0;
        detail::try_flip(p, st, flipped(st.d_best, i, i + 1), opt, 0);
      }
    }
  } catch (const BudgetExhausted&) {
    st.budget_exhausted = true;
  }
  st.queries += p.queries() - q0;
  return st;
}

}  // namespace dpattack
