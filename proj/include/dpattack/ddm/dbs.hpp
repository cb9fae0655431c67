#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dpattack/search/prober.hpp"

namespace dpattack {

struct DbsCandidate {
  std::size_t block_size = 0;
  Direction direction;
};

struct DbsResult {
  std::size_t index = 0;  // position in the candidate list
  std::size_t block_size = 0;
  Direction direction;
  double r = 1.0;          // final upper bound h
  bool confirmed = false;  // chosen direction was adversarial at r
  ImageTensor witness;
  bool partial = false;  // stopped by q_max or the query budget
  std::size_t queries = 0;
  std::vector<std::size_t> survivors;
};

inline std::size_t default_dbs_queries(std::size_t candidates, std::size_t k_max) {
  return candidates * k_max + 4;
}

/// Dynamic block-size selection: shared bisection on r over [0, r_max].
/// Every surviving candidate is queried at each midpoint; successes become
/// the new survivor set and lower h, otherwise l rises. A seeded uniform
/// pick among the survivors is returned together with h.
inline DbsResult dbs(Prober& p, const std::vector<DbsCandidate>& cands, std::size_t q_max,
                     std::size_t k_max = 5, std::uint64_t seed = 0) {
  if (cands.empty()) throw ShapeError("dbs needs at least one candidate");
  const std::size_t q0 = p.queries();
  std::vector<std::size_t> alive(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) alive[i] = i;
  std::vector<ImageTensor> witness(cands.size());
  double lo = 0.0, hi = p.r_max();
  bool confirmed = false, partial = false;
  p.set_context("dbs", 0);

  try {
    for (std::size_t k = 0; k < k_max && !partial; ++k) {
      const double mid = 0.5 * (lo + hi);
      std::vector<std::size_t> hits;
      for (std::size_t i : alive) {
        if (p.queries() - q0 >= q_max) {
          partial = true;
          break;
        }
        auto res = p.probe(cands[i].direction, mid);
        if (res.adversarial) {
          hits.push_back(i);
          witness[i] = std::move(res.image);
        }
      }
      if (partial && hits.empty()) break;
      if (!hits.empty()) {
        alive = std::move(hits);
        hi = mid;
        confirmed = true;
      } else {
        lo = mid;
      }
    }
  } catch (const BudgetExhausted&) {
    partial = true;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, alive.size() - 1);
  const std::size_t chosen = alive[pick(rng)];
  DbsResult out;
  out.index = chosen;
  out.block_size = cands[chosen].block_size;
  out.direction = cands[chosen].direction;
  out.r = hi;
  out.confirmed = confirmed;
  if (confirmed) out.witness = witness[chosen];
  out.partial = partial;
  out.queries = p.queries() - q0;
  out.survivors = alive;
  return out;
}

}  // namespace dpattack
