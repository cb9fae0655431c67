#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dpattack/core/tensor.hpp"
#include "dpattack/search/lambda.hpp"
#include "dpattack/search/prober.hpp"

namespace dpattack {

struct SearchOptions {
  double eps = 0.0;   // stop once r <= eps
  double tol = 1e-3;  // bisection precision for ray-search engines
  LambdaOptions lambda{};
};

/// Pair-rule case selected for one pair of candidates.
///   1: both fail   2: only the first succeeds
///   3: only the second succeeds   4: both succeed
struct PairDecision {
  int level = 0;
  std::size_t pair = 0;
  bool first_adversarial = false;
  std::optional<bool> second_adversarial;  // empty for an unpaired last group
  int case_id = 1;
  std::string compared;  // "", "pair" (first vs second) or "history"
  std::string winner;    // "best", "first", "second" or "history"
  std::optional<LambdaOutcome> lambda;
  double r_after = 0.0;
  std::size_t queries = 0;
};

struct SearchState {
  Direction d_best;
  double r = 0.0;
  bool confirmed = false;  // (d_best, r) confirmed by an actual probe
  ImageTensor witness;     // the probe image that confirmed (d_best, r)

  std::optional<Direction> d_his;
  ImageTensor his_witness;

  int level = 0;
  std::size_t queries = 0;  // spent inside the engine
  bool budget_exhausted = false;

  std::vector<double> r_history;  // r after every accepted update
  std::vector<PairDecision> decisions;
  std::vector<std::size_t> accepted_q;  // ledger count at every accepted update
  std::vector<Direction> accepted;      // d_best after every accepted update, if recorded
  bool record_directions = false;

  static SearchState start(Direction d0, double r0, bool confirmed = false,
                           ImageTensor witness = {}) {
    SearchState s;
    s.d_best = std::move(d0);
    s.r = r0;
    s.confirmed = confirmed;
    s.witness = std::move(witness);
    return s;
  }

  void accept(Direction d, double r_new, ImageTensor w, std::size_t q = 0) {
    d_best = std::move(d);
    if (r_new < r || !confirmed) r = r_new;
    confirmed = true;
    witness = std::move(w);
    r_history.push_back(r);
    accepted_q.push_back(q);
    if (record_directions) accepted.push_back(d_best);
  }
};

inline Direction flipped(const Direction& d, const std::vector<std::size_t>& idx) {
  Direction out = d;
  for (std::size_t i : idx) out.flip(i);
  return out;
}

inline Direction flipped(const Direction& d, std::size_t begin, std::size_t end) {
  Direction out = d;
  for (std::size_t i = begin; i < end; ++i) out.flip(i);
  return out;
}

}  // namespace dpattack
