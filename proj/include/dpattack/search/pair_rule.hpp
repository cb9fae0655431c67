#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dpattack/search/lambda.hpp"
#include "dpattack/search/prober.hpp"
#include "dpattack/search/state.hpp"

namespace dpattack::detail {

enum class PairRule {
  plain,    // four-case rule without history
  history,  // solitary successes are compared against the history buffer
};

inline void note(Prober& p, std::size_t first_q, const PairDecision& dec) {
  if (SearchTrace* t = p.trace()) {
    t->annotate(first_q, "case" + std::to_string(dec.case_id), dec.winner != "best");
  }
}

/// Applies the pair rule to consecutive groups (G0,G1), (G2,G3), ... at one
/// level. A trailing unpaired group is evaluated alone. Returns false once
/// the engine has to stop (budget exhausted or r <= eps).
inline bool sweep_level(Prober& p, SearchState& st,
                        const std::vector<std::vector<std::size_t>>& groups, int level,
                        PairRule rule, const SearchOptions& opt) {
  for (std::size_t k = 0; k < groups.size(); k += 2) {
    if (st.confirmed && st.r <= opt.eps) return false;
    if (p.remaining() == 0) {
      st.budget_exhausted = true;
      return false;
    }
    const std::size_t first_q = p.queries() + 1;
    PairDecision dec;
    dec.level = level;
    dec.pair = k / 2;

    p.set_context("pair", level);
    Direction c1 = flipped(st.d_best, groups[k]);
    auto a1 = p.probe(c1, st.r);
    dec.first_adversarial = a1.adversarial;

    Direction c2;
    ProbeResult a2;
    const bool paired = k + 1 < groups.size();
    if (paired) {
      c2 = flipped(st.d_best, groups[k + 1]);
      try {
        a2 = p.probe(c2, st.r);
      } catch (const BudgetExhausted&) {
        // The first answer alone is still usable.
        st.budget_exhausted = true;
        dec.case_id = a1.adversarial ? 2 : 1;
        dec.winner = a1.adversarial ? "first" : "best";
        if (a1.adversarial) st.accept(std::move(c1), st.r, std::move(a1.image), p.queries());
        dec.r_after = st.r;
        dec.queries = p.queries() + 1 - first_q;
        note(p, first_q, dec);
        st.decisions.push_back(std::move(dec));
        return false;
      }
      dec.second_adversarial = a2.adversarial;
    }
    const bool s1 = a1.adversarial;
    const bool s2 = paired && a2.adversarial;
    dec.case_id = !s1 && !s2 ? 1 : (s1 && !s2 ? 2 : (!s1 && s2 ? 3 : 4));

    bool stop = false;
    if (dec.case_id == 2 || dec.case_id == 3) {
      Direction& cand = s1 ? c1 : c2;
      ImageTensor& cw = s1 ? a1.image : a2.image;
      const char* who = s1 ? "first" : "second";
      if (rule == PairRule::history && st.d_his) {
        dec.compared = "history";
        p.set_context("lambda", level);
        auto lr = lambda_compare(p, cand, *st.d_his, st.r, std::move(cw), st.his_witness,
                                 opt.lambda);
        dec.lambda = lr.outcome;
        stop = lr.outcome == LambdaOutcome::exhausted;
        if (lr.winner == 0) {
          dec.winner = who;
          if (lr.outcome == LambdaOutcome::step_limit) {
            st.his_witness = std::move(lr.loser_witness);  // history stays cached
          } else {
            st.d_his.reset();
          }
          st.accept(std::move(cand), lr.r, std::move(lr.witness), p.queries());
        } else {
          dec.winner = "history";
          Direction winner = std::move(*st.d_his);
          st.d_his.reset();
          st.accept(std::move(winner), lr.r, std::move(lr.witness), p.queries());
        }
      } else {
        dec.winner = who;
        st.accept(std::move(cand), st.r, std::move(cw), p.queries());
      }
    } else if (dec.case_id == 4) {
      dec.compared = "pair";
      p.set_context("lambda", level);
      auto lr = lambda_compare(p, c1, c2, st.r, std::move(a1.image), std::move(a2.image),
                               opt.lambda);
      dec.lambda = lr.outcome;
      stop = lr.outcome == LambdaOutcome::exhausted;
      dec.winner = lr.winner == 0 ? "first" : "second";
      Direction& win = lr.winner == 0 ? c1 : c2;
      Direction& lose = lr.winner == 0 ? c2 : c1;
      if (rule == PairRule::history && lr.outcome == LambdaOutcome::step_limit) {
        st.d_his = std::move(lose);
        st.his_witness = std::move(lr.loser_witness);
      }
      st.accept(std::move(win), lr.r, std::move(lr.witness), p.queries());
    } else {
      dec.winner = "best";
    }
    dec.r_after = st.r;
    dec.queries = p.queries() + 1 - first_q;
    note(p, first_q, dec);
    st.decisions.push_back(std::move(dec));
    if (stop) {
      st.budget_exhausted = true;
      return false;
    }
  }
  return true;
}

}  // namespace dpattack::detail
