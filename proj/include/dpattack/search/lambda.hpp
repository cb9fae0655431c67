#pragma once

#include <cstddef>

#include "dpattack/search/prober.hpp"

namespace dpattack {

struct LambdaOptions {
  double beta = 0.9;
  std::size_t steps = 8;
};

enum class LambdaOutcome {
  decided,     // exactly one candidate failed at some r'
  tie,         // both failed at the same r'; first argument kept
  step_limit,  // both still adversarial when the step limit was reached
  no_steps,    // steps == 0
  exhausted,   // query budget ran out mid-comparison
};

inline const char* outcome_name(LambdaOutcome o) {
  switch (o) {
    case LambdaOutcome::decided: return "decided";
    case LambdaOutcome::tie: return "tie";
    case LambdaOutcome::step_limit: return "step-limit";
    case LambdaOutcome::no_steps: return "no-steps";
    case LambdaOutcome::exhausted: return "exhausted";
  }
  return "?";
}

struct LambdaResult {
  int winner = 0;  // 0: first argument, 1: second
  double r = 0.0;  // r*, last magnitude at which the winner was confirmed
  LambdaOutcome outcome = LambdaOutcome::no_steps;
  ImageTensor witness;        // winner's probe at r*
  ImageTensor loser_witness;  // loser's probe at r*, valid when loser_alive
  bool loser_alive = false;   // loser confirmed adversarial at r*
  std::size_t rounds = 0;
};

/// Decides which of two adversarial directions has the smaller boundary
/// distance by shrinking r' <- beta r' and querying both (d1 first) until one
/// fails. Issues at most 2 * steps queries. w1/w2 are the probes confirming
/// d1/d2 at r.
inline LambdaResult lambda_compare(Prober& p, const Direction& d1, const Direction& d2,
                                   double r, ImageTensor w1, ImageTensor w2,
                                   const LambdaOptions& opt = {}) {
  LambdaResult out;
  out.r = r;
  out.witness = std::move(w1);
  out.loser_witness = std::move(w2);
  out.loser_alive = true;
  double rc = r;
  try {
    for (std::size_t k = 0; k < opt.steps; ++k) {
      const double rp = opt.beta * rc;
      auto a1 = p.probe(d1, rp);
      auto a2 = p.probe(d2, rp);
      ++out.rounds;
      if (a1.adversarial && a2.adversarial) {
        rc = rp;
        out.r = rc;
        out.witness = std::move(a1.image);
        out.loser_witness = std::move(a2.image);
        continue;
      }
      if (a1.adversarial != a2.adversarial) {
        out.outcome = LambdaOutcome::decided;
        out.winner = a1.adversarial ? 0 : 1;
        out.r = rp;
        out.witness = std::move(a1.adversarial ? a1.image : a2.image);
        out.loser_alive = false;
        out.loser_witness = ImageTensor{};
        return out;
      }
      out.outcome = LambdaOutcome::tie;
      return out;
    }
    out.outcome = opt.steps == 0 ? LambdaOutcome::no_steps : LambdaOutcome::step_limit;
  } catch (const BudgetExhausted&) {
    out.outcome = LambdaOutcome::exhausted;
  }
  return out;
}

}  // namespace dpattack
