#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "dpattack/oracle/oracle.hpp"
#include "dpattack/search/engines.hpp"
#include "dpattack/theory/montecarlo.hpp"
#include "dpattack/theory/synthetic_gradient.hpp"

namespace dpattack {

struct AlignmentSpec {
  std::size_t d = 1024;
  std::size_t blocks = 8;
  InitSpec init{};
  std::size_t budget = 200;
  std::size_t trials = 1000;
  double start_r = 0.25;  // boundary distance of d0 (kept below 0.5 so no clipping occurs)
  LambdaOptions lambda{};
};

/// Mean agreement A_t with u after t queries, t = 0..budget, for the
/// pattern-driven and the dyadic pairwise search run on identical instances.
struct AlignmentCurves {
  std::vector<double> pattern;
  std::vector<double> dyadic;
  std::vector<double> diff;         // mean of paired (pattern - dyadic)
  std::vector<double> diff_stderr;  // standard error of the paired difference
  std::size_t trials = 0;

  /// Pattern curve is not significantly below the dyadic one at any t.
  bool dominates() const {
    for (std::size_t t = 0; t < diff.size(); ++t) {
      if (diff[t] < -2.0 * diff_stderr[t]) return false;
    }
    return true;
  }
  /// No t where the two curves differ by more than 2 stderr.
  bool indistinguishable() const {
    for (std::size_t t = 0; t < diff.size(); ++t) {
      if (std::abs(diff[t]) > 2.0 * diff_stderr[t]) return false;
    }
    return true;
  }
};

namespace alignment_detail {

// Agreement with u after every query count 0..T, from accepted updates.
inline std::vector<double> agreement_path(const Direction& d0, const SearchState& st,
                                          const Direction& u, std::size_t T) {
  std::vector<double> out(T + 1);
  double a = agreement(d0, u);
  std::size_t next = 0;
  for (std::size_t t = 0; t <= T; ++t) {
    while (next < st.accepted_q.size() && st.accepted_q[next] <= t) {
      a = agreement(st.accepted[next], u);
      ++next;
    }
    out[t] = a;
  }
  return out;
}

}  // namespace alignment_detail

/// Linear-in-u victim around x = 0.5: x' is adversarial iff
/// sum_i a_i u_i (x'_i - x_i) >= tau, so g(d) = tau / (a.u.d) for a.u.d > 0.
inline AlignmentCurves alignment_curves(const AlignmentSpec& spec, std::uint64_t seed) {
  AlignmentCurves out;
  const std::size_t T = spec.budget;
  std::vector<double> sum_p(T + 1, 0.0), sum_d(T + 1, 0.0), sum_x(T + 1, 0.0),
      sum_x2(T + 1, 0.0);
  std::mt19937_64 rng(seed);
  const ImageTensor x(Shape{1, 1, spec.d}, std::vector<double>(spec.d, 0.5));

  for (std::size_t trial = 0; trial < spec.trials; ++trial) {
    // Redraw until d0 points into the adversarial half-space.
    SyntheticGradient g;
    std::vector<double> w(spec.d);
    Direction d0;
    double wd = 0.0;
    do {
      g = make_block_gradient(spec.d, spec.blocks, rng);
      for (std::size_t i = 0; i < spec.d; ++i) w[i] = g.magnitude[i] * g.u[i];
      d0 = make_initial_direction(g, spec.init, rng);
      wd = 0.0;
      for (std::size_t i = 0; i < spec.d; ++i) wd += w[i] * d0[i];
    } while (wd <= 0.0);
    const double tau = spec.start_r * wd;
    auto oracle = std::make_shared<FunctionOracle>(
        [w, tau](const ImageTensor& xp) {
          double s = 0.0;
          for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * (xp[i] - 0.5);
          return Label{s >= tau ? 1 : 0};
        },
        2);
    const double r0 = spec.start_r * (1.0 + 1e-9);
    SearchOptions opt;
    opt.lambda = spec.lambda;

    std::vector<double> path[2];
    for (int engine = 0; engine < 2; ++engine) {
      OracleHandle h(oracle, x, Label{0});
      Prober p(h);
      SearchState st = SearchState::start(d0, r0, true, p.image(d0, r0));
      st.record_directions = true;
      st = engine == 0 ? pdo_run(p, std::move(st), T, opt) : adba_run(p, std::move(st), T, opt);
      path[engine] = alignment_detail::agreement_path(d0, st, g.u, T);
    }
    for (std::size_t t = 0; t <= T; ++t) {
      sum_p[t] += path[0][t];
      sum_d[t] += path[1][t];
      const double diff = path[0][t] - path[1][t];
      sum_x[t] += diff;
      sum_x2[t] += diff * diff;
    }
  }
  const double n = static_cast<double>(spec.trials);
  out.trials = spec.trials;
  for (std::size_t t = 0; t <= T; ++t) {
    out.pattern.push_back(sum_p[t] / n);
    out.dyadic.push_back(sum_d[t] / n);
    const double mean = sum_x[t] / n;
    const double var = n > 1 ? std::max(0.0, (sum_x2[t] - n * mean * mean) / (n - 1)) : 0.0;
    out.diff.push_back(mean);
    out.diff_stderr.push_back(std::sqrt(var / n));
  }
  return out;
}

inline McReport dominance_report(const AlignmentCurves& c, const AlignmentSpec& spec) {
  McReport r;
  r.check = "dominance";
  r.trials = c.trials;
  std::size_t worst = 0;
  for (std::size_t t = 0; t < c.diff.size(); ++t) {
    if (c.diff[t] + 2.0 * c.diff_stderr[t] < c.diff[worst] + 2.0 * c.diff_stderr[worst]) worst = t;
  }
  r.estimate = c.diff.empty() ? 0.0 : c.diff[worst];
  r.stderr_ = c.diff_stderr.empty() ? 0.0 : c.diff_stderr[worst];
  r.target = 0.0;
  r.slack = 2.0 * r.stderr_;
  r.pass = c.dominates();
  r.detail = {{"d", spec.d},
              {"blocks", spec.blocks},
              {"delta", spec.init.delta},
              {"budget", spec.budget},
              {"worst_t", worst},
              {"final_pattern", c.pattern.back()},
              {"final_dyadic", c.dyadic.back()}};
  return r;
}

}  // namespace dpattack
