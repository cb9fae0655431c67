#pragma once

// White-box diagnostics. These read gradients of builtin models and are not
// part of the attack path.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "dpattack/oracle/builtin_model.hpp"
#include "dpattack/search/engines.hpp"
#include "dpattack/theory/montecarlo.hpp"

namespace dpattack {

/// d . sgn(grad L(x, y)) / d.
inline double grad_sign_cosine(const BuiltinModel& m, const ImageTensor& x, Label y,
                               const Direction& d) {
  const auto lg = m.loss_and_grad(x.data(), y);
  return cosine(d, sign_with_one(lg.grad));
}

inline double grad_sign_cosine(const Oracle& oracle, const ImageTensor& x, Label y,
                               const Direction& d) {
  return cosine(d, sign_with_one(loss_and_grad(oracle, x, y).grad));
}

struct CurvatureEstimate {
  double lambda_max = 0.0;
  std::size_t iterations = 0;
  bool converged = false;  // false: last estimate returned after `iters` steps
};

using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

/// Dominant Hessian eigenvalue by power iteration on finite-difference
/// Hessian-vector products: Hv ~ (g(x + h v) - g(x - h v)) / 2h.
inline CurvatureEstimate power_iteration_hvp(const GradientFn& grad, std::span<const double> x,
                                             std::size_t iters, std::uint64_t seed,
                                             double step = 1e-3, double rtol = 1e-4) {
  const std::size_t n = x.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(n), xp(n), xm(n), hv(n);
  auto normalize = [](std::vector<double>& a) {
    double s = 0.0;
    for (double e : a) s += e * e;
    s = std::sqrt(s);
    if (s > 0.0) {
      for (double& e : a) e /= s;
    }
    return s;
  };
  for (double& e : v) e = gauss(rng);
  normalize(v);
  CurvatureEstimate out;
  double prev = 0.0;
  for (std::size_t it = 1; it <= iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      xp[i] = x[i] + step * v[i];
      xm[i] = x[i] - step * v[i];
    }
    const auto gp = grad(xp), gm = grad(xm);
    double rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      hv[i] = (gp[i] - gm[i]) / (2.0 * step);
      rq += v[i] * hv[i];
    }
    out.lambda_max = rq;
    out.iterations = it;
    if (normalize(hv) == 0.0) {
      out.lambda_max = 0.0;
      out.converged = true;
      return out;
    }
    if (it > 1 && std::abs(rq - prev) <= rtol * std::abs(rq)) {
      out.converged = true;
      return out;
    }
    prev = rq;
    v = hv;
  }
  return out;
}

inline CurvatureEstimate curvature_lambda_max(const BuiltinModel& m, const ImageTensor& x,
                                              Label y, std::size_t iters, std::uint64_t seed) {
  GradientFn grad = [&](std::span<const double> p) { return m.loss_and_grad(p, y).grad; };
  return power_iteration_hvp(grad, x.data(), iters, seed);
}

/// Gradient-sign alignment of d_best over a hierarchical ray search from the
/// all-ones direction: entry 0 is the starting alignment, then one entry per
/// accepted update.
struct AlignmentTrace {
  std::vector<double> cosine;
  std::vector<std::size_t> queries;  // ledger count of each entry
};

inline AlignmentTrace hrays_alignment_growth(const BuiltinModel& m, const ImageTensor& x,
                                             Label y, std::size_t budget, double tol = 1e-3) {
  const Direction u = sign_with_one(m.loss_and_grad(x.data(), y).grad);
  auto oracle = std::make_shared<BuiltinOracle>(std::make_shared<const BuiltinModel>(m));
  OracleHandle h(oracle, x, y);
  Prober p(h);
  SearchState st = SearchState::start(Direction(x.size()), p.r_max());
  st.record_directions = true;
  SearchOptions opt;
  opt.tol = tol;
  st = hrays_run(p, std::move(st), budget, opt);
  AlignmentTrace out;
  out.cosine.push_back(cosine(Direction(x.size()), u));
  out.queries.push_back(0);
  for (std::size_t k = 0; k < st.accepted.size(); ++k) {
    out.cosine.push_back(cosine(st.accepted[k], u));
    out.queries.push_back(st.accepted_q[k]);
  }
  return out;
}

}  // namespace dpattack
