#pragma once

// Named validation checks behind `validate-theory`. Each returns one or more
// McReports; the check passes iff every report passes.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dpattack/oracle/synthetic.hpp"
#include "dpattack/theory/alignment.hpp"
#include "dpattack/theory/complexity.hpp"
#include "dpattack/theory/curvature.hpp"
#include "dpattack/theory/montecarlo.hpp"

namespace dpattack {

inline const std::vector<std::string>& theory_check_names() {
  static const std::vector<std::string> names{"hoeffding",  "arcsine",      "dominance",
                                              "complexity", "hrays-growth", "curvature"};
  return names;
}

inline std::vector<McReport> check_hoeffding(std::uint64_t seed) {
  return {mc_hoeffding(16, 0.5, 100, 100000, seed)};
}

inline std::vector<McReport> check_arcsine(std::uint64_t seed) {
  std::vector<McReport> out;
  for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) out.push_back(mc_arcsine(rho, 1000000, seed));
  return out;
}

/// Structured init must dominate; single-run init must be indistinguishable;
/// iid init with delta = 0 is reported for information.
inline std::vector<McReport> check_dominance(std::uint64_t seed, std::size_t trials = 1000) {
  std::vector<McReport> out;
  AlignmentSpec spec;
  spec.trials = trials;
  out.push_back(dominance_report(alignment_curves(spec, seed), spec));

  AlignmentSpec single = spec;
  single.init.kind = InitKind::single_run;
  const AlignmentCurves c = alignment_curves(single, seed + 1);
  McReport r = dominance_report(c, single);
  r.check = "dominance-single-run";
  r.pass = c.indistinguishable();
  r.detail["rule"] = "indistinguishable";
  out.push_back(r);

  AlignmentSpec iid = spec;
  iid.init.kind = InitKind::iid;
  iid.init.delta = 0.0;
  const AlignmentCurves ci = alignment_curves(iid, seed + 2);
  McReport ri = dominance_report(ci, iid);
  ri.check = "dominance-iid-delta0";
  ri.pass = true;
  ri.detail["indistinguishable"] = ci.indistinguishable();
  ri.detail["rule"] = "informational";
  out.push_back(ri);
  return out;
}

inline McReport complexity_report(const std::string& name, const ComplexityReport& c,
                                  bool pass) {
  McReport r;
  r.check = name;
  r.trials = 1;
  r.estimate = static_cast<double>(c.t_pat);
  r.target = static_cast<double>(c.t_dyad);
  r.pass = pass;
  r.detail = {{"t_pat", c.t_pat},
              {"t_dyad", c.t_dyad},
              {"sum_gamma", c.sum_gamma},
              {"sum_log_ratio", c.sum_log_ratio},
              {"gamma", c.gamma},
              {"dyad_per_block", c.dyad_per_block}};
  return r;
}

inline std::vector<McReport> check_complexity() {
  std::vector<McReport> out;
  {
    const auto [g, d0] = aligned_instance(1024, 16, 2);
    const ComplexityReport c = recovery_complexity(g, d0);
    out.push_back(complexity_report("complexity-aligned", c,
                                    c.t_pat < c.t_dyad && c.t_pat <= 2 * c.sum_gamma));
  }
  {
    const auto [g, d0] = straddling_instance(1024, 16, 8);
    const ComplexityReport c = recovery_complexity(g, d0);
    const double lhs = static_cast<double>(c.sum_gamma) - c.sum_log_ratio;
    const double rhs = static_cast<double>(c.t_pat) - static_cast<double>(c.t_dyad);
    out.push_back(complexity_report("complexity-straddling", c, (lhs > 0) == (rhs > 0)));
  }
  return out;
}

/// Victim for the white-box checks: the default texture MLP.
inline TrainResult default_victim(std::uint64_t seed = 1) {
  return train_builtin(TrainSpec{}, seed);
}

inline std::vector<McReport> check_hrays_growth(const BuiltinModel& m, std::uint64_t seed,
                                                std::size_t runs = 50,
                                                std::size_t budget = 500) {
  DatasetSpec ds;
  ds.shape = m.input_shape();
  ds.classes = m.classes();
  ds.per_class = (runs + ds.classes - 1) / ds.classes * 2;
  const auto data = make_dataset(ds, seed);
  double first = 0.0, last = 0.0;
  std::size_t n = 0, grew = 0;
  for (const auto& s : data) {
    if (n == runs) break;
    if (m.predict(s.image.data()) != s.label) continue;
    const AlignmentTrace t = hrays_alignment_growth(m, s.image, s.label, budget);
    first += t.cosine.front();
    last += t.cosine.back();
    grew += t.cosine.back() > t.cosine.front();
    ++n;
  }
  McReport r;
  r.check = "hrays-growth";
  r.trials = n;
  r.estimate = n ? last / n : 0.0;
  r.target = n ? first / n : 0.0;
  r.pass = n > 0 && r.estimate > r.target;
  r.detail = {{"mean_initial", r.target},
              {"mean_final", r.estimate},
              {"runs_grown", grew},
              {"budget", budget}};
  return {r};
}

/// Quadratic with Hessian diag(3, 1), plus the closed form for a symmetric
/// two-class linear model.
inline std::vector<McReport> check_curvature(std::uint64_t seed) {
  std::vector<McReport> out;
  {
    GradientFn grad = [](std::span<const double> p) {
      return std::vector<double>{3.0 * p[0], p[1]};
    };
    const std::vector<double> x{0.3, -0.7};
    const CurvatureEstimate e = power_iteration_hvp(grad, x, 200, seed);
    McReport r;
    r.check = "curvature-quadratic";
    r.trials = e.iterations;
    r.estimate = e.lambda_max;
    r.target = 3.0;
    r.slack = 1e-3;
    r.pass = std::abs(e.lambda_max - 3.0) <= r.slack;
    r.detail = {{"converged", e.converged}};
    out.push_back(r);
  }
  {
    // Logits z_k = w_k . x with x chosen so both logits are equal (p = 0.5).
    const Shape s{1, 2, 2};
    BuiltinModel m = BuiltinModel::linear(s, 2);
    const std::vector<double> w0{0.8, -0.4, 0.3, 0.1}, w1{-0.2, 0.5, -0.6, 0.9};
    std::copy(w0.begin(), w0.end(), m.w1().begin());
    std::copy(w1.begin(), w1.end(), m.w1().begin() + 4);
    // Pixels (0.5, 0.5, 0.5, x3) with x3 solving (w0 - w1) . x = 0.
    double dot = 0.0;
    for (std::size_t i = 0; i < 3; ++i) dot += (w0[i] - w1[i]) * 0.5;
    const double x3 = -dot / (w0[3] - w1[3]);
    const ImageTensor x(s, {0.5, 0.5, 0.5, x3});
    double dn = 0.0;
    for (std::size_t i = 0; i < 4; ++i) dn += (w0[i] - w1[i]) * (w0[i] - w1[i]);
    const CurvatureEstimate e = curvature_lambda_max(m, x, Label{0}, 200, seed);
    McReport r;
    r.check = "curvature-linear-softmax";
    r.trials = e.iterations;
    r.estimate = e.lambda_max;
    r.target = 0.25 * dn;
    r.slack = 1e-3 * r.target;
    r.pass = std::abs(r.estimate - r.target) <= r.slack;
    r.detail = {{"converged", e.converged}};
    out.push_back(r);
  }
  return out;
}

/// Runs one named check. `victim` is used by hrays-growth; when absent the
/// default texture MLP is trained.
inline std::vector<McReport> run_theory_check(const std::string& name, std::uint64_t seed,
                                              const std::optional<BuiltinModel>& victim = {}) {
  if (name == "hoeffding") return check_hoeffding(seed);
  if (name == "arcsine") return check_arcsine(seed);
  if (name == "dominance") return check_dominance(seed);
  if (name == "complexity") return check_complexity();
  if (name == "curvature") return check_curvature(seed);
  if (name == "hrays-growth") {
    return check_hrays_growth(victim ? *victim : default_victim().model, seed);
  }
  throw FormatError("unknown check '" + name + "'");
}

}  // namespace dpattack
