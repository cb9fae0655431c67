// Acceptance run: one PASS/FAIL line per criterion; exits 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dpattack/dpattack.hpp"
#include "dpattack/oracle/builtin_model.hpp"
#include "dpattack/oracle/synthetic.hpp"
#include "dpattack/theory/checks.hpp"

using namespace dpattack;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ImageTensor uniform_image(const Shape& s, std::mt19937_64& rng, double lo = 0.0,
                          double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(s.size());
  for (double& e : v) e = u(rng);
  return ImageTensor(s, std::move(v));
}

Direction random_signs(std::size_t d, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::int8_t> v(d);
  for (auto& e : v) e = coin(rng) ? 1 : -1;
  return Direction(std::move(v));
}

// ----------------------------------------------------------------- transforms

// Dense reference: the w×w orthonormal DCT-II matrix applied as C X C^T to
// every block, written out from the cosine formula.
Outcome transform_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  const Shape s{3, 32, 32};
  double worst_fwd = 0.0, worst_rt = 0.0;
  for (int n = 0; n < 200; ++n) {
    const ImageTensor x = uniform_image(s, rng);
    for (std::size_t w : {4u, 8u}) {
      std::vector<double> c(w * w);
      for (std::size_t k = 0; k < w; ++k)
        for (std::size_t m = 0; m < w; ++m)
          c[k * w + m] = (k == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w)) *
                         std::cos(std::numbers::pi * (2.0 * m + 1.0) * k / (2.0 * w));
      const BdctCoefficients coef = bdct(x.tensor(), w);
      const std::size_t by = 32 / w, bx = 32 / w;
      for (std::size_t ch = 0; ch < 3; ++ch) {
        for (std::size_t z = 0; z < by * bx; ++z) {
          const std::size_t oy = (z / bx) * w, ox = (z % bx) * w;
          for (std::size_t u = 0; u < w; ++u) {
            for (std::size_t v = 0; v < w; ++v) {
              double acc = 0.0;
              for (std::size_t i = 0; i < w; ++i)
                for (std::size_t j = 0; j < w; ++j)
                  acc += c[u * w + i] * x(ch, oy + i, ox + j) * c[v * w + j];
              worst_fwd = std::max(worst_fwd, std::abs(acc - coef.at(ch, z, u, v)));
            }
          }
        }
      }
      const Tensor back = ibdct(coef);
      for (std::size_t k = 0; k < x.size(); ++k)
        worst_rt = std::max(worst_rt, std::abs(back[k] - x[k]));
    }
  }
  const double secs = seconds_since(t0);
  return {worst_fwd <= 1e-9 && worst_rt < 1e-9 && secs < 10.0,
          fmt("max |bdct - dense| %.2e, max round-trip %.2e, %.2f s", worst_fwd, worst_rt, secs)};
}

// ----------------------------------------------------------- boundary search

Outcome boundary_accuracy() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mag(0.2, 1.0), rs(0.05, 0.29);
  const Shape s{1, 8, 8};
  double worst = 0.0;
  std::size_t max_q = 0;
  bool ok = true;
  for (int t = 0; t < 100; ++t) {
    // Two-class linear victim with every coordinate pushing the margin along
    // d, so the crossing r* is analytic and no clipping occurs before it.
    const ImageTensor x = uniform_image(s, rng, 0.3, 0.7);
    const Direction d = random_signs(s.size(), rng);
    const double r_star = rs(rng);
    BuiltinModel m = BuiltinModel::linear(s, 2);
    double wx = 0.0, wd = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double w = mag(rng) * d[i];
      m.w1()[s.size() + i] = w;
      wx += w * x[i];
      wd += w * d[i];
    }
    m.b1()[1] = -wx - r_star * wd;
    auto oracle = std::make_shared<BuiltinOracle>(m);
    OracleHandle h(oracle, x, Label{0});
    Prober p(h);
    const BoundaryResult br = boundary_distance(p, d, 0.0, 1.0, 1e-3);
    worst = std::max(worst, std::abs(br.r - r_star));
    max_q = std::max(max_q, h.ledger().total());
    ok = ok && std::abs(br.r - r_star) <= 1e-3 && h.ledger().total() <= 11;
  }
  return {ok, fmt("max |r - r*| %.2e, max queries %zu over 100 pairs", worst, max_q)};
}

// ------------------------------------------------------------ decision tables

ImageTensor mid_gray(std::size_t d) { return ImageTensor(Shape{1, 1, d}, std::vector<double>(d, 0.5)); }

std::vector<bool> cat(std::vector<bool> a, const std::vector<bool>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct Expected {
  int case_id;
  std::string compared;
  std::string winner;
  std::optional<LambdaOutcome> lambda;
  double r_after;
};

struct TableRow {
  std::string name;
  bool pdo;
  Direction d0;
  std::vector<bool> script;
  std::vector<Expected> decisions;
  Direction final_best;
  std::optional<Direction> final_his;
  std::vector<std::string> trace_labels;  // decision label of every query
};

bool run_row(const TableRow& row, std::string& why) {
  const std::size_t d = row.d0.size();
  auto oracle = std::make_shared<ScriptedOracle>(row.script, Label{0});
  OracleHandle h(oracle, mid_gray(d), Label{0});
  Prober p(h);
  SearchTrace trace;
  p.attach_trace(&trace);
  ImageTensor w = p.image(row.d0, 0.5);
  SearchState st = SearchState::start(row.d0, 0.5, true, std::move(w));
  st = row.pdo ? pdo_run(p, std::move(st), row.script.size())
               : adba_run(p, std::move(st), row.script.size());
  auto fail = [&](const std::string& m) {
    why = row.name + ": " + m;
    return false;
  };
  if (st.decisions.size() != row.decisions.size()) return fail("decision count");
  for (std::size_t k = 0; k < row.decisions.size(); ++k) {
    const auto& got = st.decisions[k];
    const auto& want = row.decisions[k];
    if (got.case_id != want.case_id) return fail("case of decision " + std::to_string(k));
    if (got.compared != want.compared) return fail("compared of decision " + std::to_string(k));
    if (got.winner != want.winner) return fail("winner of decision " + std::to_string(k));
    if (got.lambda != want.lambda) return fail("lambda outcome of decision " + std::to_string(k));
    if (std::abs(got.r_after - want.r_after) > 1e-12) return fail("r after decision " + std::to_string(k));
  }
  if (st.d_best != row.final_best) return fail("final d_best");
  if (st.d_his != row.final_his) return fail("final history");
  if (trace.size() != row.trace_labels.size()) return fail("trace length");
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (trace.records()[k].decision != row.trace_labels[k]) return fail("trace label " + std::to_string(k));
  }
  return true;
}

std::vector<std::string> labels(std::initializer_list<std::pair<const char*, std::size_t>> parts) {
  std::vector<std::string> out;
  for (const auto& [l, n] : parts) out.insert(out.end(), n, l);
  return out;
}

Outcome decision_tables() {
  const Direction ones(4), c1{-1, -1, 1, 1}, c2{1, 1, -1, -1};
  const double r9 = 0.5 * std::pow(0.9, 8);  // after a step-limited comparison
  // PDO start (+,+,-,-): runs {2,3} and {0,1}; the first candidate flips
  // {2,3}, the second {0,1}. A both-adversarial prefix with 16 adversarial
  // comparison probes ends at the step limit and caches (-,-,-,-).
  const Direction pdo0{1, 1, -1, -1};
  const auto prefix = cat({true, true}, std::vector<bool>(16, true));
  const Expected step_limited{4, "pair", "first", LambdaOutcome::step_limit, r9};
  const Direction minus(std::vector<std::int8_t>(4, -1));

  std::vector<TableRow> rows{
      {"pair rule case 1", false, ones, {false, false}, {{1, "", "best", {}, 0.5}}, ones, {},
       labels({{"case1", 2}})},
      {"pair rule case 2", false, ones, {true, false}, {{2, "", "first", {}, 0.5}}, c1, {},
       labels({{"case2", 2}})},
      {"pair rule case 3", false, ones, {false, true}, {{3, "", "second", {}, 0.5}}, c2, {},
       labels({{"case3", 2}})},
      {"pair rule case 4", false, ones, {true, true, true, true, true, false},
       {{4, "pair", "first", LambdaOutcome::decided, 0.5 * 0.81}}, c1, {},
       labels({{"case4", 6}})},
      {"history rule case 1", true, pdo0, cat(prefix, {false, false, false, false}),
       {step_limited, {1, "", "best", {}, r9}, {1, "", "best", {}, r9}}, ones, minus,
       labels({{"case4", 18}, {"case1", 4}})},
      {"history rule case 2", true, pdo0, cat(prefix, {true, false, true, false, false, true}),
       {step_limited, {2, "history", "first", LambdaOutcome::decided, r9 * 0.9},
        {3, "", "second", {}, r9 * 0.9}},
       Direction{1, -1, -1, 1}, {}, labels({{"case4", 18}, {"case2", 4}, {"case3", 2}})},
      {"history rule case 3", true, pdo0, cat(prefix, {false, true, false, true, false, false}),
       {step_limited, {3, "history", "history", LambdaOutcome::decided, r9 * 0.9},
        {1, "", "best", {}, r9 * 0.9}},
       minus, {}, labels({{"case4", 18}, {"case3", 4}, {"case1", 2}})},
      {"history rule case 4", true, pdo0, prefix, {step_limited}, ones, minus,
       labels({{"case4", 18}})},
      {"history rule solitary success, empty history", true, pdo0, {true, false},
       {{2, "", "first", {}, 0.5}}, ones, {}, labels({{"case2", 2}})},
  };
  std::size_t matched = 0;
  std::string why;
  for (const auto& row : rows) matched += run_row(row, why);
  return {matched == rows.size(),
          fmt("%zu/%zu rows match%s%s", matched, rows.size(), why.empty() ? "" : "; first mismatch ",
              why.c_str())};
}

// ----------------------------------------------------------------- degeneracy

Outcome pdo_degeneracy() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> dim(3, 64);
  std::uniform_real_distribution<double> density(0.1, 0.9);
  std::size_t same = 0;
  const std::size_t n = 60;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t d = dim(rng);
    std::bernoulli_distribution coin(density(rng));
    std::vector<bool> script(400);
    for (std::size_t i = 0; i < script.size(); ++i) script[i] = coin(rng);
    std::shared_ptr<ScriptedOracle> o[2];
    SearchState st[2];
    for (int e = 0; e < 2; ++e) {
      o[e] = std::make_shared<ScriptedOracle>(script, Label{0});
      OracleHandle h(o[e], mid_gray(d), Label{0});
      Prober p(h);
      ImageTensor w = p.image(Direction(d), 0.5);
      SearchState s0 = SearchState::start(Direction(d), 0.5, true, std::move(w));
      st[e] = e == 0 ? pdo_run(p, std::move(s0), 300) : adba_run(p, std::move(s0), 300);
    }
    same += o[0]->seen() == o[1]->seen() && st[0].d_best == st[1].d_best &&
            st[0].r == st[1].r && st[0].r_history == st[1].r_history &&
            st[0].queries == st[1].queries;
  }
  return {same == n, fmt("%zu/%zu scripts give identical query sequences and states", same, n)};
}

// ---------------------------------------------------------------- Monte Carlo

Outcome hoeffding_tail() {
  const auto t0 = std::chrono::steady_clock::now();
  const McReport r = check_hoeffding(1).front();
  const double secs = seconds_since(t0);
  return {r.pass && secs < 5.0, fmt("P = %.5f, bound %.5f + 3 se %.5f, %.2f s", r.estimate,
                                    r.target, r.slack, secs)};
}

Outcome arcsine_law() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto reports = check_arcsine(2);
  const double secs = seconds_since(t0);
  bool ok = secs < 10.0;
  std::ostringstream os;
  for (const auto& r : reports) {
    ok = ok && r.pass;
    os << fmt("rho %+.1f: %.4f vs %.4f; ", r.detail.at("rho").get<double>(), r.estimate, r.target);
  }
  const double at_half = mc_arcsine(0.5, 10, 1).target;
  ok = ok && std::abs(at_half - 1.0 / 3.0) < 1e-15;
  os << fmt("target at 0.5 = %.15f, %.2f s", at_half, secs);
  return {ok, os.str()};
}

Outcome pattern_dominance() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto reports = check_dominance(3, 1000);
  const double secs = seconds_since(t0);
  const McReport& dom = reports[0];
  const McReport& single = reports[1];
  return {dom.pass && single.pass && secs < 60.0,
          fmt("worst paired diff %.4f (2 se %.4f) at t=%d, final %.3f vs %.3f; "
              "single-run indistinguishable %s; %.1f s",
              dom.estimate, dom.slack, dom.detail.at("worst_t").get<int>(),
              dom.detail.at("final_pattern").get<double>(),
              dom.detail.at("final_dyadic").get<double>(), single.pass ? "yes" : "no", secs)};
}

Outcome complexity_gap() {
  const auto reports = check_complexity();
  const auto& a = reports[0].detail;
  const auto& b = reports[1].detail;
  return {reports[0].pass && reports[1].pass,
          fmt("aligned T_pat %d T_dyad %d sum gamma %d; straddling T_pat %d T_dyad %d "
              "sum gamma %d sum log %.1f",
              a.at("t_pat").get<int>(), a.at("t_dyad").get<int>(), a.at("sum_gamma").get<int>(),
              b.at("t_pat").get<int>(), b.at("t_dyad").get<int>(), b.at("sum_gamma").get<int>(),
              b.at("sum_log_ratio").get<double>())};
}

// ------------------------------------------------------------------ gradients

Outcome gradient_correctness(const BuiltinModel& victim) {
  std::mt19937_64 rng(50);
  BuiltinModel random = BuiltinModel::mlp(Shape{3, 8, 8}, 16, 5);
  std::normal_distribution<double> g(0.0, 0.5);
  for (auto* v : {&random.w1(), &random.b1(), &random.w2(), &random.b2()})
    for (double& e : *v) e = g(rng);
  double worst = 0.0;
  for (const BuiltinModel* m : {&victim, static_cast<const BuiltinModel*>(&random)}) {
    for (int t = 0; t < 50; ++t) {
      const ImageTensor x = uniform_image(m->input_shape(), rng);
      const Label y{t % m->classes()};
      const LossGrad lg = m->loss_and_grad(x.data(), y);
      std::vector<double> p(x.data().begin(), x.data().end());
      double scale = 0.0;
      for (double v : lg.grad) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double h = 1e-5, keep = p[i];
        p[i] = keep + h;
        const double up = m->loss(p, y);
        p[i] = keep - h;
        const double dn = m->loss(p, y);
        p[i] = keep;
        worst = std::max(worst, std::abs((up - dn) / (2 * h) - lg.grad[i]) / std::max(scale, 1e-12));
      }
    }
  }
  GradientFn quad = [](std::span<const double> q) {
    return std::vector<double>{3.0 * q[0], q[1]};
  };
  const std::vector<double> x0{0.4, -1.1};
  const CurvatureEstimate e = power_iteration_hvp(quad, x0, 200, 7);
  return {worst <= 1e-3 && std::abs(e.lambda_max - 3.0) <= 1e-3,
          fmt("max relative finite-difference error %.2e over 100 points; lambda_max %.6f",
              worst, e.lambda_max)};
}

// ---------------------------------------------------------------- end to end

struct Runs {
  std::vector<BenchmarkReport> reports;
};

Outcome end_to_end(const BuiltinModel& model, const std::vector<LabeledImage>& data,
                   Runs& runs) {
  auto shared = std::make_shared<const BuiltinModel>(model);
  OracleFactory factory = [shared] { return std::make_shared<BuiltinOracle>(shared); };
  double asr_dp = 0.0, asr_adba = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (Method m : {Method::dpattack, Method::adba}) {
      AttackConfig cfg;
      cfg.method = m;
      cfg.eps = 0.05;
      cfg.max_queries = 50;
      cfg.seed = seed;
      cfg.trace = true;
      runs.reports.push_back(run_benchmark(cfg, data, factory));
      (m == Method::dpattack ? asr_dp : asr_adba) += runs.reports.back().asr / 5.0;
    }
  }
  const McReport growth = check_hrays_growth(model, 5).front();
  return {asr_dp > asr_adba && growth.pass,
          fmt("ASR@50 DPAttack %.3f vs ADBA %.3f (margin %+.3f); HRayS cosine %.4f -> %.4f "
              "over %zu runs",
              asr_dp, asr_adba, asr_dp - asr_adba, growth.target, growth.estimate,
              growth.trials)};
}

Outcome replay_invariants(const BuiltinModel& model, const std::vector<LabeledImage>& data,
                          Runs& runs) {
  auto shared = std::make_shared<const BuiltinModel>(model);
  OracleFactory factory = [shared] { return std::make_shared<BuiltinOracle>(shared); };
  for (Method m : {Method::hrays, Method::nrays, Method::dpattack}) {
    AttackConfig cfg;
    cfg.method = m;
    cfg.norm = m == Method::dpattack ? Norm::l2 : Norm::linf;
    cfg.eps = m == Method::dpattack ? 0.8 : 0.05;
    cfg.max_queries = 200;
    cfg.seed = 11;
    cfg.trace = true;
    runs.reports.push_back(run_benchmark(cfg, data, factory));
  }
  BuiltinOracle fresh(model);
  std::size_t successes = 0, results = 0, bad_replay = 0, bad_count = 0;
  for (const auto& rep : runs.reports) {
    for (std::size_t i = 0; i < rep.results.size(); ++i) {
      const AttackResult& r = rep.results[i];
      ++results;
      if (r.trace.size() != r.queries_used) ++bad_count;
      if (!r.success) continue;
      ++successes;
      if (!r.adv_image) {
        ++bad_replay;
        continue;
      }
      const double dist =
          norm(difference(r.adv_image->tensor(), data[i].image.tensor()), rep.config.norm);
      if (fresh.predict(*r.adv_image) == rep.labels[i] || dist > rep.config.eps + 1e-9) {
        ++bad_replay;
      }
    }
  }
  return {bad_replay == 0 && bad_count == 0 && successes > 0,
          fmt("%zu successes replayed, %zu failed replay; %zu/%zu results with ledger != trace",
              successes, bad_replay, bad_count, results)};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](const char* name, const Outcome& o) {
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += !o.pass;
  };

  report("transform-equivalence", transform_equivalence());
  report("boundary-accuracy", boundary_accuracy());
  report("decision-tables", decision_tables());
  report("pdo-degeneracy", pdo_degeneracy());
  report("hoeffding-tail", hoeffding_tail());
  report("arcsine-law", arcsine_law());
  report("pattern-dominance", pattern_dominance());
  report("complexity-gap", complexity_gap());

  // Fixed victim: default texture MLP, 1×16×16, 4 classes; 100 test images.
  TrainSpec ts;
  const TrainResult victim = train_builtin(ts, 1);
  DatasetSpec test = ts.data;
  test.per_class = 25;
  std::vector<LabeledImage> data;
  std::size_t k = 0;
  for (auto& s : make_dataset(test, 777)) {
    data.push_back({std::move(s.image), s.label, "test_" + std::to_string(k++)});
  }

  report("gradient-correctness", gradient_correctness(victim.model));
  Runs runs;
  report("end-to-end-trend", end_to_end(victim.model, data, runs));
  report("replay-budget-invariants", replay_invariants(victim.model, data, runs));

  std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << " of 11 criteria failing"
            << std::endl;
  return failed ? 1 : 0;
}
