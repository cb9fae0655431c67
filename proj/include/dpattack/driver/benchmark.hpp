#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dpattack/driver/attack.hpp"
#include "dpattack/oracle/oracle.hpp"

namespace dpattack {

struct LabeledImage {
  ImageTensor image;
  std::optional<Label> label;  // absent: taken from the oracle's prediction
  std::string id;
};

using OracleFactory = std::function<std::shared_ptr<Oracle>()>;

struct BenchmarkReport {
  AttackConfig config;
  std::vector<std::string> ids;
  std::vector<Label> labels;
  std::vector<AttackResult> results;
  double asr = 0.0;
  std::optional<double> avg_q;
  std::optional<double> med_q;

  void recompute() {
    const std::size_t n = results.size();
    std::vector<double> q;
    for (const auto& r : results) {
      if (r.success) q.push_back(static_cast<double>(r.queries_used));
    }
    asr = n ? static_cast<double>(q.size()) / static_cast<double>(n) : 0.0;
    avg_q.reset();
    med_q.reset();
    if (q.empty()) return;
    double s = 0.0;
    for (double v : q) s += v;
    avg_q = s / static_cast<double>(q.size());
    std::sort(q.begin(), q.end());
    const std::size_t m = q.size();
    med_q = m % 2 ? q[m / 2] : 0.5 * (q[m / 2 - 1] + q[m / 2]);
  }

  /// ASR had the budget been `budget`. Attacks are deterministic and the
  /// budget only truncates them, so a run succeeds under a smaller budget iff
  /// it succeeded within that many queries.
  double asr_at(std::size_t budget) const {
    if (results.empty()) return 0.0;
    std::size_t ok = 0;
    for (const auto& r : results) ok += r.success && r.queries_used <= budget;
    return static_cast<double>(ok) / static_cast<double>(results.size());
  }
};

/// Per-image seed derived from the master seed.
inline std::uint64_t image_seed(std::uint64_t master, std::size_t index) {
  return mix_seed(master, 1000 + index);
}

/// Attacks every image independently and aggregates ASR / Avg.Q / Med.Q.
inline BenchmarkReport run_benchmark(const AttackConfig& cfg,
                                     const std::vector<LabeledImage>& dataset,
                                     const OracleFactory& factory) {
  if (dataset.empty()) throw EmptyDataset("benchmark dataset is empty");
  cfg.validate();
  BenchmarkReport rep;
  rep.config = cfg;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& item = dataset[i];
    AttackConfig c = cfg;
    c.seed = image_seed(cfg.seed, i);
    OracleHandle h(factory(), item.image, item.label.value_or(Label{0}), cfg.max_queries,
                   cfg.trace);
    AttackResult res;
    if (item.label) {
      res = run_attack(h, c);
    } else {
      // The prediction doubles as the initial correctness probe.
      try {
        h.set_label(h.query_label(item.image, 0.0));
        res = run_attack(h, c, true);
      } catch (const OracleUnavailable& e) {
        res.failure_kind = FailureKind::oracle_error;
        res.error = e.what();
        res.final_r = std::numeric_limits<double>::quiet_NaN();
        res.queries_used = h.ledger().total();
      }
    }
    rep.ids.push_back(item.id.empty() ? std::to_string(i) : item.id);
    rep.labels.push_back(h.label());
    rep.results.push_back(std::move(res));
  }
  rep.recompute();
  return rep;
}

}  // namespace dpattack
