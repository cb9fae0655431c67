#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpattack/ddm/bilisearch.hpp"
#include "dpattack/ddm/dbs.hpp"
#include "dpattack/ddm/directions.hpp"
#include "dpattack/ddm/freq_stats.hpp"
#include "dpattack/driver/config.hpp"
#include "dpattack/oracle/oracle.hpp"
#include "dpattack/search/engines.hpp"
#include "dpattack/search/prober.hpp"

namespace dpattack {

enum class FailureKind { none, budget, init, oracle_error };

inline const char* failure_name(FailureKind f) {
  switch (f) {
    case FailureKind::none: return "none";
    case FailureKind::budget: return "budget";
    case FailureKind::init: return "init";
    case FailureKind::oracle_error: return "oracle-error";
  }
  return "?";
}

inline FailureKind parse_failure_kind(const std::string& s) {
  if (s == "none") return FailureKind::none;
  if (s == "budget") return FailureKind::budget;
  if (s == "init") return FailureKind::init;
  if (s == "oracle-error") return FailureKind::oracle_error;
  throw FormatError("unknown failure kind '" + s + "'");
}

struct AttackResult {
  bool success = false;
  std::size_t queries_used = 0;
  double final_r = 0.0;  // NaN when no adversarial magnitude was ever confirmed
  std::optional<ImageTensor> adv_image;
  std::vector<QueryRecord> trace;
  FailureKind failure_kind = FailureKind::none;
  std::string error;  // operational error text for oracle-error
  std::size_t block_size = 0;
  std::string init_choice;  // "dn", "phi_dr" or "" for baselines
  double init_r = 0.0;
  std::vector<double> r_history;
  SearchTrace search_trace;
};

/// Split-mix step for per-stage seed derivation.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace attack_detail {

inline std::vector<std::size_t> usable_block_sizes(const AttackConfig& cfg, const Shape& s) {
  std::vector<std::size_t> out;
  for (std::size_t w : cfg.block_sizes) {
    if (w >= 1 && w <= std::min(s.height, s.width)) out.push_back(w);
  }
  if (out.empty()) throw BlockSizeError("no candidate block size fits " + to_string(s));
  return out;
}

inline void finish(AttackResult& res, const SearchState& st, const OracleHandle& h,
                   const AttackConfig& cfg) {
  res.final_r = st.confirmed ? st.r : std::numeric_limits<double>::quiet_NaN();
  res.r_history = st.r_history;
  if (st.confirmed && st.r <= cfg.eps) {
    res.success = true;
    res.failure_kind = FailureKind::none;
    res.adv_image = st.witness;
  } else if (res.failure_kind == FailureKind::none) {
    res.failure_kind = FailureKind::budget;
  }
  res.queries_used = h.ledger().total();
}

/// Initial correctness probe. Returns true when x is already misclassified.
inline bool already_adversarial(OracleHandle& h, AttackResult& res) {
  if (h.is_adversarial(h.clean(), 0.0)) {
    res.success = true;
    res.final_r = 0.0;
    res.adv_image = h.clean();
    res.queries_used = h.ledger().total();
    return true;
  }
  return false;
}

}  // namespace attack_detail

/// Full pipeline: block-size selection over frequency-prior directions,
/// BiLiSearch against the low-frequency colour-square direction, then
/// pattern-driven search until r <= eps or the budget runs out.
inline AttackResult dpattack(OracleHandle& h, const AttackConfig& cfg,
                             bool clean_probed = false) {
  cfg.validate();
  h.ledger().set_max_queries(cfg.max_queries);
  AttackResult res;
  Prober p(h, cfg.norm, cfg.evade_sigma, mix_seed(cfg.seed, 99));
  p.attach_trace(&res.search_trace);
  const ImageTensor& x = h.clean();
  SearchOptions sopt{cfg.eps, cfg.tol, cfg.lambda};
  SearchState st;
  try {
    if (!clean_probed && attack_detail::already_adversarial(h, res)) {
      if (cfg.trace) res.trace = h.ledger().trace();
      return res;
    }
    const auto sizes = attack_detail::usable_block_sizes(cfg, x.shape());
    std::vector<DbsCandidate> cands;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const auto stats = compute_freq_stats(x, sizes[k], cfg.stats_space);
      cands.push_back({sizes[k], sample_dn(x, stats, mix_seed(cfg.seed, 10 + k))});
    }

    std::size_t w = sizes.front();
    Direction dn = cands.front().direction;
    double r = p.r_max();
    std::optional<ImageTensor> dn_witness;
    if (cfg.mode == InitMode::dyn) {
      auto sel = dbs(p, cands, default_dbs_queries(cands.size(), cfg.k_max), cfg.k_max,
                     mix_seed(cfg.seed, 1));
      w = sel.block_size;
      dn = sel.direction;
      r = sel.r;
      if (sel.confirmed) dn_witness = sel.witness;
      if (p.remaining() == 0) throw BudgetExhausted("budget spent during block-size selection");
    }
    res.block_size = w;
    const Direction da = lowfreq_wrap(x, BaseDirection::dr, w, mix_seed(cfg.seed, 2),
                                      cfg.stats_space);

    BiliResult init;
    try {
      init = bilisearch(p, dn, da, r, {}, dn_witness);
      res.init_choice = init.chosen == 0 ? "dn" : "phi_dr";
    } catch (const InitFailed&) {
      // One retry from the largest magnitude with the roles swapped.
      try {
        init = bilisearch(p, da, dn, p.r_max());
        res.init_choice = init.chosen == 0 ? "phi_dr" : "dn";
      } catch (const InitFailed&) {
        res.failure_kind = FailureKind::init;
        res.final_r = std::numeric_limits<double>::quiet_NaN();
        res.queries_used = h.ledger().total();
        if (cfg.trace) res.trace = h.ledger().trace();
        return res;
      }
    }
    res.init_r = init.r;
    st = SearchState::start(init.direction, init.r, true, init.witness);
    st.r_history.push_back(st.r);
    if (st.r > cfg.eps) st = pdo_run(p, std::move(st), p.remaining(), sopt);
    attack_detail::finish(res, st, h, cfg);
  } catch (const BudgetExhausted&) {
    res.failure_kind = FailureKind::budget;
    attack_detail::finish(res, st, h, cfg);
  } catch (const OracleUnavailable& e) {
    res.success = false;
    res.failure_kind = FailureKind::oracle_error;
    res.error = e.what();
    res.adv_image.reset();
    res.final_r = std::numeric_limits<double>::quiet_NaN();
    res.queries_used = h.ledger().total();
  }
  if (cfg.trace) res.trace = h.ledger().trace();
  return res;
}

/// Reimplemented baselines from the all-ones direction. ADBA starts at
/// r = r_max without a boundary search; the ray searches bisect g(d0) first.
inline AttackResult run_baseline(OracleHandle& h, const AttackConfig& cfg,
                                 bool clean_probed = false) {
  cfg.validate();
  h.ledger().set_max_queries(cfg.max_queries);
  AttackResult res;
  Prober p(h, cfg.norm, cfg.evade_sigma, mix_seed(cfg.seed, 99));
  p.attach_trace(&res.search_trace);
  SearchOptions sopt{cfg.eps, cfg.tol, cfg.lambda};
  SearchState st = SearchState::start(Direction(h.clean().size()), p.r_max());
  try {
    if (!clean_probed && attack_detail::already_adversarial(h, res)) {
      if (cfg.trace) res.trace = h.ledger().trace();
      return res;
    }
    switch (cfg.method) {
      case Method::adba: st = adba_run(p, std::move(st), p.remaining(), sopt); break;
      case Method::hrays: st = hrays_run(p, std::move(st), p.remaining(), sopt); break;
      case Method::nrays: st = nrays_run(p, std::move(st), p.remaining(), sopt); break;
      case Method::dpattack: throw FormatError("dpattack is not a baseline");
    }
    if (!st.confirmed && !st.budget_exhausted) res.failure_kind = FailureKind::init;
    attack_detail::finish(res, st, h, cfg);
  } catch (const OracleUnavailable& e) {
    res.failure_kind = FailureKind::oracle_error;
    res.error = e.what();
    res.final_r = std::numeric_limits<double>::quiet_NaN();
    res.queries_used = h.ledger().total();
  }
  if (cfg.trace) res.trace = h.ledger().trace();
  return res;
}

/// `clean_probed`: the caller already spent the initial query on x (for
/// instance to obtain y) and x is known to be classified as y.
inline AttackResult run_attack(OracleHandle& h, const AttackConfig& cfg,
                               bool clean_probed = false) {
  return cfg.method == Method::dpattack ? dpattack(h, cfg, clean_probed)
                                        : run_baseline(h, cfg, clean_probed);
}

}  // namespace dpattack
