#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dpattack/core/tensor.hpp"
#include "dpattack/oracle/oracle.hpp"
#include "dpattack/search/trace.hpp"

namespace dpattack {

/// clip(d + xi, -1, 1) with xi ~ N(0, sigma^2 I).
template <class Rng>
std::vector<double> randomize_probe(const Direction& d, double sigma, Rng& rng) {
  if (sigma < 0.0) throw ShapeError("sigma must be non-negative");
  std::vector<double> p(d.size());
  if (sigma == 0.0) {
    for (std::size_t i = 0; i < d.size(); ++i) p[i] = d[i];
    return p;
  }
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t i = 0; i < d.size(); ++i) {
    p[i] = std::clamp(d[i] + noise(rng), -1.0, 1.0);
  }
  return p;
}

inline std::vector<double> randomize_probe(const Direction& d, double sigma,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return randomize_probe(d, sigma, rng);
}

struct ProbeResult {
  bool adversarial = false;
  ImageTensor image;  // exact image the oracle saw
};

/// Turns (direction, magnitude) pairs into oracle queries. Owns the norm
/// geometry, the optional evasion noise and the per-engine query limit.
///
/// linf: x' = clip(x + r d);        r ranges over [0, 1]
/// l2:   x' = clip(x + r d/sqrt(d)); r ranges over [0, sqrt(d)]
class Prober {
 public:
  Prober(OracleHandle& handle, Norm norm = Norm::linf,
         std::optional<double> evade_sigma = std::nullopt, std::uint64_t seed = 0)
      : h_(handle), norm_(norm), sigma_(evade_sigma), rng_(seed) {
    const double d = static_cast<double>(handle.clean().size());
    scale_ = norm == Norm::linf ? 1.0 : 1.0 / std::sqrt(d);
    r_max_ = norm == Norm::linf ? 1.0 : std::sqrt(d);
  }

  OracleHandle& handle() { return h_; }
  const ImageTensor& clean() const { return h_.clean(); }
  std::size_t dim() const { return h_.clean().size(); }
  Norm norm() const { return norm_; }
  double scale() const { return scale_; }
  double r_max() const { return r_max_; }
  std::size_t queries() const { return h_.ledger().total(); }

  /// Caps further queries at ledger total `limit` (in addition to Max.Q).
  void set_limit(std::optional<std::size_t> limit) { limit_ = limit; }
  std::optional<std::size_t> limit() const { return limit_; }
  std::size_t remaining() const {
    std::size_t rem = h_.ledger().remaining();
    if (limit_) rem = std::min(rem, *limit_ > queries() ? *limit_ - queries() : 0);
    return rem;
  }

  void attach_trace(SearchTrace* t) { trace_ = t; }
  SearchTrace* trace() { return trace_; }
  void set_context(std::string phase, int level) {
    phase_ = std::move(phase);
    level_ = level;
  }

  /// Image without evasion noise.
  ImageTensor image(const Direction& d, double r) const {
    return apply_direction(h_.clean(), d, r, scale_);
  }

  ProbeResult probe(const Direction& d, double r) {
    if (remaining() == 0) throw BudgetExhausted("search query budget exhausted");
    ImageTensor img = sigma_ ? apply_perturbation(h_.clean(),
                                                  randomize_probe(d, *sigma_, rng_),
                                                  r * scale_)
                             : image(d, r);
    const bool adv = h_.is_adversarial(img, r);
    if (trace_) trace_->push({queries(), r, adv, phase_, {}, false, level_});
    return {adv, std::move(img)};
  }

  bool is_adversarial(const Direction& d, double r) { return probe(d, r).adversarial; }

 private:
  OracleHandle& h_;
  Norm norm_;
  std::optional<double> sigma_;
  std::mt19937_64 rng_;
  double scale_ = 1.0;
  double r_max_ = 1.0;
  std::optional<std::size_t> limit_;
  SearchTrace* trace_ = nullptr;
  std::string phase_ = "probe";
  int level_ = 0;
};

/// Sets a per-engine query allowance for the lifetime of the guard.
class ProbeBudget {
 public:
  ProbeBudget(Prober& p, std::optional<std::size_t> budget) : p_(p), saved_(p.limit()) {
    if (budget) {
      std::size_t lim = p.queries() + *budget;
      if (saved_) lim = std::min(lim, *saved_);
      p.set_limit(lim);
    }
  }
  ~ProbeBudget() { p_.set_limit(saved_); }
  ProbeBudget(const ProbeBudget&) = delete;
  ProbeBudget& operator=(const ProbeBudget&) = delete;

 private:
  Prober& p_;
  std::optional<std::size_t> saved_;
};

}  // namespace dpattack
