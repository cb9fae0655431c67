#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "dpattack/core/errors.hpp"

namespace dpattack {

struct QueryRecord {
  std::size_t index = 0;  // 1-based query number
  double r = std::numeric_limits<double>::quiet_NaN();
  bool adversarial = false;
};

/// Counts delivered label queries and enforces the Max.Q budget.
class QueryLedger {
 public:
  explicit QueryLedger(std::optional<std::size_t> max_queries = std::nullopt,
                       bool tracing = false)
      : max_(max_queries), tracing_(tracing) {}

  std::size_t total() const { return total_; }
  std::optional<std::size_t> max_queries() const { return max_; }
  std::size_t remaining() const {
    return max_ ? (*max_ > total_ ? *max_ - total_ : 0)
                : std::numeric_limits<std::size_t>::max();
  }
  bool exhausted() const { return remaining() == 0; }
  bool tracing() const { return tracing_; }
  const std::vector<QueryRecord>& trace() const { return trace_; }

  void set_max_queries(std::optional<std::size_t> m) { max_ = m; }

  /// Throws BudgetExhausted when no query remains. Called before a query is
  /// sent so that a refused query is never counted.
  void reserve() const {
    if (exhausted()) throw BudgetExhausted("query budget exhausted");
  }

  void record(double r, bool adversarial) {
    ++total_;
    if (tracing_) trace_.push_back({total_, r, adversarial});
  }

 private:
  std::optional<std::size_t> max_;
  bool tracing_ = false;
  std::size_t total_ = 0;
  std::vector<QueryRecord> trace_;
};

}  // namespace dpattack
