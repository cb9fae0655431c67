#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "dpattack/core/tensor.hpp"
#include "dpattack/oracle/ledger.hpp"

namespace dpattack {

/// Hard-label backend: maps an image to its top-1 class and nothing else.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual Label predict(const ImageTensor& x) = 0;
  virtual int classes() const = 0;
  virtual std::string backend() const = 0;
};

/// Wraps an arbitrary labelling function. Used for analytic and scripted
/// oracles in tests and simulations.
class FunctionOracle final : public Oracle {
 public:
  using Fn = std::function<Label(const ImageTensor&)>;
  FunctionOracle(Fn fn, int classes) : fn_(std::move(fn)), classes_(classes) {}
  Label predict(const ImageTensor& x) override { return fn_(x); }
  int classes() const override { return classes_; }
  std::string backend() const override { return "function"; }

 private:
  Fn fn_;
  int classes_;
};

/// Per-attack view of an oracle: binds the clean target (x, y) and accounts
/// for every delivered query. Exposes labels only.
class OracleHandle {
 public:
  OracleHandle(std::shared_ptr<Oracle> backend, ImageTensor x, Label y,
               std::optional<std::size_t> max_queries = std::nullopt,
               bool tracing = false)
      : backend_(std::move(backend)),
        x_(std::move(x)),
        y_(y),
        ledger_(max_queries, tracing) {}

  OracleHandle(const OracleHandle&) = delete;
  OracleHandle& operator=(const OracleHandle&) = delete;
  OracleHandle(OracleHandle&&) = default;

  const ImageTensor& clean() const { return x_; }
  Label label() const { return y_; }
  void set_label(Label y) { y_ = y; }
  const QueryLedger& ledger() const { return ledger_; }
  QueryLedger& ledger() { return ledger_; }
  int classes() const { return backend_->classes(); }

  Label query_label(const ImageTensor& x,
                    double r = std::numeric_limits<double>::quiet_NaN()) {
    ledger_.reserve();
    const Label l = backend_->predict(x);
    ledger_.record(r, l != y_);
    return l;
  }

  bool is_adversarial(const ImageTensor& x,
                      double r = std::numeric_limits<double>::quiet_NaN()) {
    return query_label(x, r) != y_;
  }

 private:
  std::shared_ptr<Oracle> backend_;
  ImageTensor x_;
  Label y_;
  QueryLedger ledger_;
};

}  // namespace dpattack
