#pragma once

#include <cstddef>
#include <vector>

#include "dpattack/oracle/oracle.hpp"

namespace dpattack {

/// Answers queries from a fixed script of adversarial flags, in order. Every
/// probe image seen is kept so that two runs can be compared query by query.
class ScriptedOracle final : public Oracle {
 public:
  /// `adversarial[k]` decides the k-th query; past the end, `tail` is used.
  ScriptedOracle(std::vector<bool> adversarial, Label clean, bool tail = false)
      : script_(std::move(adversarial)), clean_(clean), tail_(tail) {}

  Label predict(const ImageTensor& x) override {
    seen_.push_back(x);
    const bool adv = next_ < script_.size() ? script_[next_] : tail_;
    ++next_;
    return adv ? Label{clean_.value == 0 ? 1 : 0} : clean_;
  }
  int classes() const override { return 2; }
  std::string backend() const override { return "scripted"; }

  const std::vector<ImageTensor>& seen() const { return seen_; }
  std::size_t calls() const { return next_; }

 private:
  std::vector<bool> script_;
  Label clean_;
  bool tail_;
  std::size_t next_ = 0;
  std::vector<ImageTensor> seen_;
};

}  // namespace dpattack
