#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dpattack/core/tensor.hpp"
#include "dpattack/oracle/oracle.hpp"

namespace dpattack {

enum class Architecture { linear, mlp };

inline const char* architecture_name(Architecture a) {
  return a == Architecture::linear ? "linear" : "mlp";
}

inline Architecture parse_architecture(const std::string& s) {
  if (s == "linear") return Architecture::linear;
  if (s == "mlp") return Architecture::mlp;
  throw FormatError("unknown architecture '" + s + "'");
}

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Small differentiable classifier used as a desk-scale victim.
///
/// linear: logits = W x + b, W is M×d.
/// mlp:    logits = W2 tanh(W1 x + b1) + b2, W1 is H×d, W2 is M×H.
///
/// Loss is softmax cross-entropy; gradients w.r.t. the input are exact.
class BuiltinModel {
 public:
  BuiltinModel() = default;

  static BuiltinModel linear(Shape input, int classes) {
    BuiltinModel m;
    m.arch_ = Architecture::linear;
    m.input_ = input;
    m.classes_ = classes;
    m.w1_.assign(static_cast<std::size_t>(classes) * input.size(), 0.0);
    m.b1_.assign(classes, 0.0);
    return m;
  }

  static BuiltinModel mlp(Shape input, int hidden, int classes) {
    BuiltinModel m;
    m.arch_ = Architecture::mlp;
    m.input_ = input;
    m.classes_ = classes;
    m.hidden_ = hidden;
    m.w1_.assign(static_cast<std::size_t>(hidden) * input.size(), 0.0);
    m.b1_.assign(hidden, 0.0);
    m.w2_.assign(static_cast<std::size_t>(classes) * hidden, 0.0);
    m.b2_.assign(classes, 0.0);
    return m;
  }

  Architecture architecture() const { return arch_; }
  const Shape& input_shape() const { return input_; }
  std::size_t dim() const { return input_.size(); }
  int classes() const { return classes_; }
  int hidden() const { return hidden_; }

  // Raw parameter access; layout documented on the class.
  std::vector<double>& w1() { return w1_; }
  std::vector<double>& b1() { return b1_; }
  std::vector<double>& w2() { return w2_; }
  std::vector<double>& b2() { return b2_; }
  const std::vector<double>& w1() const { return w1_; }
  const std::vector<double>& b1() const { return b1_; }
  const std::vector<double>& w2() const { return w2_; }
  const std::vector<double>& b2() const { return b2_; }

  std::vector<double> logits(std::span<const double> x) const {
    check_input(x.size());
    if (arch_ == Architecture::linear) return affine(w1_, b1_, x, classes_);
    auto h = hidden_activations(x);
    return affine(w2_, b2_, h, classes_);
  }

  Label predict(std::span<const double> x) const {
    const auto z = logits(x);
    return Label{static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin())};
  }

  static std::vector<double> softmax(const std::vector<double>& z) {
    const double mx = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double s = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) s += p[k] = std::exp(z[k] - mx);
    for (double& v : p) v /= s;
    return p;
  }

  double loss(std::span<const double> x, Label y) const {
    const auto z = logits(x);
    const double mx = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    return mx + std::log(s) - z[y.value];
  }

  LossGrad loss_and_grad(std::span<const double> x, Label y) const {
    check_input(x.size());
    check_label(y);
    const std::size_t d = dim();
    LossGrad out;
    out.grad.assign(d, 0.0);
    if (arch_ == Architecture::linear) {
      const auto z = affine(w1_, b1_, x, classes_);
      auto p = softmax(z);
      p[y.value] -= 1.0;
      for (int k = 0; k < classes_; ++k) {
        const double* row = &w1_[static_cast<std::size_t>(k) * d];
        for (std::size_t i = 0; i < d; ++i) out.grad[i] += p[k] * row[i];
      }
      out.loss = loss(x, y);
      return out;
    }
    const auto h = hidden_activations(x);
    const auto z = affine(w2_, b2_, h, classes_);
    auto p = softmax(z);
    out.loss = loss(x, y);
    p[y.value] -= 1.0;
    std::vector<double> da(hidden_, 0.0);
    for (int k = 0; k < classes_; ++k) {
      const double* row = &w2_[static_cast<std::size_t>(k) * hidden_];
      for (int u = 0; u < hidden_; ++u) da[u] += p[k] * row[u];
    }
    for (int u = 0; u < hidden_; ++u) {
      da[u] *= 1.0 - h[u] * h[u];
      const double* row = &w1_[static_cast<std::size_t>(u) * d];
      for (std::size_t i = 0; i < d; ++i) out.grad[i] += da[u] * row[i];
    }
    return out;
  }

  std::vector<double> hidden_activations(std::span<const double> x) const {
    auto a = affine(w1_, b1_, x, hidden_);
    for (double& v : a) v = std::tanh(v);
    return a;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["architecture"] = architecture_name(arch_);
    j["shape"] = {input_.channels, input_.height, input_.width};
    j["classes"] = classes_;
    if (arch_ == Architecture::mlp) j["hidden"] = hidden_;
    j["w1"] = w1_;
    j["b1"] = b1_;
    if (arch_ == Architecture::mlp) {
      j["w2"] = w2_;
      j["b2"] = b2_;
    }
    return j;
  }

  static BuiltinModel from_json(const nlohmann::json& j) {
    const auto shape = j.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 3) throw FormatError("model shape must be [C,H,W]");
    const Shape s{shape[0], shape[1], shape[2]};
    const int classes = j.at("classes").get<int>();
    BuiltinModel m = parse_architecture(j.at("architecture").get<std::string>()) ==
                             Architecture::linear
                         ? linear(s, classes)
                         : mlp(s, j.at("hidden").get<int>(), classes);
    auto load = [&](const char* key, std::vector<double>& dst) {
      auto v = j.at(key).get<std::vector<double>>();
      if (v.size() != dst.size()) {
        throw FormatError(std::string("model parameter '") + key + "' has wrong length");
      }
      dst = std::move(v);
    };
    load("w1", m.w1_);
    load("b1", m.b1_);
    if (m.arch_ == Architecture::mlp) {
      load("w2", m.w2_);
      load("b2", m.b2_);
    }
    return m;
  }

  void save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw WriteError("cannot open " + path);
    f << to_json().dump();
    if (!f) throw WriteError("failed writing " + path);
  }

  static BuiltinModel load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open model file " + path);
    return from_json(nlohmann::json::parse(f));
  }

 private:
  void check_input(std::size_t n) const {
    if (n != dim()) {
      throw ShapeError("model expects " + std::to_string(dim()) + " inputs, got " +
                       std::to_string(n));
    }
  }
  void check_label(Label y) const {
    if (y.value < 0 || y.value >= classes_) throw ShapeError("label out of range");
  }

  static std::vector<double> affine(const std::vector<double>& w,
                                    const std::vector<double>& b,
                                    std::span<const double> x, int rows) {
    std::vector<double> out(rows);
    const std::size_t d = x.size();
    for (int k = 0; k < rows; ++k) {
      const double* row = &w[static_cast<std::size_t>(k) * d];
      double s = b[k];
      for (std::size_t i = 0; i < d; ++i) s += row[i] * x[i];
      out[k] = s;
    }
    return out;
  }

  Architecture arch_ = Architecture::linear;
  Shape input_{};
  int classes_ = 0;
  int hidden_ = 0;
  std::vector<double> w1_, b1_, w2_, b2_;
};

/// Hard-label oracle backed by a builtin model.
class BuiltinOracle final : public Oracle {
 public:
  explicit BuiltinOracle(std::shared_ptr<const BuiltinModel> model)
      : model_(std::move(model)) {}
  explicit BuiltinOracle(BuiltinModel model)
      : model_(std::make_shared<const BuiltinModel>(std::move(model))) {}

  Label predict(const ImageTensor& x) override { return model_->predict(x.data()); }
  int classes() const override { return model_->classes(); }
  std::string backend() const override { return "builtin"; }
  const BuiltinModel& model() const { return *model_; }
  std::shared_ptr<const BuiltinModel> shared_model() const { return model_; }

 private:
  std::shared_ptr<const BuiltinModel> model_;
};

/// Loss and input gradient through an oracle; only builtin backends expose them.
inline LossGrad loss_and_grad(const Oracle& oracle, const ImageTensor& x, Label y) {
  const auto* b = dynamic_cast<const BuiltinOracle*>(&oracle);
  if (b == nullptr) {
    throw CapabilityError("loss/gradient access requires a builtin backend, got " +
                          oracle.backend());
  }
  return b->model().loss_and_grad(x.data(), y);
}

inline LossGrad loss_and_grad(const BuiltinModel& m, const ImageTensor& x, Label y) {
  return m.loss_and_grad(x.data(), y);
}

}  // namespace dpattack
