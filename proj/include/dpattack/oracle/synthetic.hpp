#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dpattack/core/tensor.hpp"
#include "dpattack/oracle/builtin_model.hpp"

namespace dpattack {

enum class DatasetKind {
  blobs,     // class-mean images plus pixel noise; linearly separable
  textures,  // oriented gratings, one orientation per class
};

inline DatasetKind parse_dataset_kind(const std::string& s) {
  if (s == "blobs") return DatasetKind::blobs;
  if (s == "textures") return DatasetKind::textures;
  throw FormatError("unknown dataset kind '" + s + "'");
}

struct DatasetSpec {
  DatasetKind kind = DatasetKind::textures;
  Shape shape{1, 16, 16};
  int classes = 4;
  std::size_t per_class = 100;
  double noise = 0.03;
};

struct Sample {
  ImageTensor image;
  Label label;
};

namespace synthetic_detail {

// Smooth class template: a 4×4 grid of random levels, bilinearly upsampled.
inline Tensor smooth_template(const Shape& s, std::mt19937_64& rng) {
  constexpr std::size_t g = 4;
  std::uniform_real_distribution<double> u(0.25, 0.75);
  Tensor out(s);
  for (std::size_t c = 0; c < s.channels; ++c) {
    double grid[g][g];
    for (auto& row : grid)
      for (double& v : row) v = u(rng);
    for (std::size_t i = 0; i < s.height; ++i) {
      const double fy = (g - 1) * (s.height > 1 ? double(i) / (s.height - 1) : 0.0);
      const std::size_t y0 = std::min<std::size_t>(static_cast<std::size_t>(fy), g - 2);
      const double ty = fy - y0;
      for (std::size_t j = 0; j < s.width; ++j) {
        const double fx = (g - 1) * (s.width > 1 ? double(j) / (s.width - 1) : 0.0);
        const std::size_t x0 = std::min<std::size_t>(static_cast<std::size_t>(fx), g - 2);
        const double tx = fx - x0;
        out(c, i, j) = (1 - ty) * ((1 - tx) * grid[y0][x0] + tx * grid[y0][x0 + 1]) +
                       ty * ((1 - tx) * grid[y0 + 1][x0] + tx * grid[y0 + 1][x0 + 1]);
      }
    }
  }
  return out;
}

}  // namespace synthetic_detail

/// Deterministic synthetic image classification set; samples are ordered
/// class-interleaved (0,1,..,M-1,0,1,..).
inline std::vector<Sample> make_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Shape s = spec.shape;

  std::vector<Tensor> templates;
  if (spec.kind == DatasetKind::blobs) {
    // Templates depend only on the class structure, not the sample seed, so
    // train and test splits share class means.
    std::mt19937_64 trng(0x5eedb10bULL + static_cast<std::uint64_t>(spec.classes));
    for (int k = 0; k < spec.classes; ++k) {
      templates.push_back(synthetic_detail::smooth_template(s, trng));
    }
  }

  std::vector<Sample> out;
  out.reserve(spec.per_class * spec.classes);
  for (std::size_t n = 0; n < spec.per_class; ++n) {
    for (int k = 0; k < spec.classes; ++k) {
      Tensor t(s);
      if (spec.kind == DatasetKind::blobs) {
        t = templates[k];
      } else {
        const double theta = std::numbers::pi * k / spec.classes + 0.15 * gauss(rng);
        const double freq = 2.0 * std::numbers::pi / (6.0 + 4.0 * unit(rng));
        const double phase = 2.0 * std::numbers::pi * unit(rng);
        const double contrast = 0.15 + 0.2 * unit(rng);
        const double mean = 0.5 + 0.08 * gauss(rng);
        const double ct = std::cos(theta), st = std::sin(theta);
        for (std::size_t c = 0; c < s.channels; ++c) {
          const double tint = s.channels > 1 ? 0.05 * gauss(rng) : 0.0;
          for (std::size_t i = 0; i < s.height; ++i) {
            for (std::size_t j = 0; j < s.width; ++j) {
              const double proj = ct * double(j) + st * double(i);
              t(c, i, j) = mean + tint + contrast * std::sin(freq * proj + phase);
            }
          }
        }
      }
      for (double& v : t.data()) v += spec.noise * gauss(rng);
      out.push_back({ImageTensor::clipped(std::move(t)), Label{k}});
    }
  }
  return out;
}

struct TrainSpec {
  Architecture architecture = Architecture::mlp;
  DatasetSpec data{};
  int hidden = 32;
  std::size_t epochs = 300;
  double learning_rate = 0.01;
};

struct TrainResult {
  BuiltinModel model;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
};

inline double accuracy(const BuiltinModel& m, const std::vector<Sample>& data) {
  if (data.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& s : data) ok += m.predict(s.image.data()) == s.label;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

/// Full-batch Adam on softmax cross-entropy. Deterministic given `seed`.
inline TrainResult train_builtin(const TrainSpec& spec, std::uint64_t seed) {
  const auto data = make_dataset(spec.data, seed);
  const Shape s = spec.data.shape;
  const std::size_t d = s.size();
  const int M = spec.data.classes;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);

  BuiltinModel m = spec.architecture == Architecture::linear
                       ? BuiltinModel::linear(s, M)
                       : BuiltinModel::mlp(s, spec.hidden, M);
  for (double& w : m.w1()) w = gauss(rng) / std::sqrt(double(d));
  for (double& w : m.w2()) w = gauss(rng) / std::sqrt(double(std::max(1, spec.hidden)));

  std::vector<std::vector<double>*> params = {&m.w1(), &m.b1()};
  if (spec.architecture == Architecture::mlp) {
    params.push_back(&m.w2());
    params.push_back(&m.b2());
  }
  std::vector<std::vector<double>> grads(params.size()), mom(params.size()), var(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    grads[p].assign(params[p]->size(), 0.0);
    mom[p].assign(params[p]->size(), 0.0);
    var[p].assign(params[p]->size(), 0.0);
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const int H = spec.hidden;
  double loss = 0.0;

  for (std::size_t epoch = 1; epoch <= spec.epochs; ++epoch) {
    for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
    loss = 0.0;
    for (const auto& sample : data) {
      const auto x = sample.image.data();
      const int y = sample.label.value;
      if (spec.architecture == Architecture::linear) {
        auto p = BuiltinModel::softmax(m.logits(x));
        loss -= std::log(std::max(p[y], 1e-300));
        p[y] -= 1.0;
        for (int k = 0; k < M; ++k) {
          double* gw = &grads[0][static_cast<std::size_t>(k) * d];
          for (std::size_t i = 0; i < d; ++i) gw[i] += p[k] * x[i];
          grads[1][k] += p[k];
        }
      } else {
        const auto h = m.hidden_activations(x);
        std::vector<double> z(M);
        for (int k = 0; k < M; ++k) {
          double acc = m.b2()[k];
          for (int u = 0; u < H; ++u) acc += m.w2()[static_cast<std::size_t>(k) * H + u] * h[u];
          z[k] = acc;
        }
        auto p = BuiltinModel::softmax(z);
        loss -= std::log(std::max(p[y], 1e-300));
        p[y] -= 1.0;
        std::vector<double> da(H, 0.0);
        for (int k = 0; k < M; ++k) {
          for (int u = 0; u < H; ++u) {
            grads[2][static_cast<std::size_t>(k) * H + u] += p[k] * h[u];
            da[u] += p[k] * m.w2()[static_cast<std::size_t>(k) * H + u];
          }
          grads[3][k] += p[k];
        }
        for (int u = 0; u < H; ++u) {
          const double g = da[u] * (1.0 - h[u] * h[u]);
          double* gw = &grads[0][static_cast<std::size_t>(u) * d];
          for (std::size_t i = 0; i < d; ++i) gw[i] += g * x[i];
          grads[1][u] += g;
        }
      }
    }
    const double n = static_cast<double>(data.size());
    loss /= n;
    if (!std::isfinite(loss)) {
      throw TrainingFailed("training diverged at epoch " + std::to_string(epoch));
    }
    const double c1 = 1.0 - std::pow(b1, double(epoch));
    const double c2 = 1.0 - std::pow(b2, double(epoch));
    for (std::size_t p = 0; p < params.size(); ++p) {
      auto& w = *params[p];
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double g = grads[p][i] / n;
        mom[p][i] = b1 * mom[p][i] + (1 - b1) * g;
        var[p][i] = b2 * var[p][i] + (1 - b2) * g * g;
        w[i] -= spec.learning_rate * (mom[p][i] / c1) / (std::sqrt(var[p][i] / c2) + eps);
      }
    }
  }
  TrainResult r{std::move(m), 0.0, loss};
  r.train_accuracy = accuracy(r.model, data);
  return r;
}

}  // namespace dpattack
