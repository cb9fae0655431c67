#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpattack/core/errors.hpp"

namespace dpattack {

/// Channel/height/width triple of a C×H×W tensor.
struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  constexpr std::size_t size() const { return channels * height * width; }
  constexpr std::size_t plane() const { return height * width; }
  friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" +
         std::to_string(s.width);
}

/// Row-major C×H×W array of reals. Used both for images in [0,1] and for
/// unconstrained intermediate signals (transform coefficients, residuals).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0)
      : shape_(shape), data_(shape.size(), fill) {}
  Tensor(Shape shape, std::vector<double> data)
      : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + to_string(shape_));
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }

  double& operator()(std::size_t c, std::size_t i, std::size_t j) {
    return data_[(c * shape_.height + i) * shape_.width + j];
  }
  double operator()(std::size_t c, std::size_t i, std::size_t j) const {
    return data_[(c * shape_.height + i) * shape_.width + j];
  }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_{};
  std::vector<double> data_;
};

/// An image whose pixels all lie in [0,1].
class ImageTensor {
 public:
  ImageTensor() = default;
  explicit ImageTensor(Tensor t) : t_(std::move(t)) { validate(); }
  ImageTensor(Shape shape, std::vector<double> data)
      : t_(shape, std::move(data)) {
    validate();
  }

  /// Clips every element into [0,1] instead of rejecting out-of-range input.
  static ImageTensor clipped(Tensor t) {
    for (double& v : t.data()) v = std::clamp(v, 0.0, 1.0);
    ImageTensor img;
    img.t_ = std::move(t);
    return img;
  }

  const Tensor& tensor() const { return t_; }
  const Shape& shape() const { return t_.shape(); }
  std::size_t size() const { return t_.size(); }
  std::size_t channels() const { return t_.channels(); }
  std::size_t height() const { return t_.height(); }
  std::size_t width() const { return t_.width(); }
  double operator[](std::size_t k) const { return t_[k]; }
  double operator()(std::size_t c, std::size_t i, std::size_t j) const {
    return t_(c, i, j);
  }
  std::span<const double> data() const { return t_.data(); }

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  void validate() const {
    for (double v : t_.data()) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ShapeError("image pixel outside [0,1]: " + std::to_string(v));
      }
    }
  }

  Tensor t_;
};

/// Vertex of the hypercube {-1,+1}^d.
class Direction {
 public:
  Direction() = default;
  explicit Direction(std::size_t d, std::int8_t fill = 1) : v_(d, fill) {
    check_entry(fill);
  }
  explicit Direction(std::vector<std::int8_t> v) : v_(std::move(v)) {
    for (auto e : v_) check_entry(e);
  }
  Direction(std::initializer_list<int> v) {
    v_.reserve(v.size());
    for (int e : v) {
      check_entry(e);
      v_.push_back(static_cast<std::int8_t>(e));
    }
  }

  std::size_t size() const { return v_.size(); }
  std::int8_t operator[](std::size_t i) const { return v_[i]; }
  void flip(std::size_t i) { v_[i] = static_cast<std::int8_t>(-v_[i]); }
  void set(std::size_t i, int s) {
    check_entry(s);
    v_[i] = static_cast<std::int8_t>(s);
  }
  std::span<const std::int8_t> data() const { return v_; }

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  static void check_entry(int e) {
    if (e != 1 && e != -1) throw ShapeError("direction entries must be +1 or -1");
  }

  std::vector<std::int8_t> v_;
};

/// 0-based class index.
struct Label {
  int value = 0;
  friend constexpr bool operator==(Label, Label) = default;
};

enum class Norm { linf, l2 };

inline Norm parse_norm(std::string_view s) {
  if (s == "linf" || s == "inf") return Norm::linf;
  if (s == "l2" || s == "2") return Norm::l2;
  throw UnsupportedNorm("unsupported norm '" + std::string(s) + "'");
}

inline const char* norm_name(Norm n) { return n == Norm::linf ? "linf" : "l2"; }

/// Entrywise sign with sgn(0) := +1. No epsilon thresholding.
inline Direction sign_with_one(std::span<const double> v) {
  std::vector<std::int8_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] < 0.0 ? -1 : 1;
  return Direction(std::move(out));
}

inline double norm(std::span<const double> x, Norm p) {
  if (p == Norm::linf) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double norm(std::span<const double> x, std::string_view p) {
  return norm(x, parse_norm(p));
}

/// clip(x + r * scale * d, [0,1]). `scale` converts r into the chosen norm
/// geometry (1 for linf, 1/sqrt(d) for l2).
inline ImageTensor apply_direction(const ImageTensor& x, const Direction& d,
                                   double r, double scale = 1.0) {
  if (x.size() != d.size()) {
    throw ShapeError("direction length " + std::to_string(d.size()) +
                     " does not match image size " + std::to_string(x.size()));
  }
  if (r < 0.0) throw ShapeError("perturbation magnitude must be non-negative");
  Tensor out(x.shape());
  const double step = r * scale;
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = std::clamp(x[k] + step * d[k], 0.0, 1.0);
  }
  return ImageTensor::clipped(std::move(out));
}

/// clip(x + step * p, [0,1]) for a continuous probe direction p.
inline ImageTensor apply_perturbation(const ImageTensor& x,
                                      std::span<const double> p, double step) {
  if (x.size() != p.size()) throw ShapeError("perturbation length mismatch");
  Tensor out(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = std::clamp(x[k] + step * p[k], 0.0, 1.0);
  }
  return ImageTensor::clipped(std::move(out));
}

/// Fraction of coordinates on which two directions agree.
inline double agreement(const Direction& a, const Direction& b) {
  if (a.size() != b.size()) throw ShapeError("direction length mismatch");
  if (a.size() == 0) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

/// Normalized inner product d·u/d of two hypercube vertices.
inline double cosine(const Direction& a, const Direction& b) {
  return 2.0 * agreement(a, b) - 1.0;
}

inline std::vector<double> difference(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("tensor shape mismatch");
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

}  // namespace dpattack
