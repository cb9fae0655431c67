#pragma once

#include <memory>
#include <random>
#include <vector>

#include "dpattack/dpattack.hpp"
#include "dpattack/oracle/builtin_model.hpp"

namespace dpattack::testing {

inline ImageTensor random_image(const Shape& s, std::mt19937_64& rng, double lo = 0.0,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(s.size());
  for (double& e : v) e = u(rng);
  return ImageTensor(s, std::move(v));
}

inline Direction random_direction(std::size_t d, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::int8_t> v(d);
  for (auto& e : v) e = coin(rng) ? 1 : -1;
  return Direction(std::move(v));
}

inline Direction from_ints(const std::vector<int>& v) {
  std::vector<std::int8_t> out(v.begin(), v.end());
  return Direction(std::move(out));
}

/// Two-class linear model: class 1 iff w.x + b > 0.
inline BuiltinModel two_class_linear(const Shape& s, const std::vector<double>& w, double b) {
  BuiltinModel m = BuiltinModel::linear(s, 2);
  std::copy(w.begin(), w.end(), m.w1().begin() + static_cast<std::ptrdiff_t>(s.size()));
  m.b1()[1] = b;
  return m;
}

/// Linear victim around x whose boundary along d sits exactly at r_star with
/// no clipping before it: every coordinate pushes the margin the same way.
struct LinearCrossing {
  ImageTensor x;
  Direction d;
  double r_star;
  std::shared_ptr<BuiltinOracle> oracle;
};

inline LinearCrossing linear_crossing(const Shape& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.2, 1.0), rs(0.05, 0.29);
  LinearCrossing c;
  c.x = random_image(s, rng, 0.3, 0.7);
  c.d = random_direction(s.size(), rng);
  c.r_star = rs(rng);
  std::vector<double> w(s.size());
  double wx = 0.0, wd = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = mag(rng) * c.d[i];
    wx += w[i] * c.x[i];
    wd += w[i] * c.d[i];
  }
  c.oracle = std::make_shared<BuiltinOracle>(two_class_linear(s, w, -wx - c.r_star * wd));
  return c;
}

inline std::vector<bool> random_script(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<bool> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = coin(rng);
  return s;
}

}  // namespace dpattack::testing
