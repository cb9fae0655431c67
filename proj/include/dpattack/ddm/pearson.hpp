#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include <boost/math/distributions/students_t.hpp>

#include "dpattack/core/errors.hpp"

namespace dpattack {

struct Correlation {
  double r = 0.0;
  double p = 1.0;  // two-sided, t-distribution with n-2 degrees of freedom
};

inline Correlation pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("pearson inputs differ in length");
  const std::size_t n = a.size();
  if (n < 3) throw DegenerateInput("pearson needs at least 3 samples");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateInput("pearson input has zero variance");
  Correlation out;
  out.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  if (std::abs(out.r) >= 1.0) {
    out.p = 0.0;
    return out;
  }
  const double t = out.r * std::sqrt(df / (1.0 - out.r * out.r));
  boost::math::students_t dist(df);
  out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return out;
}

}  // namespace dpattack
