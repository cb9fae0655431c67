#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include <json.hpp>

#include "dpattack/core/errors.hpp"

namespace dpattack {

struct McReport {
  std::string check;
  std::size_t trials = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double target = 0.0;  // bound or exact target, per check
  double slack = 0.0;   // allowed deviation used by the pass rule
  bool pass = false;
  nlohmann::json detail = nlohmann::json::object();

  nlohmann::json to_json() const {
    return nlohmann::json{{"check", check},   {"trials", trials}, {"estimate", estimate},
                          {"stderr", stderr_}, {"target", target}, {"slack", slack},
                          {"pass", pass},      {"detail", detail}};
  }
};

/// Tail of the projection of a unit vector u onto a uniform hypercube
/// direction: estimates P(u . d/sqrt(d) >= zeta) and checks it against
/// exp(-zeta^2 d / 2) + 3 stderr. `m` unit vectors are drawn and the trials
/// are split evenly among them.
inline McReport mc_hoeffding(std::size_t d, double zeta, std::size_t m, std::size_t trials,
                             std::uint64_t seed) {
  if (d < 1) throw ShapeError("dimension must be positive");
  if (!(zeta > 0.0 && zeta <= 1.0)) throw ShapeError("zeta must lie in (0, 1]");
  m = std::max<std::size_t>(m, 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> u(d);
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  std::size_t hits = 0, done = 0;
  for (std::size_t k = 0; k < m; ++k) {
    double n2 = 0.0;
    for (double& v : u) {
      v = gauss(rng);
      n2 += v * v;
    }
    const double n = std::sqrt(n2);
    for (double& v : u) v /= n;
    const std::size_t share = trials / m + (k < trials % m ? 1 : 0);
    for (std::size_t t = 0; t < share; ++t, ++done) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += coin(rng) ? u[i] : -u[i];
      hits += dot * inv >= zeta;
    }
  }
  McReport r;
  r.check = "hoeffding";
  r.trials = done;
  r.estimate = done ? static_cast<double>(hits) / static_cast<double>(done) : 0.0;
  r.stderr_ = done ? std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(done)) : 0.0;
  r.target = std::exp(-zeta * zeta * static_cast<double>(d) / 2.0);
  r.slack = 3.0 * r.stderr_;
  r.pass = r.estimate <= r.target + r.slack;
  r.detail = {{"d", d}, {"zeta", zeta}, {"unit_vectors", m}};
  return r;
}

/// E[sgn X sgn Y] for standard bivariate normal pairs with correlation rho,
/// against (2/pi) arcsin(rho) with tolerance 4/sqrt(n).
inline McReport mc_arcsine(double rho, std::size_t n, std::uint64_t seed) {
  if (!(rho > -1.0 && rho < 1.0)) throw ShapeError("rho must lie in (-1, 1)");
  if (n == 0) throw ShapeError("sample count must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double c = std::sqrt(1.0 - rho * rho);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = gauss(rng);
    const double y = rho * x + c * gauss(rng);
    sum += (x >= 0.0) == (y >= 0.0) ? 1.0 : -1.0;
  }
  McReport r;
  r.check = "arcsine";
  r.trials = n;
  r.estimate = sum / static_cast<double>(n);
  r.stderr_ = std::sqrt(std::max(0.0, 1.0 - r.estimate * r.estimate) / static_cast<double>(n));
  r.target = 2.0 / std::numbers::pi * std::asin(rho);
  r.slack = 4.0 / std::sqrt(static_cast<double>(n));
  r.pass = std::abs(r.estimate - r.target) <= r.slack;
  r.detail = {{"rho", rho}};
  return r;
}

}  // namespace dpattack
