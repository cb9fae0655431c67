#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpattack/core/tensor.hpp"
#include "dpattack/ddm/freq_stats.hpp"
#include "dpattack/search/lambda.hpp"

namespace dpattack {

enum class InitMode { opt, dyn };

inline InitMode parse_init_mode(const std::string& s) {
  if (s == "opt") return InitMode::opt;
  if (s == "dyn") return InitMode::dyn;
  throw FormatError("unknown mode '" + s + "'");
}

inline const char* mode_name(InitMode m) { return m == InitMode::opt ? "opt" : "dyn"; }

enum class Method { dpattack, adba, hrays, nrays };

inline Method parse_method(const std::string& s) {
  if (s == "dpattack") return Method::dpattack;
  if (s == "adba") return Method::adba;
  if (s == "hrays") return Method::hrays;
  if (s == "nrays") return Method::nrays;
  throw FormatError("unknown method '" + s + "'");
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::dpattack: return "dpattack";
    case Method::adba: return "adba";
    case Method::hrays: return "hrays";
    case Method::nrays: return "nrays";
  }
  return "?";
}

struct AttackConfig {
  Method method = Method::dpattack;
  Norm norm = Norm::linf;
  double eps = 0.05;
  std::size_t max_queries = 500;
  InitMode mode = InitMode::dyn;
  std::vector<std::size_t> block_sizes{4, 8, 16, 32};
  std::uint64_t seed = 0;
  LambdaOptions lambda{};
  std::optional<double> evade_sigma;
  std::size_t k_max = 5;
  double tol = 1e-3;  // bisection precision of the ray-search baselines
  StatsSpace stats_space = StatsSpace::ycbcr;
  bool trace = false;

  void validate() const {
    if (!(eps > 0.0)) throw FormatError("eps must be positive");
    if (max_queries < 1) throw FormatError("max_queries must be at least 1");
    if (block_sizes.empty()) throw FormatError("at least one block size is required");
    if (mode == InitMode::opt && block_sizes.size() != 1) {
      throw FormatError("opt mode takes exactly one block size");
    }
    if (evade_sigma && *evade_sigma < 0.0) throw FormatError("evade sigma must be >= 0");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["method"] = method_name(method);
    j["norm"] = norm_name(norm);
    j["eps"] = eps;
    j["max_queries"] = max_queries;
    j["mode"] = mode_name(mode);
    j["block_sizes"] = block_sizes;
    j["seed"] = seed;
    j["lambda_beta"] = lambda.beta;
    j["lambda_steps"] = lambda.steps;
    j["evade_sigma"] = evade_sigma ? nlohmann::json(*evade_sigma) : nlohmann::json(nullptr);
    j["k_max"] = k_max;
    j["tol"] = tol;
    j["stats_space"] = stats_space == StatsSpace::ycbcr ? "ycbcr" : "rgb";
    j["trace"] = trace;
    return j;
  }
};

}  // namespace dpattack
