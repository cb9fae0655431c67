#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dpattack/core/tensor.hpp"
#include "dpattack/oracle/oracle.hpp"

namespace dpattack {

struct HealthInfo {
  std::string status;
  int classes = 0;
  Shape shape{};
};

/// Client for the remote hard-label wire protocol:
///   POST /v1/predict  {"shape":[C,H,W],"data":[...]} -> {"label": k}
///   GET  /v1/health   -> {"status":"ok","classes":M,"shape":[C,H,W]}
///
/// Transport failures and 5xx responses are retried (3 retries, exponential
/// backoff). Retries are invisible to the query ledger.
class HttpOracle final : public Oracle {
 public:
  explicit HttpOracle(std::string base_url, int timeout_ms = timeout_from_env(),
                      int retries = 3, int backoff_ms = 50)
      : url_(std::move(base_url)),
        client_(url_),
        timeout_ms_(timeout_ms),
        retries_(retries),
        backoff_ms_(backoff_ms) {
    const auto t = std::chrono::milliseconds(timeout_ms_);
    client_.set_connection_timeout(t);
    client_.set_read_timeout(t);
    client_.set_write_timeout(t);
  }

  static int timeout_from_env() {
    if (const char* v = std::getenv("ORACLE_TIMEOUT_MS")) {
      try {
        return std::max(1, std::stoi(v));
      } catch (const std::exception&) {
      }
    }
    return 10000;
  }

  static std::string encode_request(const ImageTensor& x) {
    nlohmann::json j;
    j["shape"] = {x.channels(), x.height(), x.width()};
    j["data"] = x.tensor().values();
    return j.dump();
  }

  Label predict(const ImageTensor& x) override {
    const std::string body = encode_request(x);
    const auto res = send([&] { return client_.Post("/v1/predict", body, "application/json"); });
    try {
      const auto j = nlohmann::json::parse(res.body);
      return Label{j.at("label").get<int>()};
    } catch (const nlohmann::json::exception& e) {
      throw OracleUnavailable(std::string("malformed predict response: ") + e.what());
    }
  }

  HealthInfo health() {
    const auto res = send([&] { return client_.Get("/v1/health"); });
    try {
      const auto j = nlohmann::json::parse(res.body);
      const auto s = j.at("shape").get<std::vector<std::size_t>>();
      if (s.size() != 3) throw OracleUnavailable("health shape must have 3 entries");
      return HealthInfo{j.at("status").get<std::string>(), j.at("classes").get<int>(),
                        Shape{s[0], s[1], s[2]}};
    } catch (const nlohmann::json::exception& e) {
      throw OracleUnavailable(std::string("malformed health response: ") + e.what());
    }
  }

  int classes() const override { return classes_; }
  void set_classes(int m) { classes_ = m; }
  std::string backend() const override { return "http"; }
  const std::string& url() const { return url_; }

 private:
  struct Response {
    int status = 0;
    std::string body;
  };

  template <class Call>
  Response send(Call&& call) {
    std::string last_error;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms_ << (attempt - 1)));
      }
      auto res = call();
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) return Response{res->status, res->body};
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      if (res->status < 500) break;
    }
    throw OracleUnavailable(url_ + ": " + last_error);
  }

  std::string url_;
  httplib::Client client_;
  int timeout_ms_;
  int retries_;
  int backoff_ms_;
  int classes_ = 0;
};

}  // namespace dpattack
