#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>

#include "helpers.hpp"
#include "dpattack/oracle/synthetic.hpp"

using namespace dpattack;
using dpattack::testing::random_image;

namespace {

BuiltinModel random_mlp(const Shape& s, int hidden, int classes, std::uint64_t seed) {
  BuiltinModel m = BuiltinModel::mlp(s, hidden, classes);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  for (auto* v : {&m.w1(), &m.b1(), &m.w2(), &m.b2()})
    for (double& e : *v) e = g(rng);
  return m;
}

BuiltinModel random_linear(const Shape& s, int classes, std::uint64_t seed) {
  BuiltinModel m = BuiltinModel::linear(s, classes);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& e : m.w1()) e = g(rng);
  for (double& e : m.b1()) e = g(rng);
  return m;
}

double max_rel_fd_error(const BuiltinModel& m, const ImageTensor& x, Label y) {
  const LossGrad lg = m.loss_and_grad(x.data(), y);
  std::vector<double> p(x.data().begin(), x.data().end());
  double worst = 0.0, scale = 0.0;
  for (double g : lg.grad) scale = std::max(scale, std::abs(g));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double h = 1e-4, keep = p[i];
    p[i] = keep + h;
    const double up = m.loss(p, y);
    p[i] = keep - h;
    const double dn = m.loss(p, y);
    p[i] = keep;
    const double fd = (up - dn) / (2 * h);
    worst = std::max(worst, std::abs(fd - lg.grad[i]) / std::max(scale, 1e-12));
  }
  return worst;
}

}  // namespace

TEST(Ledger, CountsEveryQuery) {
  const Shape s{1, 2, 2};
  auto oracle = std::make_shared<BuiltinOracle>(
      dpattack::testing::two_class_linear(s, {1, 1, 1, 1}, -1.0));
  const ImageTensor x(s, {0.1, 0.1, 0.1, 0.1});
  OracleHandle h(oracle, x, Label{0}, std::nullopt, true);
  EXPECT_EQ(h.query_label(x).value, 0);
  EXPECT_EQ(h.query_label(x).value, 0);
  EXPECT_EQ(h.ledger().total(), 2u);
  EXPECT_FALSE(h.is_adversarial(x));
  const ImageTensor far(s, {0.9, 0.9, 0.9, 0.9});
  EXPECT_TRUE(h.is_adversarial(far));
  EXPECT_EQ(h.ledger().total(), 4u);
  ASSERT_EQ(h.ledger().trace().size(), 4u);
  EXPECT_TRUE(h.ledger().trace()[3].adversarial);
  EXPECT_EQ(h.ledger().trace()[3].index, 4u);
}

TEST(Ledger, BudgetExhaustedBeforeSending) {
  const Shape s{1, 1, 1};
  std::size_t calls = 0;
  auto oracle = std::make_shared<FunctionOracle>(
      [&](const ImageTensor&) {
        ++calls;
        return Label{0};
      },
      2);
  const ImageTensor x(s, {0.5});
  OracleHandle h(oracle, x, Label{0}, 2);
  h.query_label(x);
  h.query_label(x);
  EXPECT_THROW(h.is_adversarial(x), BudgetExhausted);
  EXPECT_EQ(calls, 2u);
  EXPECT_EQ(h.ledger().total(), 2u);
}

TEST(BuiltinModel, UniformLogitsGiveLogM) {
  const Shape s{1, 3, 3};
  const BuiltinModel m = BuiltinModel::linear(s, 5);
  std::mt19937_64 rng(1);
  const ImageTensor x = random_image(s, rng);
  EXPECT_NEAR(m.loss(x.data(), Label{2}), std::log(5.0), 1e-12);
}

TEST(BuiltinModel, LinearGradientClosedForm) {
  const Shape s{1, 2, 3};
  const BuiltinModel m = random_linear(s, 4, 7);
  std::mt19937_64 rng(2);
  const ImageTensor x = random_image(s, rng);
  const Label y{1};
  const auto z = m.logits(x.data());
  const auto p = BuiltinModel::softmax(z);
  const LossGrad lg = m.loss_and_grad(x.data(), y);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double expect = 0.0;
    for (int j = 0; j < 4; ++j) {
      expect += p[j] * (m.w1()[j * s.size() + i] - m.w1()[y.value * s.size() + i]);
    }
    EXPECT_NEAR(lg.grad[i], expect, 1e-12);
  }
}

TEST(BuiltinModel, ZeroWeightPixelHasZeroGradient) {
  const Shape s{1, 1, 3};
  BuiltinModel m = random_linear(s, 3, 8);
  for (int k = 0; k < 3; ++k) m.w1()[k * 3 + 1] = 0.0;
  const ImageTensor x(s, {0.2, 0.4, 0.6});
  EXPECT_EQ(m.loss_and_grad(x.data(), Label{0}).grad[1], 0.0);
}

TEST(BuiltinModel, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  const Shape s{1, 4, 4};
  const BuiltinModel lin = random_linear(s, 4, 9);
  const BuiltinModel mlp = random_mlp(s, 8, 4, 10);
  for (int t = 0; t < 20; ++t) {
    const ImageTensor x = random_image(s, rng);
    EXPECT_LT(max_rel_fd_error(lin, x, Label{t % 4}), 1e-3);
    EXPECT_LT(max_rel_fd_error(mlp, x, Label{t % 4}), 1e-3);
  }
}

TEST(BuiltinModel, JsonRoundTrip) {
  const BuiltinModel m = random_mlp(Shape{1, 4, 4}, 6, 3, 4);
  const BuiltinModel back = BuiltinModel::from_json(m.to_json());
  std::mt19937_64 rng(5);
  const ImageTensor x = random_image(Shape{1, 4, 4}, rng);
  EXPECT_EQ(back.logits(x.data()), m.logits(x.data()));
}

TEST(BuiltinModel, Deterministic) {
  const BuiltinModel m = random_mlp(Shape{1, 4, 4}, 6, 3, 4);
  std::mt19937_64 rng(6);
  const ImageTensor x = random_image(Shape{1, 4, 4}, rng);
  EXPECT_EQ(m.predict(x.data()), m.predict(x.data()));
}

TEST(Training, SameSeedSameWeights) {
  TrainSpec ts;
  ts.data.per_class = 10;
  ts.epochs = 20;
  const auto a = train_builtin(ts, 3), b = train_builtin(ts, 3);
  EXPECT_EQ(a.model.w1(), b.model.w1());
  EXPECT_EQ(a.model.w2(), b.model.w2());
}

TEST(Training, LinearOnBlobsIsPerfect) {
  TrainSpec ts;
  ts.architecture = Architecture::linear;
  ts.data.kind = DatasetKind::blobs;
  ts.data.per_class = 30;
  const auto r = train_builtin(ts, 1);
  EXPECT_EQ(r.train_accuracy, 1.0);
}

TEST(Training, MlpOnTexturesReachesGate) {
  const auto r = train_builtin(TrainSpec{}, 1);
  EXPECT_GE(r.train_accuracy, 0.9);
}

TEST(Training, DivergenceIsReported) {
  TrainSpec ts;
  ts.data.per_class = 5;
  ts.epochs = 5;
  ts.learning_rate = std::numeric_limits<double>::infinity();
  EXPECT_THROW(train_builtin(ts, 1), TrainingFailed);
}

TEST(Capability, LossRequiresBuiltinBackend) {
  auto fn = std::make_shared<FunctionOracle>([](const ImageTensor&) { return Label{0}; }, 2);
  const ImageTensor x(Shape{1, 1, 1}, {0.5});
  EXPECT_THROW(loss_and_grad(*fn, x, Label{0}), CapabilityError);
  HttpOracle http("http://127.0.0.1:9");
  EXPECT_THROW(loss_and_grad(http, x, Label{0}), CapabilityError);
}

// ---------------------------------------------------------------- http client

namespace {

struct TestServer {
  httplib::Server srv;
  std::thread th;
  int port = 0;
  std::atomic<int> predict_calls{0};
  std::atomic<int> fail_first{0};  // answer 503 to this many predict calls
  std::atomic<int> status_override{0};
  std::atomic<int> delay_ms{0};

  TestServer() {
    srv.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok","classes":3,"shape":[1,2,2]})", "application/json");
    });
    srv.Post("/v1/predict", [this](const httplib::Request& req, httplib::Response& res) {
      ++predict_calls;
      if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms.load()));
      if (status_override != 0) {
        res.status = status_override;
        res.set_content("nope", "text/plain");
        return;
      }
      if (fail_first > 0) {
        --fail_first;
        res.status = 503;
        return;
      }
      const auto j = nlohmann::json::parse(req.body);
      const auto data = j.at("data").get<std::vector<double>>();
      double s = 0.0;
      for (double v : data) s += v;
      res.set_content(nlohmann::json{{"label", s > 2.0 ? 1 : 0}}.dump(), "application/json");
    });
    port = srv.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { srv.listen_after_bind(); });
    srv.wait_until_ready();
  }
  ~TestServer() {
    srv.stop();
    th.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST(HttpOracle, RequestEncodingIsWireFormat) {
  const ImageTensor x(Shape{1, 1, 2}, {0.25, 0.5});
  const auto j = nlohmann::json::parse(HttpOracle::encode_request(x));
  EXPECT_EQ(j.at("shape"), nlohmann::json::array({1, 1, 2}));
  EXPECT_EQ(j.at("data"), nlohmann::json::array({0.25, 0.5}));
  EXPECT_EQ(j.size(), 2u);
}

TEST(HttpOracle, HealthAndPredict) {
  TestServer server;
  auto client = std::make_shared<HttpOracle>(server.url(), 2000, 3, 1);
  const HealthInfo hi = client->health();
  EXPECT_EQ(hi.status, "ok");
  EXPECT_EQ(hi.classes, 3);
  EXPECT_EQ(hi.shape, (Shape{1, 2, 2}));
  const ImageTensor lo(Shape{1, 2, 2}, {0.1, 0.1, 0.1, 0.1});
  const ImageTensor hi_img(Shape{1, 2, 2}, {0.9, 0.9, 0.9, 0.9});
  OracleHandle h(client, lo, Label{0});
  EXPECT_FALSE(h.is_adversarial(lo));
  EXPECT_TRUE(h.is_adversarial(hi_img));
  EXPECT_EQ(h.ledger().total(), 2u);
}

TEST(HttpOracle, RetriesServerErrorsWithoutCounting) {
  TestServer server;
  server.fail_first = 2;
  auto client = std::make_shared<HttpOracle>(server.url(), 2000, 3, 1);
  const ImageTensor x(Shape{1, 2, 2}, {0.9, 0.9, 0.9, 0.9});
  OracleHandle h(client, x, Label{0});
  EXPECT_EQ(h.query_label(x).value, 1);
  EXPECT_EQ(server.predict_calls.load(), 3);
  EXPECT_EQ(h.ledger().total(), 1u);
}

TEST(HttpOracle, GivesUpAfterRetries) {
  TestServer server;
  server.status_override = 500;
  auto client = std::make_shared<HttpOracle>(server.url(), 2000, 3, 1);
  const ImageTensor x(Shape{1, 2, 2}, {0.9, 0.9, 0.9, 0.9});
  OracleHandle h(client, x, Label{0});
  EXPECT_THROW(h.query_label(x), OracleUnavailable);
  EXPECT_EQ(server.predict_calls.load(), 4);
  EXPECT_EQ(h.ledger().total(), 0u);
}

TEST(HttpOracle, ClientErrorIsNotRetried) {
  TestServer server;
  server.status_override = 400;
  auto client = std::make_shared<HttpOracle>(server.url(), 2000, 3, 1);
  const ImageTensor x(Shape{1, 2, 2}, {0.9, 0.9, 0.9, 0.9});
  OracleHandle h(client, x, Label{0});
  EXPECT_THROW(h.query_label(x), OracleUnavailable);
  EXPECT_EQ(server.predict_calls.load(), 1);
}

TEST(HttpOracle, TimeoutFromEnvironment) {
  TestServer server;
  server.delay_ms = 400;
  ::setenv("ORACLE_TIMEOUT_MS", "50", 1);
  EXPECT_EQ(HttpOracle::timeout_from_env(), 50);
  auto client = std::make_shared<HttpOracle>(server.url());
  ::unsetenv("ORACLE_TIMEOUT_MS");
  const ImageTensor x(Shape{1, 2, 2}, {0.9, 0.9, 0.9, 0.9});
  OracleHandle h(client, x, Label{0});
  EXPECT_THROW(h.query_label(x), OracleUnavailable);
  EXPECT_EQ(h.ledger().total(), 0u);
}

TEST(HttpOracle, UnreachableServer) {
  // Port 9 (discard) is closed on test machines.
  auto client = std::make_shared<HttpOracle>("http://127.0.0.1:9", 200, 1, 1);
  const ImageTensor x(Shape{1, 1, 1}, {0.5});
  OracleHandle h(client, x, Label{0});
  EXPECT_THROW(h.query_label(x), OracleUnavailable);
}
