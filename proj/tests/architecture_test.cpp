// The attack path sees hard labels only: no header it pulls in may reach the
// white-box model, and the oracle-facing types expose no score or gradient.

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dpattack/dpattack.hpp"

namespace fs = std::filesystem;
using namespace dpattack;

namespace {

const fs::path kInclude = fs::path(DPATTACK_SOURCE_DIR) / "include";

std::vector<std::string> direct_includes(const std::string& header) {
  std::ifstream is(kInclude / header);
  EXPECT_TRUE(is.good()) << header;
  static const std::regex re(R"(^\s*#\s*include\s*"(dpattack/[^"]+)\")");
  std::vector<std::string> out;
  std::string line;
  std::smatch m;
  while (std::getline(is, line)) {
    if (std::regex_search(line, m, re)) out.push_back(m[1]);
  }
  return out;
}

std::set<std::string> closure(const std::string& header) {
  std::set<std::string> seen{header};
  std::vector<std::string> todo{header};
  while (!todo.empty()) {
    const std::string h = todo.back();
    todo.pop_back();
    for (const auto& inc : direct_includes(h)) {
      if (seen.insert(inc).second) todo.push_back(inc);
    }
  }
  return seen;
}

bool white_box(const std::string& h) {
  return h == "dpattack/oracle/builtin_model.hpp" || h == "dpattack/oracle/synthetic.hpp" ||
         h == "dpattack/theory/curvature.hpp" || h == "dpattack/theory/checks.hpp";
}

template <class T>
concept ExposesScores = requires { &T::loss_and_grad; } || requires { &T::gradient; } ||
                        requires { &T::logits; } || requires { &T::probabilities; } ||
                        requires { &T::loss; } || requires { &T::model; };

}  // namespace

TEST(Architecture, AttackPathHeadersStayHardLabel) {
  std::vector<std::string> headers{"dpattack/dpattack.hpp"};
  for (const char* dir : {"core", "transforms", "search", "driver", "ddm"}) {
    for (const auto& e : fs::directory_iterator(kInclude / "dpattack" / dir)) {
      const std::string h = std::string("dpattack/") + dir + "/" + e.path().filename().string();
      if (h == "dpattack/ddm/bfs.hpp") continue;  // white-box diagnostic by design
      headers.push_back(h);
    }
  }
  headers.push_back("dpattack/oracle/oracle.hpp");
  headers.push_back("dpattack/oracle/http_oracle.hpp");
  for (const auto& h : headers) {
    for (const auto& dep : closure(h)) {
      EXPECT_FALSE(white_box(dep)) << h << " reaches " << dep;
    }
  }
}

TEST(Architecture, OracleTypesExposeNoScores) {
  static_assert(!ExposesScores<Oracle>);
  static_assert(!ExposesScores<OracleHandle>);
  static_assert(!ExposesScores<Prober>);
  static_assert(!ExposesScores<HttpOracle>);
  SUCCEED();
}
