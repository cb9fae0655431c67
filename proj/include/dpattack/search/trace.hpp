#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace dpattack {

/// One record per label query issued by a search engine.
struct TraceRecord {
  std::size_t q = 0;  // ledger count after the query
  double r = 0.0;
  bool adversarial = false;
  std::string phase;        // e.g. "pair", "lambda", "bisect", "dbs"
  std::string decision;     // case label once the enclosing decision is known
  bool accepted = false;
  int level = 0;
};

class SearchTrace {
 public:
  void push(TraceRecord rec) { records_.push_back(std::move(rec)); }

  /// Labels every record with q >= first_q.
  void annotate(std::size_t first_q, const std::string& decision, bool accepted) {
    for (auto it = records_.rbegin(); it != records_.rend() && it->q >= first_q; ++it) {
      if (it->decision.empty()) it->decision = decision;
      it->accepted = it->accepted || accepted;
    }
  }

  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  static nlohmann::json to_json(const TraceRecord& r) {
    return nlohmann::json{{"q", r.q},         {"r", r.r},
                          {"case", r.decision}, {"accepted", r.accepted},
                          {"level", r.level},   {"phase", r.phase},
                          {"adversarial", r.adversarial}};
  }

  void write_jsonl(std::ostream& os) const {
    for (const auto& r : records_) os << to_json(r).dump() << '\n';
  }

 private:
  std::vector<TraceRecord> records_;
};

}  // namespace dpattack
