#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpattack/driver/benchmark.hpp"

namespace dpattack {

enum class ReportFormat { json, csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw FormatError("unknown report format '" + s + "'");
}

/// Query budgets at which ASR curves are sampled: the Max.Q rows of the
/// usual low-budget tables, extended by doubling up to the run's budget.
inline std::vector<std::size_t> plot_budgets(std::size_t max_queries) {
  std::vector<std::size_t> out;
  for (std::size_t b : {5, 10, 20, 50, 80, 100, 200}) {
    if (b <= max_queries) out.push_back(b);
  }
  for (std::size_t b = 500; b <= max_queries; b *= 2) out.push_back(b);
  if (out.empty() || out.back() != max_queries) out.push_back(max_queries);
  return out;
}

namespace report_detail {

inline nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace report_detail

inline nlohmann::json report_to_json(const BenchmarkReport& rep, bool plot_data = false) {
  using report_detail::finite_or_null;
  nlohmann::json j;
  j["config"] = rep.config.to_json();
  j["n"] = rep.results.size();
  j["asr"] = rep.asr;
  j["avg_q"] = report_detail::optional_number(rep.avg_q);
  j["med_q"] = report_detail::optional_number(rep.med_q);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < rep.results.size(); ++i) {
    const auto& r = rep.results[i];
    nlohmann::json row;
    row["image_id"] = rep.ids[i];
    row["label"] = rep.labels[i].value;
    row["success"] = r.success;
    row["queries"] = r.queries_used;
    row["final_r"] = finite_or_null(r.final_r);
    row["failure_kind"] = failure_name(r.failure_kind);
    if (!r.error.empty()) row["error"] = r.error;
    if (r.block_size) row["block_size"] = r.block_size;
    if (!r.init_choice.empty()) row["init"] = r.init_choice;
    if (rep.config.trace) {
      nlohmann::json t = nlohmann::json::array();
      for (const auto& q : r.trace) {
        t.push_back({{"q", q.index}, {"r", finite_or_null(q.r)}, {"adversarial", q.adversarial}});
      }
      row["trace"] = std::move(t);
    }
    rows.push_back(std::move(row));
  }
  j["results"] = std::move(rows);
  if (plot_data) {
    nlohmann::json curve = nlohmann::json::array();
    for (std::size_t b : plot_budgets(rep.config.max_queries)) {
      curve.push_back({{"max_queries", b}, {"asr", rep.asr_at(b)}});
    }
    j["asr_curve"] = std::move(curve);
  }
  return j;
}

inline std::string report_to_csv(const BenchmarkReport& rep) {
  std::ostringstream os;
  os << "image_id,success,queries,final_r,failure_kind\n";
  for (std::size_t i = 0; i < rep.results.size(); ++i) {
    const auto& r = rep.results[i];
    os << rep.ids[i] << ',' << (r.success ? "true" : "false") << ',' << r.queries_used << ','
       << report_detail::csv_number(r.final_r) << ',' << failure_name(r.failure_kind) << '\n';
  }
  return os.str();
}

inline std::string emit_report(const BenchmarkReport& rep, ReportFormat fmt,
                               bool plot_data = false) {
  return fmt == ReportFormat::json ? report_to_json(rep, plot_data).dump(2) + "\n"
                                   : report_to_csv(rep);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw WriteError("cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os) throw WriteError("failed writing '" + path + "'");
}

inline void write_report(const BenchmarkReport& rep, const std::string& path, ReportFormat fmt,
                         bool plot_data = false) {
  write_text(path, emit_report(rep, fmt, plot_data));
}

/// Metrics recovered from a JSON report.
struct ReportSummary {
  std::size_t n = 0;
  double asr = 0.0;
  std::optional<double> avg_q;
  std::optional<double> med_q;
};

inline ReportSummary parse_report_summary(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ReportSummary s;
    s.n = j.at("n").get<std::size_t>();
    s.asr = j.at("asr").get<double>();
    if (!j.at("avg_q").is_null()) s.avg_q = j.at("avg_q").get<double>();
    if (!j.at("med_q").is_null()) s.med_q = j.at("med_q").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace dpattack
