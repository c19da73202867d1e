#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace portprep {

/// Decimal formatting with 12 significant digits; reports are diffed
/// byte-for-byte, so every number goes through this one function.
inline std::string format_significant(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

struct ReportRow {
  std::string task;
  std::optional<int> d;
  std::optional<int> n;
  std::optional<double> epsilon;
  std::optional<double> formula;
  std::optional<double> dense;
  std::optional<double> sampled;
  std::optional<double> sigma;
  std::string verdict;     // pass | fail | degenerate | empty
  std::string provenance;  // formula | dense | sampled
};

class Report {
 public:
  void add(ReportRow row) { rows_.push_back(std::move(row)); }
  const std::vector<ReportRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  bool all_passed() const {
    for (const auto& row : rows_) {
      if (row.verdict == "fail") {
        return false;
      }
    }
    return true;
  }

  std::string to_csv() const {
    std::string out =
        "task,d,N,epsilon,formula,dense,sampled,sigma,verdict,provenance\n";
    for (const auto& row : rows_) {
      out += row.task;
      out += ',';
      out += row.d ? std::to_string(*row.d) : "";
      out += ',';
      out += row.n ? std::to_string(*row.n) : "";
      out += ',';
      out += row.epsilon ? format_significant(*row.epsilon) : "";
      out += ',';
      out += row.formula ? format_significant(*row.formula) : "";
      out += ',';
      out += row.dense ? format_significant(*row.dense) : "";
      out += ',';
      out += row.sampled ? format_significant(*row.sampled) : "";
      out += ',';
      out += row.sigma ? format_significant(*row.sigma) : "";
      out += ',';
      out += row.verdict;
      out += ',';
      out += row.provenance;
      out += '\n';
    }
    return out;
  }

  /// Same rows as the CSV, as an array of objects with identical keys.
  /// Floating-point values are serialized as decimal strings to avoid
  /// cross-platform float-text drift; absent values are null, never 0.
  std::string to_json() const {
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
      nlohmann::ordered_json entry;
      entry["task"] = row.task;
      entry["d"] = row.d ? nlohmann::ordered_json(*row.d)
                         : nlohmann::ordered_json(nullptr);
      entry["N"] = row.n ? nlohmann::ordered_json(*row.n)
                         : nlohmann::ordered_json(nullptr);
      auto number = [](const std::optional<double>& value) {
        return value ? nlohmann::ordered_json(format_significant(*value))
                     : nlohmann::ordered_json(nullptr);
      };
      entry["epsilon"] = number(row.epsilon);
      entry["formula"] = number(row.formula);
      entry["dense"] = number(row.dense);
      entry["sampled"] = number(row.sampled);
      entry["sigma"] = number(row.sigma);
      entry["verdict"] = row.verdict;
      entry["provenance"] = row.provenance;
      array.push_back(std::move(entry));
    }
    return array.dump(2) + "\n";
  }

 private:
  std::vector<ReportRow> rows_;
};

}  // namespace portprep
