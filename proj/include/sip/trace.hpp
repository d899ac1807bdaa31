#pragma once

#include "sip/solver_agsip.hpp"
#include "sip/solver_sgsip.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace sip {

namespace csv {

/// Doubles are rendered with 17 significant digits so a written trace parses
/// back to the identical bit pattern.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const {
    std::ostringstream os;
    for (size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << '\n';
    for (const auto& row : rows) {
      for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << '\n';
    }
    return os.str();
  }
};

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << bytes;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline Table parse(const std::string& bytes) {
  Table t;
  std::istringstream is(bytes);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

}  // namespace csv

inline std::string trace_to_csv(const IterateTrace& trace) {
  csv::Table t;
  t.header = {"k", "f_value", "max_violation", "lambda_l1", "wall_seconds"};
  for (const TraceRow& r : trace.rows)
    t.rows.push_back({std::to_string(r.k), csv::num(r.f_value), csv::num(r.max_violation),
                      csv::num(r.lambda_l1), csv::num(r.wall_seconds)});
  return t.to_string();
}

/// Aggregated stochastic trace: the base columns carry repetition 0,
/// mean_/std_ columns the cross-repetition statistics.
inline std::string aggregate_to_csv(const StochRunResult& result) {
  csv::Table t;
  t.header = {"k",
              "f_value",
              "max_violation",
              "lambda_l1",
              "wall_seconds",
              "mean_f_value",
              "std_f_value",
              "mean_max_violation",
              "std_max_violation",
              "mean_lambda_l1",
              "std_lambda_l1"};
  const IterateTrace& rep0 = result.traces.front();
  for (size_t j = 0; j < rep0.rows.size(); ++j) {
    const TraceRow& r = rep0.rows[j];
    const AggregateRow& a = result.aggregate[j];
    t.rows.push_back({std::to_string(r.k), csv::num(r.f_value), csv::num(r.max_violation),
                      csv::num(r.lambda_l1), csv::num(r.wall_seconds), csv::num(a.mean_f_value),
                      csv::num(a.std_f_value), csv::num(a.mean_max_violation),
                      csv::num(a.std_max_violation), csv::num(a.mean_lambda_l1),
                      csv::num(a.std_lambda_l1)});
  }
  return t.to_string();
}

inline IterateTrace trace_from_csv(const csv::Table& t) {
  IterateTrace trace;
  for (const auto& row : t.rows) {
    TraceRow r;
    r.k = std::stol(row.at(0));
    r.f_value = std::stod(row.at(1));
    r.max_violation = std::stod(row.at(2));
    r.lambda_l1 = std::stod(row.at(3));
    r.wall_seconds = std::stod(row.at(4));
    trace.rows.push_back(r);
  }
  return trace;
}

}  // namespace sip
