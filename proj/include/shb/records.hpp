#ifndef SHB_RECORDS_HPP
#define SHB_RECORDS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "shb/common.hpp"

namespace shb {

// One logged iteration. subopt and dist_sq are NaN when the problem carries
// no reference metadata.
struct TrajectoryRow {
  long t = 0;
  double f = 0.0;
  double subopt = std::numeric_limits<double>::quiet_NaN();
  double dist_sq = std::numeric_limits<double>::quiet_NaN();
  double gamma = 0.0;
};

// Objective at the running Cesaro average x_bar^t = (1/t) sum_{s<t} x^s,
// sampled at dyadic/decade checkpoints and at t = T.
struct CesaroRow {
  long t = 0;
  double f = 0.0;
  double subopt = std::numeric_limits<double>::quiet_NaN();
};

struct RunRecord {
  int run_id = 0;
  std::uint64_t seed = 0;
  long iterations = 0;
  std::vector<TrajectoryRow> rows;
  std::vector<CesaroRow> cesaro;
  double f_cesaro = std::numeric_limits<double>::quiet_NaN();
  double d_sq = std::numeric_limits<double>::quiet_NaN();  // max_t ||x^t-x*||^2
  bool diverged = false;
  double wallclock_s = 0.0;  // never written to output files
};

inline constexpr const char* kTrajectoryHeader = "run_id,seed,t,f,subopt,dist_sq,gamma";
inline constexpr const char* kCesaroHeader = "run_id,seed,t,f_cesaro,subopt";

// Rows grouped by run_id, each block ascending in t; floats carry 17
// significant digits so a re-parse reproduces the records exactly.
inline void emit_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << kTrajectoryHeader << '\n';
  for (const RunRecord& r : records) {
    for (const TrajectoryRow& row : r.rows) {
      os << r.run_id << ',' << r.seed << ',' << row.t << ','
         << format_double(row.f) << ',' << format_double(row.subopt) << ','
         << format_double(row.dist_sq) << ',' << format_double(row.gamma)
         << '\n';
    }
  }
}

inline void emit_cesaro_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << kCesaroHeader << '\n';
  for (const RunRecord& r : records) {
    for (const CesaroRow& row : r.cesaro) {
      os << r.run_id << ',' << r.seed << ',' << row.t << ','
         << format_double(row.f) << ',' << format_double(row.subopt) << '\n';
    }
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// Inverse of emit_csv. Summary fields that live outside the CSV (f_cesaro,
// d_sq, ...) are reconstructed from the rows where possible.
inline std::vector<RunRecord> parse_csv(std::istream& is) {
  std::string line;
  long line_no = 0;
  if (!std::getline(is, line)) throw parse_error("empty CSV", 1);
  ++line_no;
  if (line != kTrajectoryHeader)
    throw parse_error("unexpected CSV header '" + line + "'", line_no);

  std::map<int, RunRecord> by_id;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 7) throw parse_error("expected 7 CSV fields", line_no);
    const int run_id = std::stoi(fields[0]);
    RunRecord& rec = by_id[run_id];
    rec.run_id = run_id;
    rec.seed = std::stoull(fields[1]);
    TrajectoryRow row;
    row.t = std::stol(fields[2]);
    row.f = std::strtod(fields[3].c_str(), nullptr);
    row.subopt = std::strtod(fields[4].c_str(), nullptr);
    row.dist_sq = std::strtod(fields[5].c_str(), nullptr);
    row.gamma = std::strtod(fields[6].c_str(), nullptr);
    rec.rows.push_back(row);
  }

  std::vector<RunRecord> out;
  out.reserve(by_id.size());
  for (auto& [id, rec] : by_id) {
    double dmax = std::numeric_limits<double>::quiet_NaN();
    for (const TrajectoryRow& row : rec.rows) {
      if (std::isfinite(row.dist_sq))
        dmax = std::isfinite(dmax) ? std::max(dmax, row.dist_sq) : row.dist_sq;
    }
    rec.d_sq = dmax;
    if (!rec.rows.empty()) rec.iterations = rec.rows.back().t + 1;
    out.push_back(std::move(rec));
  }
  return out;
}

// Re-attaches Cesaro checkpoint rows (and the final f_cesaro) to records
// parsed from the trajectory CSV, matching by run_id.
inline void parse_cesaro_csv(std::istream& is, std::vector<RunRecord>& records) {
  std::string line;
  long line_no = 0;
  if (!std::getline(is, line)) throw parse_error("empty CSV", 1);
  ++line_no;
  if (line != kCesaroHeader)
    throw parse_error("unexpected CSV header '" + line + "'", line_no);
  std::map<int, RunRecord*> by_id;
  for (RunRecord& r : records) by_id[r.run_id] = &r;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 5) throw parse_error("expected 5 CSV fields", line_no);
    auto it = by_id.find(std::stoi(fields[0]));
    if (it == by_id.end()) continue;
    CesaroRow row;
    row.t = std::stol(fields[2]);
    row.f = std::strtod(fields[3].c_str(), nullptr);
    row.subopt = std::strtod(fields[4].c_str(), nullptr);
    it->second->cesaro.push_back(row);
  }
  for (auto& [id, rec] : by_id) {
    if (!rec->cesaro.empty()) rec->f_cesaro = rec->cesaro.back().f;
  }
}

}  // namespace shb

#endif  // SHB_RECORDS_HPP
