#ifndef SHB_LIBSVM_HPP
#define SHB_LIBSVM_HPP

#include <cctype>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "shb/common.hpp"
#include "shb/problems.hpp"

namespace shb {

// One observation in LIBSVM text form: 1-based feature indices, strictly
// increasing within the row.
struct SparseRow {
  std::vector<std::pair<int, double>> entries;
};

struct LibsvmData {
  std::vector<SparseRow> rows;
  std::vector<double> labels;
  int dim = 0;  // max feature index seen
};

namespace detail {

inline double parse_number(const std::string& tok, long line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw parse_error("malformed number '" + tok + "'", line);
  return v;
}

}  // namespace detail

// Parses `<label> <idx>:<val> ...` lines. '#' starts a comment; blank lines
// are skipped. Labels are remapped to {-1,+1} when exactly two distinct
// values occur (the larger becomes +1).
inline LibsvmData parse_libsvm(std::istream& in) {
  LibsvmData out;
  std::string raw;
  long line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);

    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : raw) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!cur.empty()) tokens.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    if (tokens.empty()) continue;

    out.labels.push_back(detail::parse_number(tokens[0], line_no));
    SparseRow row;
    int prev_index = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const std::string& tok = tokens[k];
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw parse_error("expected <index>:<value>, got '" + tok + "'", line_no);
      char* end = nullptr;
      const long idx = std::strtol(tok.substr(0, colon).c_str(), &end, 10);
      if (*end != '\0')
        throw parse_error("malformed index in '" + tok + "'", line_no);
      if (idx <= 0) throw parse_error("index must be positive", line_no);
      if (idx <= prev_index)
        throw parse_error("non-increasing index", line_no);
      const double val = detail::parse_number(tok.substr(colon + 1), line_no);
      row.entries.emplace_back(static_cast<int>(idx), val);
      prev_index = static_cast<int>(idx);
      out.dim = std::max(out.dim, static_cast<int>(idx));
    }
    out.rows.push_back(std::move(row));
  }

  std::set<double> distinct(out.labels.begin(), out.labels.end());
  if (distinct.size() == 2) {
    const double hi = *distinct.rbegin();
    for (double& y : out.labels) y = (y == hi) ? 1.0 : -1.0;
  }
  return out;
}

inline void write_libsvm(std::ostream& os, const LibsvmData& data) {
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    os << format_double(data.labels[i]);
    for (const auto& [idx, val] : data.rows[i].entries)
      os << ' ' << idx << ':' << format_double(val);
    os << '\n';
  }
}

// Densifies the rows into a binary logistic problem. Requires the labels to
// be {-1,+1} (i.e. exactly two classes in the source file).
inline FiniteSumProblem problem_from_libsvm(const LibsvmData& data) {
  if (data.rows.empty()) throw config_error("libsvm data has no rows");
  for (double y : data.labels) {
    if (y != 1.0 && y != -1.0)
      throw config_error("libsvm labels are not binary; cannot build logistic problem");
  }
  FiniteSumProblem p;
  p.dim = data.dim;
  p.family = ProblemFamily::logistic;
  p.data = Matrix::Zero(static_cast<Eigen::Index>(data.rows.size()), data.dim);
  p.targets.resize(static_cast<Eigen::Index>(data.labels.size()));
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    for (const auto& [idx, val] : data.rows[i].entries)
      p.data(static_cast<Eigen::Index>(i), idx - 1) = val;
    p.targets(static_cast<Eigen::Index>(i)) = data.labels[i];
  }
  detail::attach_logistic_components(p);
  return p;
}

}  // namespace shb

#endif  // SHB_LIBSVM_HPP
