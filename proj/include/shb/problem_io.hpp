#ifndef SHB_PROBLEM_IO_HPP
#define SHB_PROBLEM_IO_HPP

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "shb/common.hpp"
#include "shb/problems.hpp"

namespace shb {

// Structured text form of a generated problem, for regression tests across
// implementations. Layout (one record per line, values %.17g):
//
//   shbproblem 1
//   family least_squares|logistic
//   n <int>
//   d <int>
//   row <d values>            (n times, rows of A)
//   targets <n values>        (b or labels)
//   metadata 0|1
//   ... when 1: x_star <d values>, then key/value lines
//
// Only generator- or LIBSVM-backed problems carry the data matrix needed
// here; hand-built component lists are not serializable.
inline void write_problem(std::ostream& os, const FiniteSumProblem& p) {
  if (p.family == ProblemFamily::custom || p.data.size() == 0)
    throw config_error("cannot serialize a problem without a data matrix");
  os << "shbproblem 1\n";
  os << "family "
     << (p.family == ProblemFamily::least_squares ? "least_squares" : "logistic")
     << '\n';
  os << "n " << p.data.rows() << '\n';
  os << "d " << p.data.cols() << '\n';
  for (Eigen::Index i = 0; i < p.data.rows(); ++i) {
    os << "row";
    for (Eigen::Index j = 0; j < p.data.cols(); ++j)
      os << ' ' << format_double(p.data(i, j));
    os << '\n';
  }
  os << "targets";
  for (Eigen::Index i = 0; i < p.targets.size(); ++i)
    os << ' ' << format_double(p.targets(i));
  os << '\n';
  os << "metadata " << (p.metadata ? 1 : 0) << '\n';
  if (p.metadata) {
    const ProblemMetadata& m = *p.metadata;
    os << "x_star";
    for (Eigen::Index j = 0; j < m.x_star.size(); ++j)
      os << ' ' << format_double(m.x_star(j));
    os << '\n';
    os << "f_star " << format_double(m.f_star) << '\n';
    os << "l_max " << format_double(m.l_max) << '\n';
    if (m.mu) os << "mu " << format_double(*m.mu) << '\n';
    if (m.l_full) os << "l_full " << format_double(*m.l_full) << '\n';
    if (m.sigma2) os << "sigma2 " << format_double(*m.sigma2) << '\n';
    os << "interpolated " << (m.interpolated ? 1 : 0) << '\n';
    os << "approximate " << (m.approximate ? 1 : 0) << '\n';
    os << "achieved_grad_norm " << format_double(m.achieved_grad_norm) << '\n';
  }
}

inline FiniteSumProblem read_problem(std::istream& is) {
  std::string line;
  long line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(is, line)) throw parse_error("unexpected end of file", line_no);
    ++line_no;
    return line;
  };

  {
    std::istringstream head(next_line());
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != "shbproblem" || version != 1)
      throw parse_error("not a shbproblem v1 file", line_no);
  }

  auto expect_key = [&](const std::string& key) -> std::istringstream {
    std::istringstream ls(next_line());
    std::string k;
    ls >> k;
    if (k != key) throw parse_error("expected '" + key + "', got '" + k + "'", line_no);
    return ls;
  };

  FiniteSumProblem p;
  std::string family;
  expect_key("family") >> family;
  if (family == "least_squares") p.family = ProblemFamily::least_squares;
  else if (family == "logistic") p.family = ProblemFamily::logistic;
  else throw parse_error("unknown family '" + family + "'", line_no);

  int n = 0, d = 0;
  expect_key("n") >> n;
  expect_key("d") >> d;
  if (n < 1 || d < 1) throw parse_error("invalid dimensions", line_no);
  p.dim = d;
  p.data.resize(n, d);
  for (int i = 0; i < n; ++i) {
    std::istringstream ls = expect_key("row");
    for (int j = 0; j < d; ++j) {
      if (!(ls >> p.data(i, j))) throw parse_error("short row", line_no);
    }
  }
  p.targets.resize(n);
  {
    std::istringstream ls = expect_key("targets");
    for (int i = 0; i < n; ++i) {
      if (!(ls >> p.targets(i))) throw parse_error("short targets", line_no);
    }
  }

  int have_meta = 0;
  expect_key("metadata") >> have_meta;
  if (have_meta) {
    ProblemMetadata m;
    m.x_star.resize(d);
    {
      std::istringstream ls = expect_key("x_star");
      for (int j = 0; j < d; ++j) {
        if (!(ls >> m.x_star(j))) throw parse_error("short x_star", line_no);
      }
    }
    std::string key;
    while (std::getline(is, line)) {
      ++line_no;
      std::istringstream ls(line);
      if (!(ls >> key)) continue;
      double v = 0.0;
      if (key == "f_star") { ls >> m.f_star; }
      else if (key == "l_max") { ls >> m.l_max; }
      else if (key == "mu") { ls >> v; m.mu = v; }
      else if (key == "l_full") { ls >> v; m.l_full = v; }
      else if (key == "sigma2") { ls >> v; m.sigma2 = v; }
      else if (key == "interpolated") { int b; ls >> b; m.interpolated = b != 0; }
      else if (key == "approximate") { int b; ls >> b; m.approximate = b != 0; }
      else if (key == "achieved_grad_norm") { ls >> m.achieved_grad_norm; }
      else throw parse_error("unknown metadata key '" + key + "'", line_no);
    }
    p.metadata = std::move(m);
  }

  if (p.family == ProblemFamily::least_squares)
    detail::attach_least_squares_components(p);
  else
    detail::attach_logistic_components(p);
  return p;
}

}  // namespace shb

#endif  // SHB_PROBLEM_IO_HPP
