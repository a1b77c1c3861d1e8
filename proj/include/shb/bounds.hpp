#ifndef SHB_BOUNDS_HPP
#define SHB_BOUNDS_HPP

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shb/common.hpp"
#include "shb/records.hpp"

namespace shb {

// Precondition violation of a bound check (a configuration problem, not a
// run failure); carries the admissible limit.
class bound_range_error : public config_error {
 public:
  bound_range_error(const std::string& what, double beta_max)
      : config_error(what), beta_max(beta_max) {}
  double beta_max;
};

struct Thm31Bound {
  double rhs = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double beta_max = 0.0;
  double alpha = 0.0;
};

// E[f(xbar^T)-f*] <= C1 ||x0-x*||^2 / T + C2 sigma^2 for the capped
// momentum-corrected Polyak step with c = 1 and beta < alpha/(2 gamma_b -
// alpha), alpha = min{1/(2 L_max), gamma_b}.
// C1 = (1-b)/(a b + a - 2 b gamma_b), C2 = (2 gamma_b - a b - a)/(same).
inline Thm31Bound thm31_bound(double x0_dist_sq, long iterations, double beta,
                              double gamma_b, double l_max, double sigma2) {
  Thm31Bound out;
  out.alpha = std::min(1.0 / (2.0 * l_max), gamma_b);
  out.beta_max = out.alpha / (2.0 * gamma_b - out.alpha);
  if (beta < 0.0 || beta >= out.beta_max)
    throw bound_range_error("beta outside [0, alpha/(2 gamma_b - alpha))",
                            out.beta_max);
  const double denom = out.alpha * beta + out.alpha - 2.0 * beta * gamma_b;
  out.c1 = (1.0 - beta) / denom;
  out.c2 = (2.0 * gamma_b - out.alpha * beta - out.alpha) / denom;
  out.rhs = out.c1 * x0_dist_sq / static_cast<double>(iterations) +
            out.c2 * sigma2;
  return out;
}

// Constant-step corollary: rhs = ||x0-x*||^2/(T gamma) + sigma^2.
inline double cor34_bound(double x0_dist_sq, long iterations, double gamma,
                          double sigma2) {
  if (!(gamma > 0.0)) throw config_error("gamma must be positive");
  return x0_dist_sq / (static_cast<double>(iterations) * gamma) + sigma2;
}

// Admissibility of the constant step under the corollary's hypotheses.
inline void validate_cor34(double gamma, double beta, double l_max) {
  const double limit = (1.0 - beta) / (2.0 * l_max);
  if (gamma > limit * (1.0 + 1e-12))
    throw bound_range_error("gamma exceeds (1-beta)/(2 L_max)", limit);
}

// Decreasing-step rate: 2 b [f(x0)-f*]/((1-b) T) + (1+b) D^2/((1-b) a
// sqrt(T)) + 2 sigma^2/sqrt(T), with the measured D^2.
inline double thm35_bound(double f0_gap, double d_sq, long iterations,
                          double beta, double alpha, double sigma2) {
  const double T = static_cast<double>(iterations);
  const double sq = std::sqrt(T);
  return 2.0 * beta * f0_gap / ((1.0 - beta) * T) +
         (1.0 + beta) * d_sq / ((1.0 - beta) * alpha * sq) +
         2.0 * sigma2 / sq;
}

struct Thm36Bound {
  double rhs = 0.0;
  double theta = 0.0;
};

// Gap-normalized adaptive rate: rhs = theta^2/T + theta sigma/sqrt(T) with
// theta = b sqrt(f(x0)-f*)/(1-b) + (1+b) c L D^2 / (2(1-b)) + 1/(2c).
inline Thm36Bound thm36_bound(double f0_gap, double d_sq, long iterations,
                              double beta, double c, double l, double sigma) {
  Thm36Bound out;
  out.theta = beta * std::sqrt(std::max(f0_gap, 0.0)) / (1.0 - beta) +
              (1.0 + beta) * c * l * d_sq / (2.0 * (1.0 - beta)) +
              1.0 / (2.0 * c);
  const double T = static_cast<double>(iterations);
  out.rhs = out.theta * out.theta / T + out.theta * sigma / std::sqrt(T);
  return out;
}

// The no-momentum constant as it circulates in the source analyses,
// theta = 2 c L D^2 + 1/c; kept alongside the normalization above, not used
// by the bound checks.
inline double thm36_theta_alternate(double c, double l, double d_sq) {
  return 2.0 * c * l * d_sq + 1.0 / c;
}

struct BoundReport {
  std::string theorem;
  double lhs_mean = 0.0;
  double lhs_std_error = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  bool any_diverged = false;
  int seeds = 0;
  double slack = 0.10;
  std::map<std::string, double> inputs;
};

// Mean over seeds of the Cesaro-average suboptimality at checkpoint t (the
// final checkpoint when t = 0); NaN when a record lacks the checkpoint.
inline double mean_cesaro_subopt(const std::vector<RunRecord>& records,
                                 long t = 0) {
  double acc = 0.0;
  int count = 0;
  for (const RunRecord& r : records) {
    if (t == 0 && !r.cesaro.empty()) {
      acc += r.cesaro.back().subopt;
      ++count;
      continue;
    }
    for (const CesaroRow& row : r.cesaro) {
      if (row.t == t) {
        acc += row.subopt;
        ++count;
        break;
      }
    }
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return acc / count;
}

// lhs = mean over seeds of f(xbar^T) - f*; satisfied iff lhs <= rhs (1 +
// slack). Divergence in any record flags the report instead of comparing.
inline BoundReport check_bound(const std::vector<RunRecord>& records,
                               const std::string& theorem, double rhs,
                               double f_star,
                               std::map<std::string, double> inputs = {},
                               double slack = 0.10) {
  if (records.size() < 2)
    throw config_error("check_bound needs at least 2 seeds");
  BoundReport rep;
  rep.theorem = theorem;
  rep.rhs = rhs;
  rep.slack = slack;
  rep.seeds = static_cast<int>(records.size());
  rep.inputs = std::move(inputs);
  for (const RunRecord& r : records) rep.any_diverged |= r.diverged;
  if (rep.any_diverged) {
    rep.satisfied = false;
    return rep;
  }
  double acc = 0.0;
  for (const RunRecord& r : records) acc += r.f_cesaro - f_star;
  rep.lhs_mean = acc / static_cast<double>(records.size());
  double var = 0.0;
  for (const RunRecord& r : records) {
    const double d = (r.f_cesaro - f_star) - rep.lhs_mean;
    var += d * d;
  }
  var /= std::max<std::size_t>(records.size() - 1, 1);
  rep.lhs_std_error = std::sqrt(var / static_cast<double>(records.size()));
  rep.satisfied = rep.lhs_mean <= rhs * (1.0 + slack);
  return rep;
}

// Least-squares slope of log(y) against log(t).
inline std::optional<double> fit_loglog_slope(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, y] : points) {
    if (!(y > 0.0) || !(t > 0.0)) return std::nullopt;
    const double lx = std::log(t);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

// Convergence-order estimate: slope of log E[f(xbar^t)-f*] vs log t over the
// last `window` dyadic checkpoints common to all records. nullopt means the
// suboptimality hit zero inside the window (converged past the tolerance).
inline std::optional<double> fit_rate_slope(const std::vector<RunRecord>& records,
                                            int window) {
  if (records.empty() || window < 2) return std::nullopt;
  std::vector<long> dyadic;
  for (const CesaroRow& row : records.front().cesaro) {
    if ((row.t & (row.t - 1)) == 0) dyadic.push_back(row.t);  // power of two
  }
  if (static_cast<int>(dyadic.size()) > window)
    dyadic.erase(dyadic.begin(), dyadic.end() - window);
  std::vector<std::pair<double, double>> pts;
  for (long t : dyadic) {
    const double m = mean_cesaro_subopt(records, t);
    if (!std::isfinite(m)) continue;
    if (m <= 0.0) return std::nullopt;
    pts.emplace_back(static_cast<double>(t), m);
  }
  return fit_loglog_slope(pts);
}

// One key-value pair per line, stable order.
inline void write_bound_report(std::ostream& os, const BoundReport& rep) {
  os << "theorem " << rep.theorem << '\n';
  os << "lhs_mean " << format_double(rep.lhs_mean) << '\n';
  os << "lhs_std_error " << format_double(rep.lhs_std_error) << '\n';
  os << "rhs " << format_double(rep.rhs) << '\n';
  os << "slack " << format_double(rep.slack) << '\n';
  os << "seeds " << rep.seeds << '\n';
  os << "any_diverged " << (rep.any_diverged ? 1 : 0) << '\n';
  os << "satisfied " << (rep.satisfied ? 1 : 0) << '\n';
  for (const auto& [key, value] : rep.inputs)
    os << "input." << key << ' ' << format_double(value) << '\n';
}

}  // namespace shb

#endif  // SHB_BOUNDS_HPP
