#ifndef SHB_STEPSIZES_HPP
#define SHB_STEPSIZES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "shb/common.hpp"

namespace shb {

enum class Rule {
  constant,
  constant_liu,
  sps_max,
  decsps,
  adasps,
  mom_sps_max,
  mom_decsps,
  mom_adasps,
  alt_mom_decsps,
  alt_mom_adasps,
  polyak_deterministic,
  mom_ps_max,
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::constant: return "constant";
    case Rule::constant_liu: return "constant_liu";
    case Rule::sps_max: return "sps_max";
    case Rule::decsps: return "decsps";
    case Rule::adasps: return "adasps";
    case Rule::mom_sps_max: return "mom_sps_max";
    case Rule::mom_decsps: return "mom_decsps";
    case Rule::mom_adasps: return "mom_adasps";
    case Rule::alt_mom_decsps: return "alt_mom_decsps";
    case Rule::alt_mom_adasps: return "alt_mom_adasps";
    case Rule::polyak_deterministic: return "polyak_deterministic";
    case Rule::mom_ps_max: return "mom_ps_max";
  }
  return "?";
}

inline std::optional<Rule> rule_from_name(const std::string& s) {
  for (Rule r : {Rule::constant, Rule::constant_liu, Rule::sps_max, Rule::decsps,
                 Rule::adasps, Rule::mom_sps_max, Rule::mom_decsps,
                 Rule::mom_adasps, Rule::alt_mom_decsps, Rule::alt_mom_adasps,
                 Rule::polyak_deterministic, Rule::mom_ps_max}) {
    if (s == rule_name(r)) return r;
  }
  return std::nullopt;
}

// Families sharing update kernels / state fields.
inline bool is_sps_family(Rule r) {
  return r == Rule::sps_max || r == Rule::mom_sps_max || r == Rule::mom_ps_max;
}
inline bool is_decsps_family(Rule r) {
  return r == Rule::decsps || r == Rule::mom_decsps || r == Rule::alt_mom_decsps;
}
inline bool is_adasps_family(Rule r) {
  return r == Rule::adasps || r == Rule::mom_adasps || r == Rule::alt_mom_adasps;
}
inline bool is_constant_rule(Rule r) {
  return r == Rule::constant || r == Rule::constant_liu;
}
// Rules whose gap is measured against the true f(x*) over the full batch.
inline bool is_deterministic_rule(Rule r) {
  return r == Rule::polyak_deterministic || r == Rule::mom_ps_max;
}
// Rules carrying the (1-beta) correcting momentum factor.
inline bool uses_momentum_factor(Rule r) {
  switch (r) {
    case Rule::mom_sps_max:
    case Rule::mom_decsps:
    case Rule::mom_adasps:
    case Rule::alt_mom_decsps:
    case Rule::alt_mom_adasps:
    case Rule::mom_ps_max:
      return true;
    default:
      return false;
  }
}

// Per-iteration cap gamma_b^t = tau^{B/n} gamma_{t-1}; replaces the static
// gamma_b arm. Only meaningful for the SPS_max-style rules.
struct Smoothing {
  double tau = 2.0;
  double batch_ratio = 1.0;  // B/n
};

// Everything a rule carries across iterations. Value type: advance() returns
// the successor instead of mutating, so states move freely between runs.
struct StepSizeState {
  Rule rule = Rule::sps_max;
  double beta = 0.0;
  double c = 1.0;
  double gamma_b = 1.0;                   // cap, or the constant step itself
  std::optional<double> gamma_prev{};     // gamma_{t-1}; nullopt = uncapped
  double c_prev = 1.0;                    // c_{t-1}
  double gap_sum = 0.0;                   // running sum of batch gaps
  long t = 0;
  std::optional<Smoothing> smoothing{};
  bool auto_c = false;                    // AdaSPS: c = 1/sqrt(first gap)
};

struct StepDecision {
  double gamma = 0.0;
  bool capped = false;  // the min's second arm bound
  StepSizeState next;
};

// Gradients this small carry no usable direction; the rule emits gamma = 0
// and leaves gamma_prev / c_prev untouched (the gap still feeds gap_sum for
// the AdaSPS family).
inline constexpr double kZeroGradientG2 = 1e-30;

inline StepSizeState make_state(Rule rule, double beta, double c, double gamma_b,
                                std::optional<Smoothing> smoothing = std::nullopt,
                                bool auto_c = false) {
  if (beta < 0.0 || beta >= 1.0)
    throw config_error("beta must lie in [0,1)");
  if (!(c > 0.0)) throw config_error("c must be positive");
  if (!(gamma_b > 0.0)) throw config_error("gamma_b must be positive");
  if (smoothing && !is_sps_family(rule))
    throw config_error("smoothing applies only to the SPS_max-style rules");
  if (smoothing && !std::isfinite(gamma_b))
    throw config_error("smoothing needs a finite gamma_b seed");
  if (auto_c && !is_adasps_family(rule))
    throw config_error("auto c applies only to the AdaSPS-style rules");

  StepSizeState s;
  s.rule = rule;
  s.beta = beta;
  s.c = c;
  s.gamma_b = gamma_b;
  s.auto_c = auto_c;
  s.smoothing = smoothing;
  if (is_decsps_family(rule)) {
    s.gamma_prev = gamma_b;  // gamma_{-1} = gamma_b
    s.c_prev = c;            // c_{-1} = c_0 = c
  } else if (is_adasps_family(rule)) {
    s.gamma_prev = std::nullopt;  // gamma_{-1} = +inf, kept symbolic
  } else {
    s.gamma_prev = gamma_b;  // seeds the smoothing recursion
  }
  return s;
}

// gamma_b^t = tau^{B/n} * gamma_{t-1}.
inline double smoothed_gamma_b(const StepSizeState& s) {
  if (!s.smoothing || !s.gamma_prev)
    throw config_error("smoothed_gamma_b requires smoothing and a previous step");
  return std::pow(s.smoothing->tau, s.smoothing->batch_ratio) * *s.gamma_prev;
}

// min with the second arm possibly absent (uncapped); no arithmetic ever
// touches an infinity.
namespace detail {
inline double capped_min(double first, std::optional<double> cap, bool* hit) {
  if (cap && *cap < first) {
    *hit = true;
    return *cap;
  }
  *hit = false;
  return first;
}
}  // namespace detail

// Advances a step-size policy on one batch observation. gap = f_S(x)-l_S*
// (clamped at 0: a negative gap is lower-bound roundoff) and g2 = ||grad||^2.
// The momentum rules and their beta=0 ancestors share each kernel verbatim,
// so beta = 0 reproduces the ancestor value bit-for-bit.
inline StepDecision advance(const StepSizeState& state, double gap, double g2) {
  StepDecision d;
  d.next = state;
  d.next.t = state.t + 1;
  gap = std::max(gap, 0.0);

  const Rule rule = state.rule;
  if (is_constant_rule(rule)) {
    d.gamma = state.gamma_b;
    return d;
  }

  if (is_adasps_family(rule)) d.next.gap_sum = state.gap_sum + gap;

  if (g2 <= kZeroGradientG2) {
    d.gamma = 0.0;
    return d;
  }

  const double scale = uses_momentum_factor(rule) ? 1.0 - state.beta : 1.0;

  if (rule == Rule::polyak_deterministic) {
    d.gamma = gap / g2;
    d.next.gamma_prev = d.gamma;
    return d;
  }

  if (is_sps_family(rule)) {
    const double q =
        (rule == Rule::mom_ps_max) ? gap / g2 : gap / (state.c * g2);
    if (state.smoothing) {
      // Smoothed cap binds on the final step-size: the recursion lives on
      // the IMA step, so the (1-beta) factor scales only the Polyak arm.
      const double cap = smoothed_gamma_b(state);
      d.gamma = detail::capped_min(scale * q, cap, &d.capped);
    } else {
      std::optional<double> cap;
      if (std::isfinite(state.gamma_b)) cap = state.gamma_b;
      d.gamma = scale * detail::capped_min(q, cap, &d.capped);
    }
    d.next.gamma_prev = d.gamma;
    return d;
  }

  if (is_decsps_family(rule)) {
    const double c_t = state.c * std::sqrt(static_cast<double>(state.t) + 1.0);
    const double quotient = gap / (c_t * g2);
    const double chain = *state.gamma_prev * state.c_prev / c_t;
    if (rule == Rule::alt_mom_decsps) {
      d.gamma = scale * detail::capped_min(quotient, chain, &d.capped);
    } else {
      d.gamma = detail::capped_min(scale * quotient, chain, &d.capped);
    }
    d.next.gamma_prev = d.gamma;
    d.next.c_prev = c_t;
    return d;
  }

  // AdaSPS family.
  if (state.auto_c && gap > 0.0) {
    d.next.auto_c = false;
    d.next.c = 1.0 / std::sqrt(gap);
  }
  const double c_eff = (state.auto_c && gap > 0.0) ? d.next.c : state.c;
  if (d.next.gap_sum <= 0.0) {
    d.gamma = 0.0;  // no accumulated gap yet; pure momentum step
    return d;
  }
  const double quotient = gap / (c_eff * g2 * std::sqrt(d.next.gap_sum));
  if (rule == Rule::alt_mom_adasps) {
    d.gamma = scale * detail::capped_min(quotient, state.gamma_prev, &d.capped);
  } else {
    d.gamma = detail::capped_min(scale * quotient, state.gamma_prev, &d.capped);
  }
  d.next.gamma_prev = d.gamma;
  return d;
}

// Constant step-size admissible under the bounded-variance analysis of
// constant-momentum SHB: (1-b)^2/L * min{1/(4-b+b^2), 1/(2 sqrt(2b+2b^2))}.
// At b = 0 the second arm degenerates to 1/0 and is treated as +inf.
inline double constant_liu(double beta, double l) {
  if (beta < 0.0 || beta >= 1.0)
    throw config_error("beta must lie in [0,1)");
  if (!(l > 0.0)) throw config_error("L must be positive");
  const double one_minus = 1.0 - beta;
  const double arm1 = 1.0 / (4.0 - beta + beta * beta);
  double m = arm1;
  if (beta > 0.0) {
    const double arm2 = 1.0 / (2.0 * std::sqrt(2.0 * beta + 2.0 * beta * beta));
    m = std::min(arm1, arm2);
  }
  return one_minus * one_minus / l * m;
}

struct ImaEquivalent {
  double eta = 0.0;
  double lambda = 0.0;
};

// SHB(gamma, beta) corresponds to IMA with lambda = beta/(1-beta) and
// eta = gamma/(1-beta).
inline ImaEquivalent ima_equivalent_eta(double gamma, double beta) {
  if (beta < 0.0 || beta >= 1.0)
    throw config_error("beta must lie in [0,1)");
  return ImaEquivalent{gamma / (1.0 - beta), beta / (1.0 - beta)};
}

}  // namespace shb

#endif  // SHB_STEPSIZES_HPP
