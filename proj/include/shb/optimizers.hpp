#ifndef SHB_OPTIMIZERS_HPP
#define SHB_OPTIMIZERS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "shb/common.hpp"
#include "shb/problems.hpp"
#include "shb/records.hpp"
#include "shb/sampling.hpp"
#include "shb/stepsizes.hpp"

namespace shb {

// Heavy-ball iterate pair. x_prev starts at x^0, so the first step is a
// plain SGD step.
struct ShbState {
  Vector x;
  Vector x_prev;
};

inline ShbState shb_step(const ShbState& s, double gamma, double beta,
                         const Vector& grad) {
  ShbState next;
  next.x = s.x - gamma * grad + beta * (s.x - s.x_prev);
  next.x_prev = s.x;
  return next;
}

// Iterate-moving-average form: an SGD step on z followed by a convex
// combination with weight lambda/(lambda+1) on the old x.
struct ImaState {
  Vector z;
  Vector x;
  double lambda = 0.0;
};

inline ImaState ima_step(const ImaState& s, double eta, const Vector& grad) {
  ImaState next;
  next.lambda = s.lambda;
  next.z = s.z - eta * grad;
  const double w = 1.0 / (s.lambda + 1.0);
  next.x = (s.lambda * w) * s.x + w * next.z;
  return next;
}

// Compact convex feasible set: Euclidean ball or per-coordinate box.
struct ProjectionSet {
  enum class Kind { ball, box };
  Kind kind = Kind::ball;
  Vector center;  // ball
  double radius = 1.0;
  Vector lower, upper;  // box

  Vector project(const Vector& v) const {
    if (kind == Kind::ball) {
      const Vector d = v - center;
      const double norm = d.norm();
      if (norm <= radius) return v;
      return center + (radius / norm) * d;
    }
    return v.cwiseMax(lower).cwiseMin(upper);
  }

  bool contains(const Vector& v, double tol = 1e-12) const {
    return (v - project(v)).norm() <= tol;
  }
};

// Only z is projected; x stays feasible as a convex combination of feasible
// points.
inline ImaState projected_ima_step(const ImaState& s, double eta,
                                   const Vector& grad,
                                   const ProjectionSet& set) {
  ImaState next;
  next.lambda = s.lambda;
  next.z = set.project(s.z - eta * grad);
  const double w = 1.0 / (s.lambda + 1.0);
  next.x = (s.lambda * w) * s.x + w * next.z;
  return next;
}

enum class OptimizerKind { shb, ima, projected_ima };

struct RunOptions {
  OptimizerKind kind = OptimizerKind::shb;
  StepSizeState policy;
  double beta = 0.0;  // momentum of the update rule
  long iterations = 1;
  int batch_size = 1;
  std::uint64_t seed = 0;  // stream seed for this run's sampler
  int run_id = 0;
  Vector x0;
  long log_every = 0;  // 0: every iteration up to 1e4 logged rows
  std::optional<ProjectionSet> projection{};
  double divergence_factor = 1e8;
};

namespace detail {

inline std::vector<long> cesaro_checkpoints(long T) {
  std::set<long> pts;
  for (long p = 1; p <= T && p > 0; p *= 2) pts.insert(p);
  for (long p = 1; p <= T && p > 0; p *= 10) pts.insert(p);
  pts.insert(T);
  return {pts.begin(), pts.end()};
}

}  // namespace detail

// Executes sample -> evaluate -> step-size -> step for T iterations,
// logging the full objective, the suboptimality and squared distance when
// reference metadata exists, and every emitted step-size at the logging
// cadence. Divergence (non-finite f, or f above divergence_factor times its
// start) truncates the record and sets the flag instead of throwing.
inline RunRecord run(const FiniteSumProblem& problem, const RunOptions& opt) {
  if (opt.iterations < 1) throw config_error("T must be >= 1");
  if (opt.beta < 0.0 || opt.beta >= 1.0)
    throw config_error("beta must lie in [0,1)");
  if (uses_momentum_factor(opt.policy.rule) && opt.policy.beta != opt.beta)
    throw config_error("momentum rules must share beta with the update rule");
  if (is_deterministic_rule(opt.policy.rule)) {
    if (opt.batch_size != problem.n())
      throw config_error("deterministic Polyak rules need the full batch");
    if (!problem.metadata)
      throw config_error("deterministic Polyak rules need f(x*) metadata");
  }
  if (opt.x0.size() != problem.dim)
    throw config_error("x0 dimension mismatch");
  if (opt.kind == OptimizerKind::projected_ima) {
    if (!opt.projection) throw config_error("projected run needs a projection set");
    if (!opt.projection->contains(opt.x0))
      throw config_error("x0 lies outside the projection set");
  }

  const auto t_start = std::chrono::steady_clock::now();
  const bool full_batch = opt.batch_size == problem.n();
  const long log_every =
      opt.log_every > 0
          ? opt.log_every
          : (opt.iterations <= 10000 ? 1 : (opt.iterations + 9999) / 10000);

  RunRecord rec;
  rec.run_id = opt.run_id;
  rec.seed = opt.seed;
  rec.iterations = opt.iterations;

  const ProblemMetadata* meta =
      problem.metadata ? &*problem.metadata : nullptr;
  const double f_star = meta ? meta->f_star : 0.0;

  MinibatchSampler sampler(problem.n(), opt.batch_size, opt.seed);
  StepSizeState policy = opt.policy;

  ShbState shb{opt.x0, opt.x0};
  ImaState ima;
  const bool use_ima = opt.kind != OptimizerKind::shb;
  if (use_ima) {
    ima.z = opt.x0;
    ima.x = opt.x0;
    ima.lambda = opt.beta / (1.0 - opt.beta);
  }

  Vector cesaro_sum = Vector::Zero(problem.dim);
  const std::vector<long> checkpoints = detail::cesaro_checkpoints(opt.iterations);
  std::size_t next_checkpoint = 0;
  double f0 = 0.0;
  double d_max = std::numeric_limits<double>::quiet_NaN();

  for (long t = 0; t < opt.iterations; ++t) {
    const Vector& x = use_ima ? ima.x : shb.x;
    if (!x.allFinite()) {
      rec.diverged = true;
      break;
    }

    BatchEval eval;
    std::vector<int> batch;
    try {
      batch = sampler.next();
      eval = evaluate_batch(problem, batch, x);
    } catch (const numerical_error&) {
      rec.diverged = true;
      break;
    }

    const bool log_this = (t % log_every) == 0;
    double f_t = 0.0;
    if (log_this) {
      if (full_batch) {  // identical summation order to full_objective
        f_t = eval.value;
      } else {
        try {
          f_t = full_objective(problem, x);
        } catch (const numerical_error&) {
          rec.diverged = true;
          break;
        }
      }
    }

    if (log_this) {
      if (t == 0) f0 = f_t;
      if (!std::isfinite(f_t) ||
          f_t > opt.divergence_factor * std::max(1.0, f0)) {
        rec.diverged = true;
        break;
      }
      TrajectoryRow row;
      row.t = t;
      row.f = f_t;
      if (meta) {
        row.subopt = f_t - f_star;
        row.dist_sq = (x - meta->x_star).squaredNorm();
        d_max = std::isfinite(d_max) ? std::max(d_max, row.dist_sq) : row.dist_sq;
      }
      rec.rows.push_back(row);
    }

    const double gap = is_deterministic_rule(policy.rule)
                           ? eval.value - f_star
                           : eval.value - eval.lower_bound;
    const double g2 = eval.gradient.squaredNorm();
    StepDecision dec = advance(policy, gap, g2);
    policy = std::move(dec.next);
    if (log_this) rec.rows.back().gamma = dec.gamma;

    cesaro_sum += x;
    while (next_checkpoint < checkpoints.size() &&
           checkpoints[next_checkpoint] == t + 1) {
      const long tc = checkpoints[next_checkpoint];
      Vector xbar = cesaro_sum / static_cast<double>(tc);
      CesaroRow crow;
      crow.t = tc;
      try {
        crow.f = full_objective(problem, xbar);
      } catch (const numerical_error&) {
        crow.f = std::numeric_limits<double>::quiet_NaN();
      }
      if (meta) crow.subopt = crow.f - f_star;
      rec.cesaro.push_back(crow);
      ++next_checkpoint;
    }

    if (use_ima) {
      const double eta = dec.gamma / (1.0 - opt.beta);
      ima = (opt.kind == OptimizerKind::projected_ima)
                ? projected_ima_step(ima, eta, eval.gradient, *opt.projection)
                : ima_step(ima, eta, eval.gradient);
    } else {
      shb = shb_step(shb, dec.gamma, opt.beta, eval.gradient);
    }
  }

  if (!rec.diverged && !rec.cesaro.empty()) {
    rec.f_cesaro = rec.cesaro.back().f;
  }
  rec.d_sq = d_max;
  rec.wallclock_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
  return rec;
}

// Runs SHB with gamma_t and IMA with eta_t = gamma_t/(1-beta),
// lambda = beta/(1-beta) on one shared batch stream; returns
// max_t ||x_t^SHB - x_t^IMA||. Each method evaluates its own policy copy at
// its own iterate.
inline double run_equivalence_pair(const FiniteSumProblem& problem,
                                   const StepSizeState& policy, double beta,
                                   long iterations, int batch_size,
                                   std::uint64_t seed, const Vector& x0) {
  if (beta < 0.0 || beta >= 1.0)
    throw config_error("beta must lie in [0,1)");
  if (uses_momentum_factor(policy.rule) && policy.beta != beta)
    throw config_error("momentum rules must share beta with the update rule");
  MinibatchSampler sampler(problem.n(), batch_size, seed);
  StepSizeState pol_shb = policy;
  StepSizeState pol_ima = policy;

  ShbState shb{x0, x0};
  ImaState ima{x0, x0, beta / (1.0 - beta)};

  double max_dev = 0.0;
  for (long t = 0; t < iterations; ++t) {
    const std::vector<int> batch = sampler.next();

    const BatchEval es = evaluate_batch(problem, batch, shb.x);
    StepDecision ds = advance(pol_shb, es.value - es.lower_bound,
                              es.gradient.squaredNorm());
    pol_shb = ds.next;

    const BatchEval ei = evaluate_batch(problem, batch, ima.x);
    StepDecision di = advance(pol_ima, ei.value - ei.lower_bound,
                              ei.gradient.squaredNorm());
    pol_ima = di.next;

    shb = shb_step(shb, ds.gamma, beta, es.gradient);
    ima = ima_step(ima, di.gamma / (1.0 - beta), ei.gradient);
    max_dev = std::max(max_dev, (shb.x - ima.x).norm());
  }
  return max_dev;
}

}  // namespace shb

#endif  // SHB_OPTIMIZERS_HPP
