#ifndef SHB_EXPERIMENTS_HPP
#define SHB_EXPERIMENTS_HPP

#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shb/bounds.hpp"
#include "shb/config.hpp"
#include "shb/gradcheck.hpp"
#include "shb/libsvm.hpp"
#include "shb/optimizers.hpp"
#include "shb/problem_io.hpp"
#include "shb/problems.hpp"

namespace shb {

inline FiniteSumProblem build_problem(const ExperimentConfig& cfg) {
  FiniteSumProblem p;
  switch (cfg.problem) {
    case ProblemKind::least_squares:
      p = generate_least_squares(cfg.n, cfg.d, cfg.cond, cfg.consistent,
                                 cfg.problem_seed, cfg.noise_std);
      break;
    case ProblemKind::logistic:
      p = generate_logistic(cfg.n, cfg.d, cfg.separable, cfg.problem_seed);
      break;
    case ProblemKind::libsvm: {
      std::ifstream in(cfg.data_path);
      if (!in) throw config_error("cannot open " + cfg.data_path);
      p = problem_from_libsvm(parse_libsvm(in));
      break;
    }
    case ProblemKind::file: {
      std::ifstream in(cfg.data_path);
      if (!in) throw config_error("cannot open " + cfg.data_path);
      p = read_problem(in);
      break;
    }
  }
  const bool needs_metadata = cfg.solve_reference_metadata ||
                              !cfg.bounds.empty() ||
                              is_deterministic_rule(cfg.rule);
  if (needs_metadata && !p.metadata) p.metadata = solve_reference(p);
  return p;
}

inline Vector make_x0(const ExperimentConfig& cfg, int dim) {
  if (cfg.x0 == X0Kind::zero) return Vector::Zero(dim);
  std::mt19937_64 rng(mix_seed(cfg.problem_seed, 17));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector x(dim);
  for (int j = 0; j < dim; ++j) x(j) = cfg.x0_scale * gauss(rng);
  return x;
}

inline double problem_l_max(const FiniteSumProblem& p) {
  if (p.metadata) return p.metadata->l_max;
  double l = 0.0;
  bool any = false;
  for (const Component& c : p.components) {
    if (c.smoothness) {
      l = std::max(l, *c.smoothness);
      any = true;
    }
  }
  if (!any) throw config_error("no smoothness constants available");
  return l;
}

inline StepSizeState make_policy(const ExperimentConfig& cfg,
                                 const FiniteSumProblem& problem, Rule rule) {
  double gamma_b = cfg.gamma_b;
  if (rule == Rule::constant) {
    gamma_b = cfg.gamma;
  } else if (rule == Rule::constant_liu) {
    gamma_b = constant_liu(cfg.beta, problem_l_max(problem));
  }
  std::optional<Smoothing> smoothing;
  if (cfg.smoothing && is_sps_family(rule)) {
    smoothing = Smoothing{cfg.tau, static_cast<double>(cfg.batch_size) /
                                       static_cast<double>(problem.n())};
  }
  const bool auto_c = cfg.auto_c && is_adasps_family(rule);
  return make_state(rule, cfg.beta, cfg.c, gamma_b, smoothing, auto_c);
}

inline std::optional<ProjectionSet> make_projection(const ExperimentConfig& cfg,
                                                    int dim) {
  if (cfg.projection == ProjectionKind::none) return std::nullopt;
  ProjectionSet set;
  if (cfg.projection == ProjectionKind::ball) {
    set.kind = ProjectionSet::Kind::ball;
    set.center = Vector::Zero(dim);
    set.radius = cfg.radius;
  } else {
    set.kind = ProjectionSet::Kind::box;
    set.lower = Vector::Constant(dim, -cfg.box_half_width);
    set.upper = Vector::Constant(dim, cfg.box_half_width);
  }
  return set;
}

// One record per seed; seed-level parallelism, records merged in seed order.
inline std::vector<RunRecord> run_experiment(const FiniteSumProblem& problem,
                                             const ExperimentConfig& cfg,
                                             Rule rule, int run_id_base = 0) {
  const Vector x0 = make_x0(cfg, problem.dim);
  const StepSizeState policy = make_policy(cfg, problem, rule);
  const auto projection = make_projection(cfg, problem.dim);

  OptimizerKind kind = OptimizerKind::shb;
  if (cfg.optimizer == "ima") kind = OptimizerKind::ima;
  if (cfg.optimizer == "projected_ima") kind = OptimizerKind::projected_ima;

  std::vector<std::future<RunRecord>> futures;
  futures.reserve(cfg.seeds.size());
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    RunOptions opt;
    opt.kind = kind;
    opt.policy = policy;
    opt.beta = cfg.beta;
    opt.iterations = cfg.iterations;
    opt.batch_size = cfg.batch_size;
    opt.seed = mix_seed(cfg.seeds[i], i);
    opt.run_id = run_id_base + static_cast<int>(i);
    opt.x0 = x0;
    opt.log_every = cfg.log_every;
    opt.projection = projection;
    futures.push_back(std::async(std::launch::async, [&problem, opt]() {
      return run(problem, opt);
    }));
  }
  std::vector<RunRecord> records;
  records.reserve(futures.size());
  for (auto& f : futures) records.push_back(f.get());
  for (std::size_t i = 0; i < records.size(); ++i)
    records[i].seed = cfg.seeds[i];  // report the master seed, not the stream
  return records;
}

// Evaluates the requested theorem bounds against measured records. sigma^2
// comes from estimate_sigma2 at the run's batch size; L_max from metadata.
inline std::vector<BoundReport> evaluate_bounds(
    const FiniteSumProblem& problem, const ExperimentConfig& cfg,
    const std::vector<RunRecord>& records) {
  if (cfg.bounds.empty()) return {};
  if (!problem.metadata)
    throw config_error("bound checks need problem metadata");
  const ProblemMetadata& meta = *problem.metadata;

  const Vector x0 = make_x0(cfg, problem.dim);
  const double x0_dist_sq = (x0 - meta.x_star).squaredNorm();
  const Sigma2Estimate s2 =
      estimate_sigma2(problem, meta, cfg.batch_size, 20000, 99);
  double f0_gap = 0.0;
  double d_sq = 0.0;
  for (const RunRecord& r : records) {
    if (!r.rows.empty()) f0_gap = std::max(f0_gap, r.rows.front().subopt);
    if (std::isfinite(r.d_sq)) d_sq = std::max(d_sq, r.d_sq);
  }

  std::vector<BoundReport> reports;
  for (const std::string& name : cfg.bounds) {
    if (name == "thm31") {
      if (cfg.c != 1.0) throw config_error("thm31 requires c = 1");
      const Thm31Bound b = thm31_bound(x0_dist_sq, cfg.iterations, cfg.beta,
                                       cfg.gamma_b, meta.l_max, s2.value);
      reports.push_back(check_bound(
          records, name, b.rhs, meta.f_star,
          {{"alpha", b.alpha}, {"c1", b.c1}, {"c2", b.c2},
           {"beta_max", b.beta_max}, {"sigma2", s2.value},
           {"x0_dist_sq", x0_dist_sq}, {"gamma_b", cfg.gamma_b},
           {"beta", cfg.beta}, {"l_max", meta.l_max}}));
    } else if (name == "cor34") {
      if (cfg.rule != Rule::constant)
        throw config_error("cor34 applies to the constant rule");
      validate_cor34(cfg.gamma, cfg.beta, meta.l_max);
      const double rhs =
          cor34_bound(x0_dist_sq, cfg.iterations, cfg.gamma, s2.value);
      reports.push_back(check_bound(records, name, rhs, meta.f_star,
                                    {{"gamma", cfg.gamma},
                                     {"sigma2", s2.value},
                                     {"x0_dist_sq", x0_dist_sq},
                                     {"beta", cfg.beta}}));
    } else if (name == "thm35") {
      if (cfg.c != 1.0) throw config_error("thm35 requires c = 1");
      const double alpha = std::min(1.0 / (2.0 * meta.l_max), cfg.gamma_b);
      const double rhs = thm35_bound(f0_gap, d_sq, cfg.iterations, cfg.beta,
                                     alpha, s2.value);
      reports.push_back(check_bound(records, name, rhs, meta.f_star,
                                    {{"alpha", alpha}, {"d_sq", d_sq},
                                     {"f0_gap", f0_gap}, {"sigma2", s2.value},
                                     {"beta", cfg.beta}}));
    } else if (name == "thm36") {
      const Thm36Bound b =
          thm36_bound(f0_gap, d_sq, cfg.iterations, cfg.beta, cfg.c,
                      meta.l_max, std::sqrt(std::max(s2.value, 0.0)));
      reports.push_back(check_bound(records, name, b.rhs, meta.f_star,
                                    {{"theta", b.theta}, {"d_sq", d_sq},
                                     {"f0_gap", f0_gap}, {"sigma2", s2.value},
                                     {"c", cfg.c}, {"beta", cfg.beta}}));
    }
  }
  return reports;
}

}  // namespace shb

#endif  // SHB_EXPERIMENTS_HPP
