#ifndef SHB_PRESETS_HPP
#define SHB_PRESETS_HPP

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "shb/optimizers.hpp"
#include "shb/problems.hpp"
#include "shb/records.hpp"
#include "shb/bounds.hpp"

namespace shb {

// One step-size configuration executed over a list of seeds.
struct PresetRun {
  std::string label;
  Rule rule = Rule::sps_max;
  double beta = 0.0;
  std::vector<RunRecord> records;
};

struct PresetResult {
  std::string name;
  std::vector<PresetRun> runs;
  std::vector<std::pair<std::string, std::string>> notes;
  // f5consts tabulates constants instead of running anything.
  std::vector<std::array<double, 3>> consts_table;  // beta, C1, C2
};

namespace detail {

// Compact value for file names and run labels.
inline std::string label_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline std::vector<RunRecord> preset_runs(const FiniteSumProblem& problem,
                                          RunOptions opt,
                                          const std::vector<std::uint64_t>& seeds) {
  std::vector<RunRecord> records;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    opt.seed = mix_seed(seeds[i], i);
    opt.run_id = static_cast<int>(i);
    records.push_back(run(problem, opt));
    records.back().seed = seeds[i];
  }
  return records;
}

}  // namespace detail

// Naive SPS_max momentum against the momentum-corrected step on synthetic
// non-separable logistic data. Both decrease the loss at beta = 0.2; the
// naive rule destabilizes at beta = 0.5.
inline PresetResult run_preset_fig1() {
  PresetResult res;
  res.name = "fig1";
  const FiniteSumProblem problem = generate_logistic(200, 20, false, 7);
  const std::vector<std::uint64_t> seeds{1, 2, 3};

  RunOptions base;
  base.kind = OptimizerKind::shb;
  base.iterations = 3000;
  base.batch_size = 1;
  base.x0 = Vector::Zero(problem.dim);

  for (double beta : {0.2, 0.5}) {
    {
      RunOptions opt = base;
      opt.beta = beta;
      opt.policy = make_state(Rule::sps_max, 0.0, 1.0, 10.0);
      PresetRun run_set;
      run_set.label = "naive_sps_max_beta" + detail::label_double(beta);
      run_set.rule = Rule::sps_max;
      run_set.beta = beta;
      run_set.records = detail::preset_runs(problem, opt, seeds);
      res.runs.push_back(std::move(run_set));
    }
    {
      RunOptions opt = base;
      opt.beta = beta;
      opt.policy = make_state(Rule::mom_sps_max, beta, 1.0, 10.0);
      PresetRun run_set;
      run_set.label = "mom_sps_max_beta" + detail::label_double(beta);
      run_set.rule = Rule::mom_sps_max;
      run_set.beta = beta;
      run_set.records = detail::preset_runs(problem, opt, seeds);
      res.runs.push_back(std::move(run_set));
    }
  }
  res.notes.emplace_back("problem", "logistic n=200 d=20 non-separable seed=7");
  res.notes.emplace_back("gamma_b", "10");
  res.notes.emplace_back("batch_size", "1");
  return res;
}

// Deterministic ill-conditioned least squares: Polyak-step GD versus the
// capped momentum-corrected Polyak heavy ball at the acceleration-optimal
// beta, plus classically tuned heavy ball for reference. Desk scale:
// n = d = 200 instead of 1000, same cond(A^T A) = 1e4.
inline PresetResult run_preset_fig2() {
  PresetResult res;
  res.name = "fig2";
  const FiniteSumProblem problem =
      generate_least_squares(200, 200, 1e4, true, 11);
  const ProblemMetadata& meta = *problem.metadata;
  const HeavyBallParams hb = optimal_hb_params(*meta.l_full, *meta.mu);

  RunOptions base;
  base.kind = OptimizerKind::shb;
  base.batch_size = problem.n();
  base.x0 = Vector::Zero(problem.dim);
  const std::vector<std::uint64_t> seeds{0};

  {
    RunOptions opt = base;
    opt.beta = 0.0;
    opt.iterations = 5000;
    opt.policy = make_state(Rule::polyak_deterministic, 0.0, 1.0, 1.0);
    PresetRun r;
    r.label = "gd_polyak";
    r.rule = Rule::polyak_deterministic;
    r.beta = 0.0;
    r.records = detail::preset_runs(problem, opt, seeds);
    res.runs.push_back(std::move(r));
  }
  {
    RunOptions opt = base;
    opt.beta = hb.beta_star;
    opt.iterations = 5000;
    opt.policy = make_state(Rule::mom_ps_max, hb.beta_star, 1.0, 100.0);
    PresetRun r;
    r.label = "mom_ps_max";
    r.rule = Rule::mom_ps_max;
    r.beta = hb.beta_star;
    r.records = detail::preset_runs(problem, opt, seeds);
    res.runs.push_back(std::move(r));
  }
  {
    RunOptions opt = base;
    opt.beta = hb.beta_star;
    opt.iterations = 5000;
    opt.policy = make_state(Rule::constant, hb.beta_star, 1.0, hb.gamma_star);
    PresetRun r;
    r.label = "hb_optimal";
    r.rule = Rule::constant;
    r.beta = hb.beta_star;
    r.records = detail::preset_runs(problem, opt, seeds);
    res.runs.push_back(std::move(r));
  }
  res.notes.emplace_back("problem",
                         "least_squares n=200 d=200 cond=1e4 consistent seed=11");
  res.notes.emplace_back("desk_scale", "n=d=200, reduced from 1000 for runtime");
  res.notes.emplace_back("beta_star", format_double(hb.beta_star));
  res.notes.emplace_back("gamma_star", format_double(hb.gamma_star));
  res.notes.emplace_back("gamma_b", "100");
  return res;
}

// Constant-step momentum presets: (1-b)/(2 L_max) against the
// bounded-variance admissible constant, across momentum values.
inline PresetResult run_preset_f2const() {
  PresetResult res;
  res.name = "f2const";
  const FiniteSumProblem problem = generate_logistic(200, 20, false, 7);
  double l_max = 0.0;
  for (const Component& c : problem.components)
    l_max = std::max(l_max, *c.smoothness);
  const std::vector<std::uint64_t> seeds{1, 2, 3};

  RunOptions base;
  base.kind = OptimizerKind::shb;
  base.iterations = 2000;
  base.batch_size = 10;
  base.x0 = Vector::Zero(problem.dim);

  for (double beta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    {
      RunOptions opt = base;
      opt.beta = beta;
      opt.policy =
          make_state(Rule::constant, beta, 1.0, (1.0 - beta) / (2.0 * l_max));
      PresetRun r;
      r.label = "const_ours_beta" + detail::label_double(beta);
      r.rule = Rule::constant;
      r.beta = beta;
      r.records = detail::preset_runs(problem, opt, seeds);
      res.runs.push_back(std::move(r));
    }
    {
      RunOptions opt = base;
      opt.beta = beta;
      opt.policy =
          make_state(Rule::constant_liu, beta, 1.0, constant_liu(beta, l_max));
      PresetRun r;
      r.label = "const_liu_beta" + detail::label_double(beta);
      r.rule = Rule::constant_liu;
      r.beta = beta;
      r.records = detail::preset_runs(problem, opt, seeds);
      res.runs.push_back(std::move(r));
    }
  }
  res.notes.emplace_back("problem", "logistic n=200 d=20 non-separable seed=7");
  res.notes.emplace_back("l_max", format_double(l_max));
  return res;
}

// Correcting factor inside versus outside the min for the decreasing rules.
inline PresetResult run_preset_f3alt() {
  PresetResult res;
  res.name = "f3alt";
  const FiniteSumProblem problem = generate_logistic(200, 20, false, 7);
  const std::vector<std::uint64_t> seeds{1, 2, 3};

  RunOptions base;
  base.kind = OptimizerKind::shb;
  base.iterations = 500;
  base.batch_size = 1;
  base.x0 = Vector::Zero(problem.dim);

  const std::vector<std::pair<Rule, Rule>> pairs{
      {Rule::mom_decsps, Rule::alt_mom_decsps},
      {Rule::mom_adasps, Rule::alt_mom_adasps}};
  for (double beta : {0.0, 0.3, 0.6, 0.9}) {
    for (const auto& [mom_rule, alt_rule] : pairs) {
      for (Rule rule : {mom_rule, alt_rule}) {
        RunOptions opt = base;
        opt.beta = beta;
        opt.policy = make_state(rule, beta, 1.0, 10.0);
        PresetRun r;
        r.label = std::string(rule_name(rule)) + "_beta" + detail::label_double(beta);
        r.rule = rule;
        r.beta = beta;
        r.records = detail::preset_runs(problem, opt, seeds);
        res.runs.push_back(std::move(r));
      }
    }
  }
  res.notes.emplace_back("problem", "logistic n=200 d=20 non-separable seed=7");
  res.notes.emplace_back("gamma_b", "10");
  return res;
}

// Cap sensitivity of the deterministic momentum-corrected Polyak step.
inline PresetResult run_preset_f4gammab() {
  PresetResult res;
  res.name = "f4gammab";
  const FiniteSumProblem problem =
      generate_least_squares(200, 200, 1e4, true, 11);
  const std::vector<std::uint64_t> seeds{0};

  RunOptions base;
  base.kind = OptimizerKind::shb;
  base.iterations = 5000;
  base.batch_size = problem.n();
  base.x0 = Vector::Zero(problem.dim);

  const double beta = 0.97;
  for (double gamma_b : {0.1, 0.5, 1.0, 10.0}) {
    RunOptions opt = base;
    opt.beta = beta;
    opt.policy = make_state(Rule::mom_ps_max, beta, 1.0, gamma_b);
    PresetRun r;
    r.label = "mom_ps_max_gb" + detail::label_double(gamma_b);
    r.rule = Rule::mom_ps_max;
    r.beta = beta;
    r.records = detail::preset_runs(problem, opt, seeds);
    res.runs.push_back(std::move(r));
  }
  {
    RunOptions opt = base;
    opt.beta = 0.0;
    opt.policy = make_state(Rule::polyak_deterministic, 0.0, 1.0, 1.0);
    PresetRun r;
    r.label = "gd_polyak";
    r.rule = Rule::polyak_deterministic;
    r.beta = 0.0;
    r.records = detail::preset_runs(problem, opt, seeds);
    res.runs.push_back(std::move(r));
  }
  res.notes.emplace_back("problem",
                         "least_squares n=200 d=200 cond=1e4 consistent seed=11");
  res.notes.emplace_back("beta", format_double(beta));
  return res;
}

// C1(beta), C2(beta) for gamma_b = 2, alpha = 1 over the admissible range.
inline PresetResult run_preset_f5consts() {
  PresetResult res;
  res.name = "f5consts";
  const double gamma_b = 2.0;
  const double l_max = 0.5;  // alpha = min{1/(2 l_max), gamma_b} = 1
  const double beta_max = 1.0 / 3.0;
  for (double beta = 0.0; beta < beta_max - 1e-9; beta += 0.02) {
    const Thm31Bound b = thm31_bound(0.0, 1, beta, gamma_b, l_max, 0.0);
    res.consts_table.push_back({beta, b.c1, b.c2});
  }
  res.notes.emplace_back("gamma_b", "2");
  res.notes.emplace_back("alpha", "1");
  return res;
}

inline PresetResult run_preset(const std::string& name) {
  if (name == "fig1") return run_preset_fig1();
  if (name == "fig2") return run_preset_fig2();
  if (name == "f2const") return run_preset_f2const();
  if (name == "f3alt") return run_preset_f3alt();
  if (name == "f4gammab") return run_preset_f4gammab();
  if (name == "f5consts") return run_preset_f5consts();
  throw config_error("unknown preset '" + name + "'");
}

// Plot-ready CSV per run set plus a manifest of the preset parameters.
inline void write_preset(const PresetResult& res, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream manifest(fs::path(out_dir) / (res.name + "_manifest.txt"));
    manifest << "preset " << res.name << '\n';
    for (const auto& [key, value] : res.notes)
      manifest << key << ' ' << value << '\n';
    for (const PresetRun& r : res.runs) {
      manifest << "run " << r.label << " rule=" << rule_name(r.rule)
               << " beta=" << format_double(r.beta);
      for (const RunRecord& rec : r.records)
        if (rec.diverged) manifest << " diverged[seed=" << rec.seed << "]";
      manifest << '\n';
    }
  }
  if (!res.consts_table.empty()) {
    std::ofstream csv(fs::path(out_dir) / (res.name + ".csv"));
    csv << "beta,c1,c2\n";
    for (const auto& row : res.consts_table)
      csv << format_double(row[0]) << ',' << format_double(row[1]) << ','
          << format_double(row[2]) << '\n';
  }
  for (const PresetRun& r : res.runs) {
    std::ofstream csv(fs::path(out_dir) / (res.name + "_" + r.label + ".csv"));
    emit_csv(csv, r.records);
    std::ofstream ces(fs::path(out_dir) /
                      (res.name + "_" + r.label + "_cesaro.csv"));
    emit_cesaro_csv(ces, r.records);
  }
}

}  // namespace shb

#endif  // SHB_PRESETS_HPP
