// Command-line front end: generate problems, execute experiment configs,
// compare step-size rules, evaluate theorem bounds on stored records, and
// replicate the built-in experiment presets.
//
// Exit codes: 0 success; 2 configuration error; 3 a run diverged;
// 4 a requested bound check failed; 1 I/O or internal error.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "shb/experiments.hpp"
#include "shb/presets.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitBound = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string seeds_override;
  bool quiet = false;
};

std::string resolve_out_dir(const CommonArgs& args,
                            const shb::ExperimentConfig* cfg) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (cfg && !cfg->out_dir.empty()) return cfg->out_dir;
  if (const char* env = std::getenv("SHB_OUT_DIR")) return env;
  return "out";
}

// Loads and validates the config file; prints every validation error.
int load_config(const CommonArgs& args, shb::ExperimentConfig& cfg) {
  if (args.config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return kExitConfig;
  }
  std::string text;
  try {
    text = read_file(args.config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  shb::ConfigParseResult res = shb::parse_config(text);
  if (!args.seeds_override.empty() && res.config) {
    res.config->seeds.clear();
    std::istringstream ss(args.seeds_override);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        res.config->seeds.push_back(std::stoull(tok));
      } catch (...) {
        res.errors.push_back("seeds: cannot parse '" + tok + "'");
      }
    }
    if (res.config->seeds.empty())
      res.errors.push_back("seeds: at least one seed");
  }
  if (!res.ok()) {
    for (const std::string& e : res.errors)
      std::cerr << "config error: " << e << '\n';
    return kExitConfig;
  }
  cfg = *res.config;
  return kExitOk;
}

void write_records(const fs::path& dir, const std::string& stem,
                   const std::vector<shb::RunRecord>& records) {
  fs::create_directories(dir);
  std::ofstream traj(dir / (stem + ".csv"));
  if (!traj) throw std::runtime_error("cannot write " + (dir / stem).string());
  shb::emit_csv(traj, records);
  std::ofstream ces(dir / (stem + "_cesaro.csv"));
  shb::emit_cesaro_csv(ces, records);
}

void write_summary(const fs::path& dir,
                   const std::vector<shb::RunRecord>& records) {
  std::ofstream sum(dir / "summary.txt");
  for (const shb::RunRecord& r : records) {
    sum << "run " << r.run_id << " seed " << r.seed << " f_cesaro "
        << shb::format_double(r.f_cesaro) << " d_sq "
        << shb::format_double(r.d_sq) << " diverged " << (r.diverged ? 1 : 0)
        << '\n';
  }
}

int report_bounds(const std::vector<shb::BoundReport>& reports,
                  const fs::path& dir, bool quiet) {
  if (reports.empty()) return kExitOk;
  std::ofstream out(dir / "bounds.txt");
  bool all_ok = true;
  for (const shb::BoundReport& rep : reports) {
    shb::write_bound_report(out, rep);
    out << '\n';
    all_ok &= rep.satisfied;
    if (!quiet) {
      std::cout << rep.theorem << ": lhs=" << rep.lhs_mean
                << " rhs=" << rep.rhs << " -> "
                << (rep.satisfied ? "satisfied" : "VIOLATED") << '\n';
    }
  }
  return all_ok ? kExitOk : kExitBound;
}

int cmd_generate(const CommonArgs& args) {
  shb::ExperimentConfig cfg;
  if (int rc = load_config(args, cfg); rc != kExitOk) return rc;
  try {
    const shb::FiniteSumProblem problem = shb::build_problem(cfg);
    const fs::path dir = resolve_out_dir(args, &cfg);
    fs::create_directories(dir);
    std::ofstream out(dir / "problem.txt");
    if (!out) throw std::runtime_error("cannot write problem.txt");
    shb::write_problem(out, problem);
    if (!args.quiet)
      std::cout << "wrote " << (dir / "problem.txt").string() << '\n';
  } catch (const shb::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int cmd_run(const CommonArgs& args) {
  shb::ExperimentConfig cfg;
  if (int rc = load_config(args, cfg); rc != kExitOk) return rc;
  try {
    const shb::FiniteSumProblem problem = shb::build_problem(cfg);
    const std::vector<shb::RunRecord> records =
        shb::run_experiment(problem, cfg, cfg.rule);
    const fs::path dir = resolve_out_dir(args, &cfg);
    write_records(dir, "trajectory", records);
    write_summary(dir, records);
    bool any_diverged = false;
    for (const shb::RunRecord& r : records) {
      any_diverged |= r.diverged;
      if (!args.quiet) {
        std::cout << "seed " << r.seed << ": "
                  << (r.diverged ? "diverged"
                                 : "f_cesaro=" + shb::format_double(r.f_cesaro))
                  << '\n';
      }
    }
    const int bound_rc = report_bounds(
        shb::evaluate_bounds(problem, cfg, records), dir, args.quiet);
    if (any_diverged) return kExitDiverged;
    return bound_rc;
  } catch (const shb::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_compare(const CommonArgs& args) {
  shb::ExperimentConfig cfg;
  if (int rc = load_config(args, cfg); rc != kExitOk) return rc;
  if (cfg.rules.empty()) {
    std::cerr << "config error: compare needs a rules = ... list\n";
    return kExitConfig;
  }
  try {
    const shb::FiniteSumProblem problem = shb::build_problem(cfg);
    std::vector<shb::RunRecord> merged;
    std::vector<std::string> legend;
    int base = 0;
    for (shb::Rule rule : cfg.rules) {
      const std::vector<shb::RunRecord> records =
          shb::run_experiment(problem, cfg, rule, base);
      for (const shb::RunRecord& r : records) {
        legend.push_back(std::to_string(r.run_id) + " " +
                         shb::rule_name(rule) + " seed " +
                         std::to_string(r.seed));
        merged.push_back(r);
      }
      base += static_cast<int>(records.size());
    }
    const fs::path dir = resolve_out_dir(args, &cfg);
    write_records(dir, "compare", merged);
    {
      std::ofstream leg(dir / "compare_legend.txt");
      for (const std::string& line : legend) leg << line << '\n';
    }
    bool any_diverged = false;
    for (const shb::RunRecord& r : merged) any_diverged |= r.diverged;
    if (!args.quiet)
      std::cout << "wrote " << (dir / "compare.csv").string() << '\n';
    return any_diverged ? kExitDiverged : kExitOk;
  } catch (const shb::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_check_bounds(const CommonArgs& args, const std::string& records_dir) {
  shb::ExperimentConfig cfg;
  if (int rc = load_config(args, cfg); rc != kExitOk) return rc;
  if (cfg.bounds.empty()) {
    std::cerr << "config error: check-bounds needs a bounds = ... list\n";
    return kExitConfig;
  }
  try {
    const fs::path rdir = records_dir.empty()
                              ? fs::path(resolve_out_dir(args, &cfg))
                              : fs::path(records_dir);
    std::ifstream traj(rdir / "trajectory.csv");
    if (!traj)
      throw std::runtime_error("cannot open " +
                               (rdir / "trajectory.csv").string());
    std::vector<shb::RunRecord> records = shb::parse_csv(traj);
    std::ifstream ces(rdir / "trajectory_cesaro.csv");
    if (!ces)
      throw std::runtime_error("cannot open " +
                               (rdir / "trajectory_cesaro.csv").string());
    shb::parse_cesaro_csv(ces, records);

    const shb::FiniteSumProblem problem = shb::build_problem(cfg);
    const std::vector<shb::BoundReport> reports =
        shb::evaluate_bounds(problem, cfg, records);
    const fs::path dir = resolve_out_dir(args, &cfg);
    fs::create_directories(dir);
    return report_bounds(reports, dir, args.quiet);
  } catch (const shb::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_replicate(const CommonArgs& args, const std::string& preset) {
  try {
    const shb::PresetResult res = shb::run_preset(preset);
    const fs::path dir = fs::path(resolve_out_dir(args, nullptr)) / preset;
    shb::write_preset(res, dir.string());
    bool any_diverged = false;
    for (const shb::PresetRun& r : res.runs)
      for (const shb::RunRecord& rec : r.records) any_diverged |= rec.diverged;
    if (!args.quiet) {
      std::cout << "wrote preset '" << preset << "' to " << dir.string()
                << '\n';
      if (any_diverged)
        std::cout << "note: some runs diverged (see the manifest); for the "
                     "naive-momentum preset this is the expected outcome\n";
    }
    return kExitOk;
  } catch (const shb::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic heavy ball with adaptive Polyak step-sizes"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string records_dir;
  std::string preset;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path,
                    "experiment configuration file");
    cmd->add_option("--out", args.out_dir,
                    "output directory (default: config, then $SHB_OUT_DIR)");
    cmd->add_option("--seeds", args.seeds_override,
                    "comma-separated seed list overriding the config");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a problem file");
  add_common(generate);
  CLI::App* runcmd = app.add_subcommand("run", "execute an experiment");
  add_common(runcmd);
  CLI::App* compare =
      app.add_subcommand("compare", "run several rules on one problem");
  add_common(compare);
  CLI::App* check =
      app.add_subcommand("check-bounds", "evaluate bounds on stored records");
  add_common(check);
  check->add_option("--records", records_dir,
                    "directory holding trajectory.csv and trajectory_cesaro.csv");
  CLI::App* replicate = app.add_subcommand(
      "replicate", "rerun a built-in experiment preset "
                   "(fig1|fig2|f2const|f3alt|f4gammab|f5consts)");
  add_common(replicate);
  replicate->add_option("preset", preset, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) return cmd_generate(args);
  if (runcmd->parsed()) return cmd_run(args);
  if (compare->parsed()) return cmd_compare(args);
  if (check->parsed()) return cmd_check_bounds(args, records_dir);
  if (replicate->parsed()) return cmd_replicate(args, preset);
  return kExitConfig;
}
