#ifndef SHB_CONFIG_HPP
#define SHB_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shb/common.hpp"
#include "shb/stepsizes.hpp"

namespace shb {

enum class ProblemKind { least_squares, logistic, libsvm, file };
enum class X0Kind { zero, gauss };
enum class ProjectionKind { none, ball, box };

// Fully validated description of one experiment. Schema version 1; flat
// `key = value` lines, '#' comments. Unknown keys are rejected.
struct ExperimentConfig {
  // problem
  ProblemKind problem = ProblemKind::least_squares;
  int n = 100;
  int d = 10;
  double cond = 1.0;
  bool consistent = true;
  double noise_std = 0.1;
  bool separable = false;
  std::uint64_t problem_seed = 1;
  std::string data_path;
  bool solve_reference_metadata = false;  // force the reference solve

  // starting point
  X0Kind x0 = X0Kind::zero;
  double x0_scale = 1.0;

  // optimizer
  std::string optimizer = "shb";  // shb | ima | projected_ima
  Rule rule = Rule::mom_sps_max;
  std::vector<Rule> rules;  // compare command
  double beta = 0.0;
  double c = 1.0;
  double gamma_b = 10.0;
  double gamma = 0.0;  // constant rule value; 0 means "not set"
  bool auto_c = false;
  bool smoothing = false;
  double tau = 2.0;
  long iterations = 1000;
  int batch_size = 1;

  // projection
  ProjectionKind projection = ProjectionKind::none;
  double radius = 1.0;
  double box_half_width = 1.0;

  // run
  std::vector<std::uint64_t> seeds{1, 2};
  std::string out_dir;
  long log_every = 0;

  // bound checks
  std::vector<std::string> bounds;
};

struct ConfigParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

struct KeyReader {
  std::map<std::string, std::string> kv;
  std::set<std::string> seen;
  std::vector<std::string>* errors;

  bool has(const std::string& key) {
    seen.insert(key);
    return kv.count(key) > 0;
  }
  std::string raw(const std::string& key) { return kv.at(key); }

  template <typename T>
  void read(const std::string& key, T& into) {
    seen.insert(key);
    auto it = kv.find(key);
    if (it == kv.end()) return;
    std::istringstream ss(it->second);
    T v{};
    if (!(ss >> v) || !(ss >> std::ws).eof()) {
      errors->push_back(key + ": cannot parse '" + it->second + "'");
      return;
    }
    into = v;
  }

  void read_bool(const std::string& key, bool& into) {
    seen.insert(key);
    auto it = kv.find(key);
    if (it == kv.end()) return;
    const std::string& v = it->second;
    if (v == "true" || v == "1") into = true;
    else if (v == "false" || v == "0") into = false;
    else errors->push_back(key + ": expected true/false, got '" + v + "'");
  }
};

}  // namespace detail

// Parses and validates; on failure every detected problem is reported, not
// just the first.
inline ConfigParseResult parse_config(const std::string& text) {
  ConfigParseResult res;
  std::map<std::string, std::string> kv;

  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      res.errors.push_back("line " + std::to_string(line_no) +
                           ": expected key = value");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      res.errors.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (kv.count(key)) {
      res.errors.push_back(key + ": duplicate key");
      continue;
    }
    kv[key] = value;
  }

  ExperimentConfig cfg;
  detail::KeyReader r{kv, {}, &res.errors};

  int version = 1;
  r.read("version", version);
  if (version != 1) res.errors.push_back("version: only version 1 is known");

  if (r.has("problem")) {
    const std::string v = r.raw("problem");
    if (v == "least_squares") cfg.problem = ProblemKind::least_squares;
    else if (v == "logistic") cfg.problem = ProblemKind::logistic;
    else if (v == "libsvm") cfg.problem = ProblemKind::libsvm;
    else if (v == "file") cfg.problem = ProblemKind::file;
    else res.errors.push_back("problem: unknown kind '" + v + "'");
  }
  r.read("n", cfg.n);
  r.read("d", cfg.d);
  r.read("cond", cfg.cond);
  r.read_bool("consistent", cfg.consistent);
  r.read("noise_std", cfg.noise_std);
  r.read_bool("separable", cfg.separable);
  r.read("problem_seed", cfg.problem_seed);
  if (r.has("data")) cfg.data_path = r.raw("data");
  r.read_bool("solve_reference", cfg.solve_reference_metadata);

  if (r.has("x0")) {
    const std::string v = r.raw("x0");
    if (v == "zero") cfg.x0 = X0Kind::zero;
    else if (v == "gauss") cfg.x0 = X0Kind::gauss;
    else res.errors.push_back("x0: expected zero|gauss, got '" + v + "'");
  }
  r.read("x0_scale", cfg.x0_scale);

  if (r.has("optimizer")) {
    const std::string v = r.raw("optimizer");
    if (v == "shb" || v == "ima" || v == "projected_ima") cfg.optimizer = v;
    else res.errors.push_back("optimizer: unknown kind '" + v + "'");
  }
  if (r.has("rule")) {
    const std::string v = r.raw("rule");
    if (auto rule = rule_from_name(v)) cfg.rule = *rule;
    else res.errors.push_back("rule: unknown rule name '" + v + "'");
  }
  if (r.has("rules")) {
    std::istringstream ss(r.raw("rules"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = detail::trim(tok);
      if (auto rule = rule_from_name(tok)) cfg.rules.push_back(*rule);
      else res.errors.push_back("rules: unknown rule name '" + tok + "'");
    }
  }
  r.read("beta", cfg.beta);
  r.read("c", cfg.c);
  if (r.has("gamma_b")) {
    const std::string v = r.raw("gamma_b");
    if (v == "inf" || v == "unbounded") {
      cfg.gamma_b = std::numeric_limits<double>::infinity();
    } else {
      std::istringstream ss(v);
      double g = 0.0;
      if ((ss >> g) && (ss >> std::ws).eof()) cfg.gamma_b = g;
      else res.errors.push_back("gamma_b: cannot parse '" + v + "'");
    }
  }
  r.read("gamma", cfg.gamma);
  r.read_bool("auto_c", cfg.auto_c);
  r.read_bool("smoothing", cfg.smoothing);
  r.read("tau", cfg.tau);
  r.read("T", cfg.iterations);
  r.read("batch_size", cfg.batch_size);

  if (r.has("projection")) {
    const std::string v = r.raw("projection");
    if (v == "none") cfg.projection = ProjectionKind::none;
    else if (v == "ball") cfg.projection = ProjectionKind::ball;
    else if (v == "box") cfg.projection = ProjectionKind::box;
    else res.errors.push_back("projection: expected none|ball|box");
  }
  r.read("radius", cfg.radius);
  r.read("box_half_width", cfg.box_half_width);

  if (r.has("seeds")) {
    cfg.seeds.clear();
    std::istringstream ss(r.raw("seeds"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = detail::trim(tok);
      try {
        cfg.seeds.push_back(std::stoull(tok));
      } catch (...) {
        res.errors.push_back("seeds: cannot parse '" + tok + "'");
      }
    }
  }
  if (r.has("out")) cfg.out_dir = r.raw("out");
  r.read("log_every", cfg.log_every);

  if (r.has("bounds")) {
    std::istringstream ss(r.raw("bounds"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = detail::trim(tok);
      if (tok == "thm31" || tok == "cor34" || tok == "thm35" || tok == "thm36")
        cfg.bounds.push_back(tok);
      else
        res.errors.push_back("bounds: unknown bound '" + tok + "'");
    }
  }

  for (const auto& [key, value] : kv) {
    if (!r.seen.count(key))
      res.errors.push_back(key + ": unknown key");
  }

  // Semantic validation.
  if (!kv.count("T")) res.errors.push_back("T: missing required key");
  if (cfg.iterations < 1) res.errors.push_back("T: must be >= 1");
  if (cfg.beta < 0.0 || cfg.beta >= 1.0)
    res.errors.push_back("beta: must lie in [0,1)");
  if (!(cfg.c > 0.0)) res.errors.push_back("c: must be positive");
  if (!(cfg.gamma_b > 0.0)) res.errors.push_back("gamma_b: must be positive");
  if (cfg.batch_size < 1) res.errors.push_back("batch_size: must be >= 1");
  if (cfg.n < 1) res.errors.push_back("n: must be >= 1");
  if (cfg.d < 1) res.errors.push_back("d: must be >= 1");
  if (cfg.cond < 1.0) res.errors.push_back("cond: must be >= 1");
  if (cfg.iterations >= 1 && cfg.log_every < 0)
    res.errors.push_back("log_every: must be >= 0");
  if (cfg.seeds.empty()) res.errors.push_back("seeds: at least one seed");
  if (cfg.smoothing && !is_sps_family(cfg.rule))
    res.errors.push_back("smoothing: only valid for sps_max-style rules");
  if (cfg.smoothing && !std::isfinite(cfg.gamma_b))
    res.errors.push_back("smoothing: needs a finite gamma_b seed");
  if (cfg.auto_c && !is_adasps_family(cfg.rule))
    res.errors.push_back("auto_c: only valid for adasps-style rules");
  if (cfg.rule == Rule::constant && !(cfg.gamma > 0.0))
    res.errors.push_back("gamma: constant rule needs gamma > 0");
  if (cfg.optimizer == "projected_ima" && cfg.projection == ProjectionKind::none)
    res.errors.push_back("projection: projected_ima needs ball or box");
  if ((cfg.problem == ProblemKind::libsvm || cfg.problem == ProblemKind::file) &&
      cfg.data_path.empty())
    res.errors.push_back("data: required for libsvm/file problems");

  if (res.errors.empty()) res.config = std::move(cfg);
  return res;
}

}  // namespace shb

#endif  // SHB_CONFIG_HPP
