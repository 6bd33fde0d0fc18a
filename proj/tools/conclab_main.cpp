// conclab: tail-bound evaluation, exact small-space verification, pattern-free
// process simulation and Monte Carlo experiments, from one binary.
//
// Exit codes: 0 success, 1 verification found violations, 2 configuration
// error (unknown pattern, malformed config, cap violations, bad flags).

#include <omp.h>

#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conclab/bounds.hpp"
#include "conclab/graphs.hpp"
#include "conclab/harness.hpp"
#include "conclab/processes.hpp"
#include "conclab/product_space.hpp"
#include "conclab/report.hpp"

using namespace conclab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binds a JSON config file to a subcommand's options: any option not given on
// the command line takes its value from the config (flags override file).
class ConfigBinder {
 public:
  explicit ConfigBinder(CLI::App* cmd) : cmd_(cmd) {
    config_opt_ = cmd->add_option("--config", config_path_,
                                  "JSON config file; command-line flags override it");
  }

  template <typename T>
  CLI::Option* bind(CLI::Option* opt, T* target) {
    appliers_[key_of(opt)] = {opt, [target](const nlohmann::json& v) { *target = v.get<T>(); }};
    return opt;
  }

  void apply() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw ConfigError("cannot open config file: " + config_path_);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "command") {
        if (value.get<std::string>() != cmd_->get_name())
          throw ConfigError("config command '" + value.get<std::string>() +
                            "' does not match subcommand '" + cmd_->get_name() + "'");
        continue;
      }
      auto it = appliers_.find(key);
      if (it == appliers_.end()) throw ConfigError("unknown config key: " + key);
      if (it->second.first->count() > 0) continue;  // flag given, wins
      try {
        it->second.second(value);
      } catch (const std::exception& e) {
        throw ConfigError("bad config value for '" + key + "': " + e.what());
      }
    }
  }

 private:
  static std::string key_of(const CLI::Option* opt) {
    std::string name = opt->get_name(false, true);  // "--t-rel"
    if (auto pos = name.rfind("--"); pos != std::string::npos) name = name.substr(pos + 2);
    for (char& c : name)
      if (c == '-') c = '_';
    return name;
  }

  CLI::App* cmd_;
  std::string config_path_;
  CLI::Option* config_opt_ = nullptr;
  std::map<std::string, std::pair<CLI::Option*, std::function<void(const nlohmann::json&)>>>
      appliers_;
};

std::vector<PatternGraph> load_patterns(const std::vector<std::string>& names,
                                        const std::vector<std::string>& files) {
  std::vector<PatternGraph> patterns;
  for (const auto& name : names) patterns.push_back(PatternGraph::named(name));
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw ConfigError("pattern file does not exist: " + file);
    std::stringstream buf;
    buf << in.rdbuf();
    patterns.push_back(PatternGraph::parse_text(buf.str()));
  }
  if (patterns.empty()) throw ConfigError("no pattern given (use --pattern / --pattern-file)");
  return patterns;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) return;
  atomic_write_file(out_path, content);
  std::printf("wrote %s\n", out_path.c_str());
}

// ---------------------------------------------------------------------------
// bound

struct BoundArgs {
  std::string formula = "tbdi";
  std::vector<double> c, d, gamma, p, q;
  double t = 0.0;
  double x = 0.0;
  double mu = 0.0, delta = 0.0;
  double s = 0.0;
  std::optional<double> gamma_fail, monotone_bad_prob;
  bool two_valued = false, bennett = false, asymmetric = false, monotone = false;
  std::vector<double> sq_sums, var_sums, maxima;
  std::string variant = "tbdi";
  std::string out;
};

LipschitzProfile profile_from(const BoundArgs& a) {
  LipschitzProfile profile;
  profile.c = a.c;
  profile.d = a.d.empty() ? a.c : a.d;
  profile.gamma = a.gamma.empty() ? std::vector<double>(a.c.size(), 1.0) : a.gamma;
  if (!a.p.empty()) profile.p = a.p;
  if (!a.q.empty()) profile.q = a.q;
  return profile;
}

int run_bound(const BoundArgs& a) {
  TailBound b;
  bool have_bound = true;
  double scalar = 0.0;
  if (a.formula == "phi") {
    scalar = phi(a.x);
    have_bound = false;
  } else if (a.formula == "janson") {
    scalar = janson_zero_bound(a.mu, a.delta);
    have_bound = false;
  } else if (a.formula == "bdi") {
    b = bdi_bound(profile_from(a), a.t);
  } else if (a.formula == "tbdi") {
    b = tbdi_bound(profile_from(a), a.t, a.gamma_fail, a.two_valued);
  } else if (a.formula == "tbdi-bernoulli") {
    BernoulliOptions opts;
    opts.bennett = a.bennett;
    opts.asymmetric = a.asymmetric;
    opts.monotone_bad_prob = a.monotone_bad_prob;
    opts.gamma_fail = a.gamma_fail;
    b = tbdi_bernoulli_bound(profile_from(a), a.t, opts);
  } else if (a.formula == "two-sided-error") {
    const auto e = two_sided_error(profile_from(a));
    std::printf("e =");
    for (double v : e) std::printf(" %s", format_double(v).c_str());
    std::printf("\n");
    return kExitOk;
  } else if (a.formula == "truncation") {
    b = truncation_bound(profile_from(a), a.t, a.s, a.gamma_fail.value_or(0.0), a.monotone);
  } else if (a.formula == "dynamic") {
    QueryAggregate agg;
    agg.sq_sums = a.sq_sums;
    agg.var_sums = a.var_sums;
    agg.maxima = a.maxima;
    BoundVariant variant;
    if (a.variant == "bdi")
      variant = BoundVariant::bdi;
    else if (a.variant == "tbdi")
      variant = BoundVariant::tbdi;
    else if (a.variant == "tbdi-bernoulli")
      variant = BoundVariant::tbdi_bernoulli;
    else
      throw ConfigError("unknown dynamic variant: " + a.variant);
    b = dynamic_aggregate_bound(agg, a.t, variant);
  } else {
    throw ConfigError("unknown formula: " + a.formula);
  }

  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1L);
  w.key("formula").value(a.formula);
  if (have_bound) {
    std::printf("value    %s\nexponent %s\n", format_double(b.value).c_str(),
                format_double(b.exponent).c_str());
    if (b.variance_term > 0.0 || b.max_term > 0.0)
      std::printf("V        %s\nC        %s\n", format_double(b.variance_term).c_str(),
                  format_double(b.max_term).c_str());
    if (a.gamma_fail) std::printf("budget   %s\n", format_double(b.bad_budget).c_str());
    if (a.formula == "truncation")
      std::printf("shift    %s\n", format_double(b.threshold_shift).c_str());
    w.key("value").value(b.value);
    w.key("exponent").value(b.exponent);
    w.key("variance_term").value(b.variance_term);
    w.key("max_term").value(b.max_term);
    w.key("bad_budget").value(b.bad_budget);
    w.key("threshold_shift").value(b.threshold_shift);
  } else {
    std::printf("value    %s\n", format_double(scalar).c_str());
    w.key("value").value(scalar);
  }
  w.end_object();
  emit(a.out, w.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string suite = "all";
  int instances = 1000;
  std::uint64_t seed = 1;
  int max_n = 8;
  int max_alphabet = 3;
  int threads = omp_get_max_threads();
  std::string counterexample_out = "counterexample.json";
  std::string replay;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  if (!a.replay.empty()) {
    std::ifstream in(a.replay);
    if (!in) throw ConfigError("cannot open replay file: " + a.replay);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto space = FiniteProductSpace::from_json(buf.str());
    const auto report = verify_space(space);
    std::printf("replay: checks=%ld violations=%ld\n", report.checks, report.violations);
    for (const auto& note : report.failure_notes)
      std::printf("  violation: %s\n", note.c_str());
    return report.violations == 0 ? kExitOk : kExitVerifyFailed;
  }

  SpaceGenOptions opts;
  opts.max_coordinates = a.max_n;
  opts.max_alphabet = a.max_alphabet;

  long violations = 0;
  std::string counterexample;
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1L);
  w.key("seed").value(static_cast<unsigned long long>(a.seed));
  w.key("instances").value(static_cast<long>(a.instances));
  w.key("suites").begin_array();
  auto report_suite = [&](const char* name, const SuiteReport& r) {
    std::printf("suite %-15s instances=%d checks=%ld violations=%ld\n", name, r.instances,
                r.checks, r.violations);
    for (const auto& note : r.failure_notes) std::printf("  violation: %s\n", note.c_str());
    violations += r.violations;
    if (counterexample.empty()) counterexample = r.first_counterexample_json;
    w.begin_object();
    w.key("suite").value(name);
    w.key("instances").value(static_cast<long>(r.instances));
    w.key("checks").value(r.checks);
    w.key("violations").value(r.violations);
    w.end_object();
  };

  if (a.suite == "product-spaces" || a.suite == "all")
    report_suite("product-spaces",
                 run_product_space_suite(a.seed, a.instances, opts, a.threads));
  if (a.suite == "martingale" || a.suite == "all")
    report_suite("martingale", run_martingale_suite(a.seed, a.instances, opts, a.threads));
  if (a.suite != "product-spaces" && a.suite != "martingale" && a.suite != "all")
    throw ConfigError("unknown suite: " + a.suite);
  w.end_array();
  w.key("violations").value(violations);
  w.end_object();
  emit(a.out, w.str());

  if (violations > 0) {
    if (!counterexample.empty()) {
      atomic_write_file(a.counterexample_out, counterexample);
      std::fprintf(stderr, "counterexample written to %s\n", a.counterexample_out.c_str());
    }
    return kExitVerifyFailed;
  }
  std::printf("all checks passed\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string variant = "reverse-addition";
  std::vector<std::string> patterns;
  std::vector<std::string> pattern_files;
  int n = 0;
  std::optional<long> m_cap;
  std::optional<double> p_cap;
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  bool allow_large = false;
  std::string out;
  std::string accepted_rle;
};

std::string rle_encode(const std::vector<std::uint8_t>& bits) {
  // one byte with the first bit value, then little-endian u32 run lengths
  std::string blob;
  blob.push_back(bits.empty() ? 0 : static_cast<char>(bits.front()));
  std::uint32_t run = 0;
  std::uint8_t current = bits.empty() ? 0 : bits.front();
  auto flush = [&] {
    for (int b = 0; b < 4; ++b) blob.push_back(static_cast<char>((run >> (8 * b)) & 0xff));
  };
  for (std::uint8_t bit : bits) {
    if (bit == current) {
      ++run;
    } else {
      flush();
      current = bit;
      run = 1;
    }
  }
  if (run > 0) flush();
  return blob;
}

int run_simulate(const SimulateArgs& a) {
  ProcessConfig cfg;
  cfg.n = a.n;
  cfg.patterns = load_patterns(a.patterns, a.pattern_files);
  cfg.m_cap = a.m_cap;
  cfg.p_cap = a.p_cap;
  cfg.seed = a.seed;
  cfg.replication = a.replication;
  if (a.variant == "reverse-addition")
    cfg.variant = ProcessVariant::reverse_addition;
  else if (a.variant == "reverse-removal")
    cfg.variant = ProcessVariant::reverse_removal;
  else if (a.variant == "birth-time")
    cfg.variant = ProcessVariant::birth_time;
  else if (a.variant == "forward-hfree")
    cfg.variant = ProcessVariant::forward_hfree;
  else if (a.variant == "h-removal")
    cfg.variant = ProcessVariant::h_removal;
  else
    throw ConfigError("unknown variant: " + a.variant);

  // the removal formulation recomputes candidate sets per step; it exists for
  // small-n equivalence checks and is capped unless explicitly unlocked
  if (cfg.variant == ProcessVariant::reverse_removal && cfg.n > 64 && !a.allow_large)
    throw ConfigError("reverse-removal is quadratic-cost; n > 64 needs --allow-large");

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto outcome = run_process(cfg);

  std::printf("final_edges %ld\nsteps       %ld\ndigest      %llu\n", outcome.final_edges,
              outcome.steps_traversed,
              static_cast<unsigned long long>(outcome.permutation_digest));

  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1L);
  w.key("variant").value(a.variant);
  w.key("n").value(static_cast<long>(a.n));
  w.key("final_edges").value(outcome.final_edges);
  w.key("steps_traversed").value(outcome.steps_traversed);
  w.key("permutation_digest").value(static_cast<unsigned long long>(outcome.permutation_digest));
  w.key("seed").begin_object();
  w.key("master").value(static_cast<unsigned long long>(a.seed));
  w.key("replication").value(static_cast<unsigned long long>(a.replication));
  w.end_object();
  w.end_object();
  emit(a.out, w.str());

  if (!a.accepted_rle.empty()) {
    atomic_write_file(a.accepted_rle, rle_encode(outcome.accepted));
    std::printf("wrote %s\n", a.accepted_rle.c_str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  std::vector<std::string> patterns;
  std::vector<std::string> pattern_files;
  int n = 0;
  double p = 0.0;
  double eps = 0.1;
  double t_rel = 0.5;
  std::vector<int> grid;
  long trials = 300;
  long m = 0;  // 0: the default budget
  long sweeps = 1000;
  std::uint64_t seed = 1;
  int threads = omp_get_max_threads();
  std::string out;
  std::string format = "json";
};

int write_experiment(const ExperimentArgs& a, const std::string& json, const std::string& csv,
                     const std::string& plot) {
  if (a.format == "json") {
    std::printf("%s\n", json.c_str());
    emit(a.out, json);
  } else if (a.format == "csv") {
    std::printf("%s", csv.c_str());
    emit(a.out, csv);
  } else if (a.format == "plotdata") {
    if (plot.empty()) throw ConfigError("this experiment has no plot data series");
    std::printf("%s", plot.c_str());
    emit(a.out, plot);
  } else {
    throw ConfigError("unknown format: " + a.format);
  }
  return kExitOk;
}

int run_triangle(const ExperimentArgs& a) {
  const auto r = triangle_experiment(a.n, a.p, a.eps, a.t_rel, a.trials, a.seed, {a.threads});
  return write_experiment(a, to_json(r), to_csv(r), "");
}

int run_reverse(const ExperimentArgs& a) {
  if (a.grid.size() < 3) throw ConfigError("--grid needs at least 3 sizes");
  const auto patterns = load_patterns(a.patterns, a.pattern_files);
  const auto r = reverse_process_experiment(patterns, a.grid, a.trials, a.seed, {a.threads});
  std::printf("# slope %s (predicted %s)\n", format_double(r.fit.slope).c_str(),
              format_double(r.predicted_slope).c_str());
  return write_experiment(a, to_json(r), to_csv(r), fit_plotdata(r));
}

int run_coupling(const ExperimentArgs& a) {
  const auto patterns = load_patterns(a.patterns, a.pattern_files);
  if (patterns.size() != 1) throw ConfigError("coupling takes a single pattern");
  const long m = a.m > 0 ? a.m : default_m_cap(a.n, patterns);
  const auto r = coupling_experiment(patterns[0], a.n, m, a.trials, a.seed, {a.threads});
  return write_experiment(a, to_json(r), to_csv(r), "");
}

int run_lipschitz(const ExperimentArgs& a) {
  const auto patterns = load_patterns(a.patterns, a.pattern_files);
  if (patterns.size() != 1) throw ConfigError("lipschitz takes a single pattern");
  const long m = a.m > 0 ? a.m : default_m_cap(a.n, patterns);
  const auto r = lipschitz_sweep(patterns[0], a.n, m, a.sweeps, a.seed, {a.threads});
  return write_experiment(a, to_json(r), to_csv(r), "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"concentration-bound laboratory: bounds, exact checks, processes"};
  app.require_subcommand(1);

  // ---- bound
  BoundArgs bound_args;
  auto* bound = app.add_subcommand("bound", "evaluate one tail-bound formula");
  ConfigBinder bound_cfg(bound);
  bound_cfg.bind(bound->add_option("--formula", bound_args.formula,
                                   "phi|bdi|tbdi|tbdi-bernoulli|two-sided-error|truncation|"
                                   "dynamic|janson"),
                 &bound_args.formula);
  bound_cfg.bind(bound->add_option("--c", bound_args.c, "typical coefficients")->delimiter(','),
                 &bound_args.c);
  bound_cfg.bind(bound->add_option("--d", bound_args.d, "worst-case coefficients (default: c)")
                     ->delimiter(','),
                 &bound_args.d);
  bound_cfg.bind(
      bound->add_option("--gamma", bound_args.gamma, "compensation factors (default: 1)")
          ->delimiter(','),
      &bound_args.gamma);
  bound_cfg.bind(bound->add_option("--p", bound_args.p, "success probabilities")->delimiter(','),
                 &bound_args.p);
  bound_cfg.bind(
      bound->add_option("--q", bound_args.q, "minimum outcome probabilities")->delimiter(','),
      &bound_args.q);
  bound_cfg.bind(bound->add_option("--t", bound_args.t, "deviation"), &bound_args.t);
  bound_cfg.bind(bound->add_option("--x", bound_args.x, "phi argument"), &bound_args.x);
  bound_cfg.bind(bound->add_option("--mu", bound_args.mu, "janson mean"), &bound_args.mu);
  bound_cfg.bind(bound->add_option("--delta", bound_args.delta, "janson overlap term"),
                 &bound_args.delta);
  bound_cfg.bind(bound->add_option("--s", bound_args.s, "global range bound (truncation)"),
                 &bound_args.s);
  double gamma_fail_value = -1.0, monotone_bad_value = -1.0;
  auto* gf = bound->add_option("--gamma-fail", gamma_fail_value, "P(X not in Gamma)");
  bound_cfg.bind(gf, &gamma_fail_value);
  auto* mb = bound->add_option("--monotone-bad-prob", monotone_bad_value, "P(B), monotone boost");
  bound_cfg.bind(mb, &monotone_bad_value);
  bound_cfg.bind(bound->add_flag("--two-valued", bound_args.two_valued,
                                 "binary alphabets: multiply the exponent by 4"),
                 &bound_args.two_valued);
  bound_cfg.bind(bound->add_flag("--bennett", bound_args.bennett, "Bennett sharpening"),
                 &bound_args.bennett);
  bound_cfg.bind(bound->add_flag("--asymmetric", bound_args.asymmetric,
                                 "asymmetric variant (deletes 1-p_k)"),
                 &bound_args.asymmetric);
  bound_cfg.bind(bound->add_flag("--monotone", bound_args.monotone,
                                 "monotone truncation (threshold shift 0)"),
                 &bound_args.monotone);
  bound_cfg.bind(bound->add_option("--sq-sums", bound_args.sq_sums, "per-query-set sums")
                     ->delimiter(','),
                 &bound_args.sq_sums);
  bound_cfg.bind(bound->add_option("--var-sums", bound_args.var_sums, "per-query-set variance sums")
                     ->delimiter(','),
                 &bound_args.var_sums);
  bound_cfg.bind(
      bound->add_option("--maxima", bound_args.maxima, "per-query-set maxima")->delimiter(','),
      &bound_args.maxima);
  bound_cfg.bind(bound->add_option("--variant", bound_args.variant, "dynamic base formula"),
                 &bound_args.variant);
  bound_cfg.bind(bound->add_option("--out", bound_args.out, "write a JSON record here"),
                 &bound_args.out);

  // ---- verify
  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "exact-enumeration theorem checks");
  ConfigBinder verify_cfg(verify);
  verify_cfg.bind(verify->add_option("--suite", verify_args.suite,
                                     "product-spaces|martingale|all"),
                  &verify_args.suite);
  verify_cfg.bind(verify->add_option("--instances", verify_args.instances)
                      ->check(CLI::Range(1, 1000000)),
                  &verify_args.instances);
  verify_cfg.bind(verify->add_option("--seed", verify_args.seed), &verify_args.seed);
  verify_cfg.bind(verify->add_option("--max-n", verify_args.max_n)->check(CLI::Range(2, 16)),
                  &verify_args.max_n);
  verify_cfg.bind(
      verify->add_option("--max-alphabet", verify_args.max_alphabet)->check(CLI::Range(2, 4)),
      &verify_args.max_alphabet);
  verify_cfg.bind(verify->add_option("--threads", verify_args.threads)->check(CLI::Range(1, 256)),
                  &verify_args.threads);
  verify_cfg.bind(verify->add_option("--counterexample-out", verify_args.counterexample_out),
                  &verify_args.counterexample_out);
  verify_cfg.bind(verify->add_option("--replay", verify_args.replay,
                                     "re-check a serialized space"),
                  &verify_args.replay);
  verify_cfg.bind(verify->add_option("--out", verify_args.out), &verify_args.out);

  // ---- simulate
  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "one seeded process run");
  ConfigBinder sim_cfg(simulate);
  sim_cfg.bind(simulate->add_option("--variant", sim_args.variant,
                                    "reverse-addition|reverse-removal|birth-time|forward-hfree|"
                                    "h-removal"),
               &sim_args.variant);
  sim_cfg.bind(simulate->add_option("--pattern", sim_args.patterns, "built-in pattern name"),
               &sim_args.patterns);
  sim_cfg.bind(simulate->add_option("--pattern-file", sim_args.pattern_files,
                                    "pattern file (vertex count header + 'u v' lines)"),
               &sim_args.pattern_files);
  sim_cfg.bind(simulate->add_option("--n", sim_args.n, "vertex count")->check(CLI::Range(2, 100000)),
               &sim_args.n);
  long m_cap_value = -1;
  double p_cap_value = -1.0;
  sim_cfg.bind(simulate->add_option("--m-cap", m_cap_value, "edge traversal budget"),
               &m_cap_value);
  sim_cfg.bind(simulate->add_option("--p-cap", p_cap_value, "birth-time cutoff"), &p_cap_value);
  sim_cfg.bind(simulate->add_option("--seed", sim_args.seed), &sim_args.seed);
  sim_cfg.bind(simulate->add_option("--replication", sim_args.replication),
               &sim_args.replication);
  sim_cfg.bind(simulate->add_flag("--allow-large", sim_args.allow_large,
                                  "lift the n <= 64 reverse-removal cap"),
               &sim_args.allow_large);
  sim_cfg.bind(simulate->add_option("--out", sim_args.out), &sim_args.out);
  sim_cfg.bind(simulate->add_option("--accepted-rle", sim_args.accepted_rle,
                                    "dump the accepted bit-sequence, run-length encoded"),
               &sim_args.accepted_rle);

  // ---- experiment
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiments");
  experiment->require_subcommand(1);
  auto add_experiment = [&](const char* name, const char* help, ExperimentArgs& args,
                            bool needs_pattern) {
    auto* cmd = experiment->add_subcommand(name, help);
    auto* binder = new ConfigBinder(cmd);  // lives for the whole process
    if (needs_pattern) {
      binder->bind(cmd->add_option("--pattern", args.patterns), &args.patterns);
      binder->bind(cmd->add_option("--pattern-file", args.pattern_files), &args.pattern_files);
    }
    binder->bind(cmd->add_option("--n", args.n), &args.n);
    binder->bind(cmd->add_option("--trials", args.trials)->check(CLI::Range(1L, 100000000L)),
                 &args.trials);
    binder->bind(cmd->add_option("--seed", args.seed), &args.seed);
    binder->bind(cmd->add_option("--threads", args.threads)->check(CLI::Range(1, 256)),
                 &args.threads);
    binder->bind(cmd->add_option("--out", args.out), &args.out);
    binder->bind(cmd->add_option("--format", args.format, "csv|json|plotdata"), &args.format);
    return std::make_pair(cmd, binder);
  };

  ExperimentArgs tri_args;
  auto [tri_cmd, tri_binder] =
      add_experiment("triangle", "triangle-count tail vs the bound family", tri_args, false);
  tri_binder->bind(tri_cmd->add_option("--p", tri_args.p, "edge probability"), &tri_args.p);
  tri_binder->bind(tri_cmd->add_option("--eps", tri_args.eps, "codegree event exponent"),
                   &tri_args.eps);
  tri_binder->bind(tri_cmd->add_option("--t-rel", tri_args.t_rel, "relative deviation"),
                   &tri_args.t_rel);

  ExperimentArgs rev_args;
  auto [rev_cmd, rev_binder] =
      add_experiment("reverse", "final-edge scaling of the reverse process", rev_args, true);
  rev_binder->bind(rev_cmd->add_option("--grid", rev_args.grid, "vertex counts")->delimiter(','),
                   &rev_args.grid);

  ExperimentArgs cpl_args;
  auto [cpl_cmd, cpl_binder] =
      add_experiment("coupling", "truncated-vs-full agreement", cpl_args, true);
  cpl_binder->bind(cpl_cmd->add_option("--m", cpl_args.m, "truncation (default: budget formula)"),
                   &cpl_args.m);

  ExperimentArgs lip_args;
  auto [lip_cmd, lip_binder] =
      add_experiment("lipschitz", "single-perturbation sensitivity", lip_args, true);
  lip_binder->bind(lip_cmd->add_option("--m", lip_args.m, "truncation (default: budget formula)"),
                   &lip_args.m);
  lip_binder->bind(lip_cmd->add_option("--sweeps", lip_args.sweeps), &lip_args.sweeps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (bound->parsed()) {
      bound_cfg.apply();
      if (gf->count() > 0 || gamma_fail_value >= 0.0)
        bound_args.gamma_fail = gamma_fail_value;
      if (mb->count() > 0 || monotone_bad_value >= 0.0)
        bound_args.monotone_bad_prob = monotone_bad_value;
      return run_bound(bound_args);
    }
    if (verify->parsed()) {
      verify_cfg.apply();
      return run_verify(verify_args);
    }
    if (simulate->parsed()) {
      sim_cfg.apply();
      if (m_cap_value >= 0) sim_args.m_cap = m_cap_value;
      if (p_cap_value >= 0.0) sim_args.p_cap = p_cap_value;
      return run_simulate(sim_args);
    }
    if (tri_cmd->parsed()) {
      tri_binder->apply();
      return run_triangle(tri_args);
    }
    if (rev_cmd->parsed()) {
      rev_binder->apply();
      return run_reverse(rev_args);
    }
    if (cpl_cmd->parsed()) {
      cpl_binder->apply();
      return run_coupling(cpl_args);
    }
    if (lip_cmd->parsed()) {
      lip_binder->apply();
      return run_lipschitz(lip_args);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitConfigError;
}
