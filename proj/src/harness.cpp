#include "conclab/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "conclab/parallel.hpp"
#include "conclab/report.hpp"

namespace conclab {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

TailEstimate estimate_tail(const std::function<bool(const SeedTuple&)>& event, long trials,
                           const SeedTuple& base, const ExecContext& ctx) {
  require(trials >= 1, "trials must be at least 1");
  std::vector<std::uint8_t> outcome(static_cast<std::size_t>(trials), 0);
  for_each_index(static_cast<std::size_t>(trials), ctx.threads, [&](std::size_t i) {
    outcome[i] = event(base.with_replication(i)) ? 1 : 0;
  });
  long hits = 0;
  for (std::uint8_t o : outcome) hits += o;
  return clopper_pearson(trials, hits);
}

// ---------------------------------------------------------------------------
// Triangle counts in G(n,p)

namespace {

struct GnpStats {
  double triangles = 0.0;
  int max_codegree = 0;
};

GnpStats sample_gnp_stats(int n, double p, const SeedTuple& seed) {
  CounterRng rng(seed);
  HostGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.next_unit() < p) g.add_edge(u, v);

  GnpStats s;
  long paths = 0;  // ordered: codegree summed over present edges
  for (int u = 0; u < n; ++u) {
    const std::uint64_t* ru = g.row(u);
    for (int v = u + 1; v < n; ++v) {
      const std::uint64_t* rv = g.row(v);
      int common = 0;
      for (int w = 0; w < g.words(); ++w) common += std::popcount(ru[w] & rv[w]);
      s.max_codegree = std::max(s.max_codegree, common);
      if (g.has_edge(u, v)) paths += common;
    }
  }
  s.triangles = static_cast<double>(paths) / 3.0;  // each triangle has 3 edges
  return s;
}

}  // namespace

TriangleReport triangle_experiment(int n, double p, double eps, double t_rel, long trials,
                                   std::uint64_t seed, const ExecContext& ctx) {
  require(n >= 3, "n must be at least 3");
  require(p > 0.0 && p < 1.0, "p must lie in (0,1)");
  require(trials >= 2, "need at least two trials");

  TriangleReport r;
  r.n = n;
  r.p = p;
  r.eps = eps;
  r.t_rel = t_rel;
  r.trials = trials;
  r.delta = std::max(2.0 * n * p * p, std::pow(static_cast<double>(n), eps));

  std::vector<GnpStats> stats(static_cast<std::size_t>(trials));
  for_each_index(static_cast<std::size_t>(trials), ctx.threads, [&](std::size_t i) {
    stats[i] = sample_gnp_stats(n, p, {seed, i, streams::kGnpSample});
  });

  std::vector<double> counts(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) counts[i] = stats[i].triangles;
  r.mu_hat = mean_of(counts);
  r.sd_hat = sd_of(counts, r.mu_hat);
  r.t_abs = t_rel * r.mu_hat;

  long tail_hits = 0, gamma_hits = 0;
  for (const GnpStats& s : stats) {
    tail_hits += std::abs(s.triangles - r.mu_hat) >= r.t_abs;
    gamma_hits += s.max_codegree > r.delta;
  }
  r.tail = clopper_pearson(trials, tail_hits);
  r.gamma_fail = clopper_pearson(trials, gamma_hits);

  const std::size_t pairs = static_cast<std::size_t>(pair_count(n));
  auto worst = LipschitzProfile::uniform(pairs, n - 2.0, n - 2.0, 1.0);
  r.bdi = bdi_bound(worst, r.t_abs);

  auto typical = LipschitzProfile::uniform(pairs, r.delta, n, 1.0 / n);
  typical.p = std::vector<double>(pairs, p);
  r.tbdi = tbdi_bound(typical, r.t_abs, r.gamma_fail.point);
  r.tbdi_two_valued = tbdi_bound(typical, r.t_abs, r.gamma_fail.point, true);
  BernoulliOptions opts;
  opts.gamma_fail = r.gamma_fail.point;
  r.bernoulli = tbdi_bernoulli_bound(typical, r.t_abs, opts);
  opts.bennett = true;
  r.bennett = tbdi_bernoulli_bound(typical, r.t_abs, opts);
  r.bad_budget = r.tbdi.bad_budget;
  return r;
}

// ---------------------------------------------------------------------------
// Reverse process across a size grid

ReverseReport reverse_process_experiment(const std::vector<PatternGraph>& patterns,
                                         std::span<const int> n_grid, long trials,
                                         std::uint64_t seed, const ExecContext& ctx) {
  require(!patterns.empty(), "need at least one pattern");
  require(n_grid.size() >= 3, "the size grid needs at least 3 values");
  require(trials >= 2, "need at least two trials");

  ReverseReport r;
  double m2_min = std::numeric_limits<double>::infinity();
  int e_max = 0;
  for (const auto& h : patterns) {
    r.pattern_names.push_back(h.name());
    m2_min = std::min(m2_min, pattern_stats(h).m2.to_double());
    e_max = std::max(e_max, h.edge_count());
  }
  r.predicted_slope = 2.0 - 1.0 / m2_min;

  std::vector<std::pair<double, double>> fit_points;
  for (int n : n_grid) {
    ProcessConfig cfg;
    cfg.n = n;
    cfg.patterns = patterns;
    cfg.seed = mix64(seed ^ (static_cast<std::uint64_t>(n) * 0x100000001b3ULL));
    cfg.m_cap = default_m_cap(n, patterns);

    std::vector<double> final_edges(static_cast<std::size_t>(trials));
    for_each_index(static_cast<std::size_t>(trials), ctx.threads, [&](std::size_t i) {
      ProcessConfig local = cfg;
      local.replication = i;
      final_edges[i] = static_cast<double>(run_process(local).final_edges);
    });

    ReverseRow row;
    row.n = n;
    row.m_cap = *cfg.m_cap;
    row.trials = trials;
    row.mean = mean_of(final_edges);
    row.sd = sd_of(final_edges, row.mean);
    row.fluctuation = row.mean > 0.0 ? row.sd / std::sqrt(row.mean) : 0.0;
    row.window = std::pow(std::log(static_cast<double>(n)), 4.0 * e_max);
    r.rows.push_back(row);
    if (row.mean > 0.0) fit_points.emplace_back(static_cast<double>(n), row.mean);
  }
  if (fit_points.size() >= 3) r.fit = fit_log_log(fit_points);
  return r;
}

// ---------------------------------------------------------------------------
// Coupling

CouplingReport coupling_experiment(const PatternGraph& h, int n, long m, long trials,
                                   std::uint64_t seed, const ExecContext& ctx) {
  require(n >= 2, "n must be at least 2");
  require(trials >= 1, "trials must be at least 1");
  const long all = pair_count(n);
  m = std::min(m, all);

  CouplingReport r;
  r.n = n;
  r.m = m;
  r.trials = trials;

  std::vector<std::uint8_t> agree(static_cast<std::size_t>(trials), 0);
  std::vector<std::uint8_t> closed(static_cast<std::size_t>(trials), 0);
  const std::vector<PatternGraph> patterns{h};
  for_each_index(static_cast<std::size_t>(trials), ctx.threads, [&](std::size_t i) {
    CounterRng rng({seed, i, streams::kEdgePermutation});
    const std::vector<Edge> perm = random_edge_permutation(n, rng);
    std::span<const Edge> prefix(perm.data(), static_cast<std::size_t>(m));
    const auto truncated = reverse_addition_on(n, patterns, prefix);
    const auto full = reverse_addition_on(n, patterns, perm);
    agree[i] = truncated.final_graph == full.final_graph ? 1 : 0;

    HostGraph g_m(n);
    for (const Edge& e : prefix) g_m.add_edge(e.u, e.v);
    bool closure = true;
    for (int u = 0; u < n && closure; ++u)
      for (int v = u + 1; v < n; ++v)
        if (!completes_copy(g_m, h, {u, v})) {
          closure = false;
          break;
        }
    closed[i] = closure ? 1 : 0;
  });

  long agree_hits = 0, closed_hits = 0;
  for (long i = 0; i < trials; ++i) {
    agree_hits += agree[static_cast<std::size_t>(i)];
    closed_hits += closed[static_cast<std::size_t>(i)];
  }
  r.agreement = clopper_pearson(trials, agree_hits);
  r.closure = clopper_pearson(trials, closed_hits);
  return r;
}

// ---------------------------------------------------------------------------
// Lipschitz sweep

namespace {

bool copy_ceiling_holds(const std::vector<Edge>& traversed, int n, const PatternGraph& h,
                        double psi) {
  HostGraph g(n);
  for (const Edge& e : traversed) g.add_edge(e.u, e.v);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (static_cast<double>(count_copies_with_edge(g, h, {u, v})) > psi) return false;
  return true;
}

}  // namespace

LipschitzReport lipschitz_sweep(const PatternGraph& h, int n, long m, long sweeps,
                                std::uint64_t seed, const ExecContext& ctx) {
  const long all = pair_count(n);
  require(m >= 1 && m <= all, "m must lie in [1, pair count]");
  require(sweeps >= 1, "sweeps must be at least 1");

  LipschitzReport r;
  r.n = n;
  r.m = m;
  r.sweeps = sweeps;
  r.psi = std::pow(std::log(static_cast<double>(n)), 2.0 * h.edge_count());
  r.change_bound = 2.0 * h.edge_count() * r.psi;

  struct SweepResult {
    bool conforming = false;
    bool violation = false;
    long change = 0;
    int ceiling_failures = 0;
  };
  std::vector<SweepResult> results(static_cast<std::size_t>(sweeps));
  const std::vector<PatternGraph> patterns{h};

  for_each_index(static_cast<std::size_t>(sweeps), ctx.threads, [&](std::size_t i) {
    CounterRng rng({seed, i, streams::kPerturbation});
    std::vector<Edge> perm = random_edge_permutation(n, rng);
    std::vector<Edge> base(perm.begin(), perm.begin() + m);

    Perturbation pert;
    const bool can_replace = m < all;
    if (can_replace && rng.below(2) == 1) {
      pert.kind = Perturbation::Kind::replace_edge;
      pert.i = rng.below(static_cast<std::uint64_t>(m));
      pert.replacement = perm[m + static_cast<long>(rng.below(
                                      static_cast<std::uint64_t>(all - m)))];
    } else {
      pert.kind = Perturbation::Kind::swap_positions;
      pert.i = rng.below(static_cast<std::uint64_t>(m));
      pert.j = rng.below(static_cast<std::uint64_t>(m));
    }

    const auto [base_out, pert_out] = perturb_and_rerun(n, patterns, base, pert);

    std::vector<Edge> perturbed = base;
    if (pert.kind == Perturbation::Kind::swap_positions)
      std::swap(perturbed[pert.i], perturbed[pert.j]);
    else
      perturbed[pert.i] = pert.replacement;

    SweepResult res;
    const bool base_ok = copy_ceiling_holds(base, n, h, r.psi);
    const bool pert_ok = copy_ceiling_holds(perturbed, n, h, r.psi);
    res.ceiling_failures = (base_ok ? 0 : 1) + (pert_ok ? 0 : 1);
    res.change = std::labs(base_out.final_edges - pert_out.final_edges);
    res.conforming = base_ok && pert_ok;
    res.violation = res.conforming && static_cast<double>(res.change) > r.change_bound;
    results[i] = res;
  });

  long ceiling_failures = 0;
  for (const SweepResult& res : results) {
    ceiling_failures += res.ceiling_failures;
    r.max_change = std::max(r.max_change, res.change);
    if (res.conforming) {
      ++r.conforming_pairs;
      r.max_change_conforming = std::max(r.max_change_conforming, res.change);
      r.violations += res.violation ? 1 : 0;
    }
  }
  r.ceiling_fail_rate =
      static_cast<double>(ceiling_failures) / static_cast<double>(2 * sweeps);
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void write_estimate(JsonWriter& w, const TailEstimate& e) {
  w.begin_object();
  w.key("trials").value(e.trials);
  w.key("hits").value(e.hits);
  w.key("point").value(e.point);
  w.key("ci_low").value(e.ci_low);
  w.key("ci_high").value(e.ci_high);
  w.end_object();
}

void write_bound(JsonWriter& w, const TailBound& b) {
  w.begin_object();
  w.key("value").value(b.value);
  w.key("exponent").value(b.exponent);
  w.key("variance_term").value(b.variance_term);
  w.key("max_term").value(b.max_term);
  w.key("bad_budget").value(b.bad_budget);
  w.key("threshold_shift").value(b.threshold_shift);
  w.end_object();
}

std::string num(double x) { return format_double(x); }
std::string num(long x) { return std::to_string(x); }

}  // namespace

std::string to_json(const TriangleReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1L);
  w.key("experiment").value("triangle");
  w.key("n").value(static_cast<long>(r.n));
  w.key("p").value(r.p);
  w.key("eps").value(r.eps);
  w.key("t_rel").value(r.t_rel);
  w.key("trials").value(r.trials);
  w.key("mu_hat").value(r.mu_hat);
  w.key("sd_hat").value(r.sd_hat);
  w.key("delta").value(r.delta);
  w.key("t_abs").value(r.t_abs);
  w.key("tail");
  write_estimate(w, r.tail);
  w.key("gamma_fail");
  write_estimate(w, r.gamma_fail);
  w.key("bdi");
  write_bound(w, r.bdi);
  w.key("tbdi");
  write_bound(w, r.tbdi);
  w.key("tbdi_two_valued");
  write_bound(w, r.tbdi_two_valued);
  w.key("bernoulli");
  write_bound(w, r.bernoulli);
  w.key("bennett");
  write_bound(w, r.bennett);
  w.key("bad_budget").value(r.bad_budget);
  w.end_object();
  return w.str();
}

std::string to_json(const ReverseReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1L);
  w.key("experiment").value("reverse");
  w.key("patterns").begin_array();
  for (const auto& name : r.pattern_names) w.value(name);
  w.end_array();
  w.key("predicted_slope").value(r.predicted_slope);
  w.key("rows").begin_array();
  for (const auto& row : r.rows) {
    w.begin_object();
    w.key("n").value(static_cast<long>(row.n));
    w.key("m_cap").value(row.m_cap);
    w.key("trials").value(row.trials);
    w.key("mean").value(row.mean);
    w.key("sd").value(row.sd);
    w.key("fluctuation").value(row.fluctuation);
    w.key("window").value(row.window);
    w.end_object();
  }
  w.end_array();
  w.key("fit").begin_object();
  w.key("slope").value(r.fit.slope);
  w.key("intercept").value(r.fit.intercept);
  w.key("r2").value(r.fit.r2);
  w.end_object();
  w.end_object();
  return w.str();
}

std::string to_json(const CouplingReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1L);
  w.key("experiment").value("coupling");
  w.key("n").value(static_cast<long>(r.n));
  w.key("m").value(r.m);
  w.key("trials").value(r.trials);
  w.key("agreement");
  write_estimate(w, r.agreement);
  w.key("closure");
  write_estimate(w, r.closure);
  w.end_object();
  return w.str();
}

std::string to_json(const LipschitzReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1L);
  w.key("experiment").value("lipschitz");
  w.key("n").value(static_cast<long>(r.n));
  w.key("m").value(r.m);
  w.key("sweeps").value(r.sweeps);
  w.key("psi").value(r.psi);
  w.key("change_bound").value(r.change_bound);
  w.key("conforming_pairs").value(r.conforming_pairs);
  w.key("violations").value(r.violations);
  w.key("max_change").value(r.max_change);
  w.key("max_change_conforming").value(r.max_change_conforming);
  w.key("ceiling_fail_rate").value(r.ceiling_fail_rate);
  w.end_object();
  return w.str();
}

std::string to_csv(const TriangleReport& r) {
  CsvTable t;
  t.header = {"n", "statistic", "value"};
  const std::string n = std::to_string(r.n);
  auto row = [&](const char* stat, const std::string& value) {
    t.rows.push_back({n, stat, value});
  };
  row("p", num(r.p));
  row("trials", num(r.trials));
  row("mu_hat", num(r.mu_hat));
  row("sd_hat", num(r.sd_hat));
  row("delta", num(r.delta));
  row("t_abs", num(r.t_abs));
  row("tail_point", num(r.tail.point));
  row("tail_ci_high", num(r.tail.ci_high));
  row("gamma_fail_point", num(r.gamma_fail.point));
  row("bdi_value", num(r.bdi.value));
  row("tbdi_value", num(r.tbdi.value));
  row("tbdi_two_valued_value", num(r.tbdi_two_valued.value));
  row("bernoulli_value", num(r.bernoulli.value));
  row("bennett_value", num(r.bennett.value));
  row("bad_budget", num(r.bad_budget));
  return t.str();
}

std::string to_csv(const ReverseReport& r) {
  CsvTable t;
  t.header = {"n", "statistic", "value"};
  for (const auto& row : r.rows) {
    const std::string n = std::to_string(row.n);
    t.rows.push_back({n, "m_cap", num(row.m_cap)});
    t.rows.push_back({n, "trials", num(row.trials)});
    t.rows.push_back({n, "mean", num(row.mean)});
    t.rows.push_back({n, "sd", num(row.sd)});
    t.rows.push_back({n, "fluctuation", num(row.fluctuation)});
    t.rows.push_back({n, "window", num(row.window)});
  }
  t.rows.push_back({"all", "slope", num(r.fit.slope)});
  t.rows.push_back({"all", "intercept", num(r.fit.intercept)});
  t.rows.push_back({"all", "r2", num(r.fit.r2)});
  t.rows.push_back({"all", "predicted_slope", num(r.predicted_slope)});
  return t.str();
}

std::string to_csv(const CouplingReport& r) {
  CsvTable t;
  t.header = {"n", "statistic", "value"};
  const std::string n = std::to_string(r.n);
  t.rows.push_back({n, "m", num(r.m)});
  t.rows.push_back({n, "trials", num(r.trials)});
  t.rows.push_back({n, "agreement_point", num(r.agreement.point)});
  t.rows.push_back({n, "agreement_ci_low", num(r.agreement.ci_low)});
  t.rows.push_back({n, "closure_point", num(r.closure.point)});
  t.rows.push_back({n, "closure_ci_low", num(r.closure.ci_low)});
  return t.str();
}

std::string to_csv(const LipschitzReport& r) {
  CsvTable t;
  t.header = {"n", "statistic", "value"};
  const std::string n = std::to_string(r.n);
  t.rows.push_back({n, "m", num(r.m)});
  t.rows.push_back({n, "sweeps", num(r.sweeps)});
  t.rows.push_back({n, "psi", num(r.psi)});
  t.rows.push_back({n, "change_bound", num(r.change_bound)});
  t.rows.push_back({n, "conforming_pairs", num(r.conforming_pairs)});
  t.rows.push_back({n, "violations", num(r.violations)});
  t.rows.push_back({n, "max_change", num(r.max_change)});
  t.rows.push_back({n, "max_change_conforming", num(r.max_change_conforming)});
  t.rows.push_back({n, "ceiling_fail_rate", num(r.ceiling_fail_rate)});
  return t.str();
}

std::string fit_plotdata(const ReverseReport& r) {
  std::vector<std::pair<double, double>> series;
  for (const auto& [x, y] : r.fit.points) series.emplace_back(x, y);
  return plotdata(series);
}

}  // namespace conclab
