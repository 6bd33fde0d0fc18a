#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "conclab/bounds.hpp"
#include "conclab/graphs.hpp"
#include "conclab/processes.hpp"
#include "conclab/rng.hpp"
#include "conclab/stats.hpp"

namespace conclab {

// The executor pool is owned by the caller (the CLI); experiments only ever
// fan replications across `threads` and reduce in replication order, so the
// report bytes do not depend on the thread count.
struct ExecContext {
  int threads = 1;
};

// Monte Carlo frequency of a seeded event over independent replications.
TailEstimate estimate_tail(const std::function<bool(const SeedTuple&)>& event, long trials,
                           const SeedTuple& base, const ExecContext& ctx = {});

// ---------------------------------------------------------------------------
// Triangle counts in G(n,p): empirical tail vs the whole bound family.

struct TriangleReport {
  int n = 0;
  double p = 0.0;
  double eps = 0.0;
  double t_rel = 0.0;
  long trials = 0;
  double mu_hat = 0.0;
  double sd_hat = 0.0;
  double delta = 0.0;  // max(2 n p^2, n^eps)
  double t_abs = 0.0;  // t_rel * mu_hat
  TailEstimate tail;        // P(|Y - mu_hat| >= t_abs)
  TailEstimate gamma_fail;  // P(max codegree > delta)
  TailBound bdi;            // worst case c = n-2
  TailBound tbdi;           // c = delta, d = n, gamma = 1/n
  TailBound tbdi_two_valued;
  TailBound bernoulli;  // Bernstein form
  TailBound bennett;
  double bad_budget = 0.0;  // min(1, N n * gamma_fail.point)
};
TriangleReport triangle_experiment(int n, double p, double eps, double t_rel, long trials,
                                   std::uint64_t seed, const ExecContext& ctx = {});

// ---------------------------------------------------------------------------
// Final edge count of the reverse pattern-free process across a size grid.

struct ReverseRow {
  int n = 0;
  long m_cap = 0;
  long trials = 0;
  double mean = 0.0;
  double sd = 0.0;
  double fluctuation = 0.0;  // sd / sqrt(mean)
  double window = 0.0;       // (ln n)^{4 max e_F}
};
struct ReverseReport {
  std::vector<std::string> pattern_names;
  double predicted_slope = 0.0;  // 2 - 1/m2 of the sparsest member
  std::vector<ReverseRow> rows;
  ExponentFit fit;  // log mean vs log n
};
ReverseReport reverse_process_experiment(const std::vector<PatternGraph>& patterns,
                                         std::span<const int> n_grid, long trials,
                                         std::uint64_t seed, const ExecContext& ctx = {});

// ---------------------------------------------------------------------------
// Truncated-vs-full agreement of the reverse process on a shared permutation,
// plus the closure event (every pair's edge would finish a copy at the
// truncation point).

struct CouplingReport {
  int n = 0;
  long m = 0;
  long trials = 0;
  TailEstimate agreement;
  TailEstimate closure;
};
CouplingReport coupling_experiment(const PatternGraph& h, int n, long m, long trials,
                                   std::uint64_t seed, const ExecContext& ctx = {});

// ---------------------------------------------------------------------------
// Single-perturbation sensitivity of the truncated reverse process. Among
// pairs of runs that both satisfy the per-edge copy ceiling psi = (ln n)^{2
// e_H}, the final edge count may move by at most 2 e_H psi.

struct LipschitzReport {
  int n = 0;
  long m = 0;
  long sweeps = 0;
  double psi = 0.0;
  double change_bound = 0.0;  // 2 e_H psi
  long conforming_pairs = 0;
  long violations = 0;
  long max_change = 0;             // over all sweeps
  long max_change_conforming = 0;  // over conforming pairs
  double ceiling_fail_rate = 0.0;  // fraction of runs breaking the copy ceiling
};
LipschitzReport lipschitz_sweep(const PatternGraph& h, int n, long m, long sweeps,
                                std::uint64_t seed, const ExecContext& ctx = {});

// ---------------------------------------------------------------------------
// Deterministic serialization (fixed key order, 17-digit floats).

std::string to_json(const TriangleReport& r);
std::string to_json(const ReverseReport& r);
std::string to_json(const CouplingReport& r);
std::string to_json(const LipschitzReport& r);

// Long-format CSV: n,statistic,value.
std::string to_csv(const TriangleReport& r);
std::string to_csv(const ReverseReport& r);
std::string to_csv(const CouplingReport& r);
std::string to_csv(const LipschitzReport& r);

// Two-column (log n, log mean) series of the fitted line's inputs.
std::string fit_plotdata(const ReverseReport& r);

}  // namespace conclab
