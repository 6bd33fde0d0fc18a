#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "conclab/graphs.hpp"
#include "conclab/rng.hpp"

namespace conclab {

enum class ProcessVariant {
  reverse_addition,
  reverse_removal,
  birth_time,
  forward_hfree,
  h_removal,
};

struct ProcessConfig {
  int n = 0;
  std::vector<PatternGraph> patterns;  // the forbidden family
  ProcessVariant variant = ProcessVariant::reverse_addition;
  std::optional<long> m_cap;    // traversal budget, addition variants
  std::optional<double> p_cap;  // birth-time cutoff
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;

  void validate() const;  // throws std::invalid_argument
};

struct ProcessOutcome {
  long final_edges = 0;
  HostGraph final_graph;
  std::vector<std::uint8_t> accepted;    // per traversed edge, addition variants
  std::uint64_t permutation_digest = 0;  // FNV-1a over the traversed edge ids
  long steps_traversed = 0;
};

// Dispatches on cfg.variant. Identical (seed, replication, cfg) produce a
// bit-identical outcome.
ProcessOutcome run_process(const ProcessConfig& cfg);

// Deterministic cores running on an explicit edge sequence. The reverse rule
// rejects an edge iff it completes a copy of any pattern with the previously
// TRAVERSED edges; the forward rule tests against the previously ACCEPTED
// edges only.
ProcessOutcome reverse_addition_on(int n, const std::vector<PatternGraph>& patterns,
                                   std::span<const Edge> sequence);
ProcessOutcome forward_hfree_on(int n, const std::vector<PatternGraph>& patterns,
                                std::span<const Edge> sequence);

// Uniform permutation of all pairs of [n], drawn from the replication's
// dedicated stream.
std::vector<Edge> random_edge_permutation(int n, CounterRng& rng);

// Default traversal budget n^{2 - 1/m2} (ln n)^2 for the family (m2 of the
// sparsest member), clamped to the number of pairs.
long default_m_cap(int n, const std::vector<PatternGraph>& patterns);

struct Perturbation {
  enum class Kind { swap_positions, replace_edge };
  Kind kind = Kind::swap_positions;
  std::size_t i = 0;
  std::size_t j = 0;       // swap only
  Edge replacement{0, 1};  // replace only; must not duplicate a sequence edge
};

// Runs reverse addition on the base sequence and on the perturbed sequence,
// returning (base, perturbed) outcomes for Lipschitz analysis.
std::pair<ProcessOutcome, ProcessOutcome> perturb_and_rerun(
    int n, const std::vector<PatternGraph>& patterns, std::span<const Edge> base,
    const Perturbation& perturbation);

}  // namespace conclab
