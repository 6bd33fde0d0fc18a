#include "conclab/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conclab {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

long edge_id(int n, Edge e) {
  return static_cast<long>(e.u) * n - static_cast<long>(e.u) * (e.u + 1) / 2 +
         (e.v - e.u - 1);
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t x) {
  for (int b = 0; b < 8; ++b) {
    h ^= (x >> (8 * b)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;

bool closes_any(const HostGraph& g, const std::vector<PatternGraph>& patterns, Edge e) {
  for (const auto& h : patterns)
    if (completes_copy(g, h, e)) return true;
  return false;
}

}  // namespace

void ProcessConfig::validate() const {
  require(n >= 2, "process needs at least two vertices");
  require(!patterns.empty(), "at least one forbidden pattern is required");
  require(!(m_cap && p_cap), "at most one of m_cap / p_cap may be set");
  if (m_cap) require(*m_cap >= 0, "m_cap must be non-negative");
  if (p_cap) require(*p_cap >= 0.0 && *p_cap <= 1.0, "p_cap must lie in [0,1]");
  const bool addition = variant == ProcessVariant::reverse_addition ||
                        variant == ProcessVariant::forward_hfree ||
                        variant == ProcessVariant::birth_time;
  if (!addition) require(!m_cap && !p_cap, "caps apply to traversal variants only");
  if (variant == ProcessVariant::birth_time)
    require(!m_cap, "the birth-time variant is truncated by p_cap");
  if (variant == ProcessVariant::h_removal)
    require(patterns.size() == 1, "h_removal removes copies of a single pattern");
}

std::vector<Edge> random_edge_permutation(int n, CounterRng& rng) {
  std::vector<Edge> edges = all_edges(n);
  for (std::size_t i = edges.size(); i > 1; --i)
    std::swap(edges[i - 1], edges[rng.below(i)]);
  return edges;
}

long default_m_cap(int n, const std::vector<PatternGraph>& patterns) {
  require(n >= 2, "need at least two vertices");
  require(!patterns.empty(), "need at least one pattern");
  double m2 = std::numeric_limits<double>::infinity();
  for (const auto& h : patterns) m2 = std::min(m2, pattern_stats(h).m2.to_double());
  const double expo = 2.0 - 1.0 / m2;
  const double log_n = std::log(static_cast<double>(n));
  const double m = std::ceil(std::pow(n, expo) * log_n * log_n);
  return std::min(pair_count(n), static_cast<long>(m));
}

namespace {

template <bool kReverse>
ProcessOutcome addition_core(int n, const std::vector<PatternGraph>& patterns,
                             std::span<const Edge> sequence) {
  HostGraph traversed(n);
  HostGraph accepted_graph(n);
  ProcessOutcome out;
  out.accepted.reserve(sequence.size());
  std::uint64_t digest = kFnvOffset;
  for (const Edge& raw : sequence) {
    const Edge e = make_edge(raw.u, raw.v);
    require(e.u >= 0 && e.v < n && e.u != e.v, "sequence edge out of range");
    require(!traversed.has_edge(e.u, e.v), "duplicate edge in sequence");
    digest = fnv1a(digest, static_cast<std::uint64_t>(edge_id(n, e)));
    // The reverse rule consults everything traversed so far, added or not;
    // the forward rule consults only the edges actually added.
    const bool closes = closes_any(kReverse ? traversed : accepted_graph, patterns, e);
    out.accepted.push_back(closes ? 0 : 1);
    if (!closes) accepted_graph.add_edge(e.u, e.v);
    traversed.add_edge(e.u, e.v);
  }
  out.steps_traversed = static_cast<long>(sequence.size());
  out.permutation_digest = digest;
  out.final_edges = accepted_graph.edge_count();
  out.final_graph = std::move(accepted_graph);
  return out;
}

ProcessOutcome reverse_removal_run(const ProcessConfig& cfg) {
  HostGraph g = HostGraph::complete(cfg.n);
  CounterRng rng({cfg.seed, cfg.replication, streams::kProcessChoices});
  std::uint64_t digest = kFnvOffset;
  long steps = 0;
  std::vector<Edge> candidates;
  while (true) {
    candidates.clear();
    for (const Edge& e : g.edges())
      if (closes_any(g, cfg.patterns, e)) candidates.push_back(e);
    if (candidates.empty()) break;
    const Edge pick = candidates[rng.below(candidates.size())];
    g.remove_edge(pick.u, pick.v);
    digest = fnv1a(digest, static_cast<std::uint64_t>(edge_id(cfg.n, pick)));
    ++steps;
  }
  ProcessOutcome out;
  out.steps_traversed = steps;
  out.permutation_digest = digest;
  out.final_edges = g.edge_count();
  out.final_graph = std::move(g);
  return out;
}

ProcessOutcome h_removal_run(const ProcessConfig& cfg) {
  const PatternGraph& h = cfg.patterns.front();
  HostGraph g = HostGraph::complete(cfg.n);
  CounterRng rng({cfg.seed, cfg.replication, streams::kProcessChoices});
  std::uint64_t digest = kFnvOffset;
  long steps = 0;
  while (true) {
    const long copies = count_copies_total(g, h);
    if (copies == 0) break;
    // uniform copy via a uniform embedding (each copy owns aut_count of them)
    const long target = static_cast<long>(rng.below(
        static_cast<std::uint64_t>(copies) * static_cast<std::uint64_t>(h.aut_count())));
    long seen = 0;
    std::vector<Edge> to_remove;
    for_each_embedding(g, h, [&](std::span<const int> map) {
      if (seen++ < target) return true;
      for (const Edge& pe : h.edges()) to_remove.push_back(make_edge(map[pe.u], map[pe.v]));
      return false;
    });
    for (const Edge& e : to_remove) {
      g.remove_edge(e.u, e.v);
      digest = fnv1a(digest, static_cast<std::uint64_t>(edge_id(cfg.n, e)));
    }
    ++steps;
  }
  ProcessOutcome out;
  out.steps_traversed = steps;
  out.permutation_digest = digest;
  out.final_edges = g.edge_count();
  out.final_graph = std::move(g);
  return out;
}

ProcessOutcome birth_time_run(const ProcessConfig& cfg) {
  const std::vector<Edge> edges = all_edges(cfg.n);
  CounterRng rng({cfg.seed, cfg.replication, streams::kBirthTimes});
  std::vector<double> birth(edges.size());
  for (double& b : birth) b = rng.next_unit();

  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto by_birth = [&](std::size_t a, std::size_t b) { return birth[a] < birth[b]; };
  std::sort(order.begin(), order.end(), by_birth);
  // collisions are astronomically rare; redraw the later edge until distinct
  for (bool collision = true; collision;) {
    collision = false;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      if (birth[order[i]] == birth[order[i + 1]]) {
        birth[order[i + 1]] = rng.next_unit();
        collision = true;
      }
    }
    if (collision) std::sort(order.begin(), order.end(), by_birth);
  }

  const double cutoff = cfg.p_cap.value_or(1.0);
  std::vector<Edge> sequence;
  sequence.reserve(order.size());
  for (std::size_t idx : order) {
    if (birth[idx] > cutoff) break;
    sequence.push_back(edges[idx]);
  }
  return addition_core<true>(cfg.n, cfg.patterns, sequence);
}

}  // namespace

ProcessOutcome reverse_addition_on(int n, const std::vector<PatternGraph>& patterns,
                                   std::span<const Edge> sequence) {
  return addition_core<true>(n, patterns, sequence);
}

ProcessOutcome forward_hfree_on(int n, const std::vector<PatternGraph>& patterns,
                                std::span<const Edge> sequence) {
  return addition_core<false>(n, patterns, sequence);
}

ProcessOutcome run_process(const ProcessConfig& cfg) {
  cfg.validate();
  switch (cfg.variant) {
    case ProcessVariant::reverse_removal:
      return reverse_removal_run(cfg);
    case ProcessVariant::h_removal:
      return h_removal_run(cfg);
    case ProcessVariant::birth_time:
      return birth_time_run(cfg);
    case ProcessVariant::reverse_addition:
    case ProcessVariant::forward_hfree: {
      CounterRng rng({cfg.seed, cfg.replication, streams::kEdgePermutation});
      std::vector<Edge> perm = random_edge_permutation(cfg.n, rng);
      const long all = static_cast<long>(perm.size());
      const long m = std::min(all, cfg.m_cap.value_or(all));
      std::span<const Edge> prefix(perm.data(), static_cast<std::size_t>(m));
      return cfg.variant == ProcessVariant::reverse_addition
                 ? addition_core<true>(cfg.n, cfg.patterns, prefix)
                 : addition_core<false>(cfg.n, cfg.patterns, prefix);
    }
  }
  throw std::logic_error("unreachable process variant");
}

std::pair<ProcessOutcome, ProcessOutcome> perturb_and_rerun(
    int n, const std::vector<PatternGraph>& patterns, std::span<const Edge> base,
    const Perturbation& perturbation) {
  std::vector<Edge> perturbed(base.begin(), base.end());
  if (perturbation.kind == Perturbation::Kind::swap_positions) {
    require(perturbation.i < perturbed.size() && perturbation.j < perturbed.size(),
            "swap positions out of range");
    std::swap(perturbed[perturbation.i], perturbed[perturbation.j]);
  } else {
    require(perturbation.i < perturbed.size(), "replace position out of range");
    const Edge r = make_edge(perturbation.replacement.u, perturbation.replacement.v);
    require(r.u >= 0 && r.v < n && r.u != r.v, "replacement edge out of range");
    for (std::size_t k = 0; k < perturbed.size(); ++k) {
      if (k != perturbation.i && make_edge(perturbed[k].u, perturbed[k].v) == r)
        throw std::invalid_argument("duplicate edge after replacement");
    }
    perturbed[perturbation.i] = r;
  }
  return {reverse_addition_on(n, patterns, base),
          reverse_addition_on(n, patterns, perturbed)};
}

}  // namespace conclab
