#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "conclab/processes.hpp"
#include "conclab/rational.hpp"
#include "oracles.hpp"

using namespace conclab;
using oracles::h_removal_distribution;
using oracles::removal_distribution;

namespace {

std::vector<PatternGraph> family(std::initializer_list<const char*> names) {
  std::vector<PatternGraph> out;
  for (const char* n : names) out.push_back(PatternGraph::named(n));
  return out;
}

}  // namespace

TEST_CASE("reverse addition: n = 3 forbidden triangle always keeps two edges") {
  const auto patterns = family({"K3"});
  std::vector<Edge> edges = all_edges(3);
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  int orders = 0;
  do {
    const auto out = reverse_addition_on(3, patterns, edges);
    CHECK(out.final_edges == 2);
    CHECK(out.accepted == std::vector<std::uint8_t>{1, 1, 0});
    ++orders;
  } while (std::next_permutation(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  }));
  CHECK(orders == 6);
}

TEST_CASE("reverse addition: a forbidden single edge rejects everything") {
  ProcessConfig cfg;
  cfg.n = 5;
  cfg.patterns = family({"K2"});
  cfg.seed = 11;
  const auto out = run_process(cfg);
  CHECK(out.final_edges == 0);
  CHECK(out.steps_traversed == pair_count(5));
}

TEST_CASE("reverse addition vs exact removal recursion: n = 4 triangle") {
  const auto patterns = family({"K3"});

  // exhaustive traversal distribution over all 720 edge orders
  std::vector<Edge> edges = all_edges(4);
  auto edge_less = [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  };
  std::sort(edges.begin(), edges.end(), edge_less);
  std::map<long, long> counts;
  long orders = 0;
  do {
    ++counts[reverse_addition_on(4, patterns, edges).final_edges];
    ++orders;
  } while (std::next_permutation(edges.begin(), edges.end(), edge_less));
  CHECK(orders == 720);
  CHECK(counts[3] == 576);
  CHECK(counts[4] == 144);

  // exact uniform-removal distribution must coincide
  std::map<long, Rational> removal;
  removal_distribution(HostGraph::complete(4), Rational{1}, patterns, removal);
  CHECK(removal.size() == counts.size());
  for (const auto& [final_edges, prob] : removal) {
    CHECK(prob == Rational{counts[final_edges], 720});
  }
  CHECK(removal[3] == Rational{4, 5});
  CHECK(removal[4] == Rational{1, 5});
}

TEST_CASE("simulated frequencies match the exhaustive oracle at n = 4") {
  ProcessConfig cfg;
  cfg.n = 4;
  cfg.patterns = family({"K3"});
  cfg.seed = 908172;
  long hits4 = 0;
  const long trials = 100000;
  for (long i = 0; i < trials; ++i) {
    cfg.replication = static_cast<std::uint64_t>(i);
    hits4 += run_process(cfg).final_edges == 4;
  }
  const double p_hat = static_cast<double>(hits4) / trials;
  const double se = std::sqrt(0.2 * 0.8 / trials);
  CHECK(std::abs(p_hat - 0.2) <= 3.0 * se);
}

TEST_CASE("reverse removal runs: n = 3 and sampled n = 4 agreement") {
  ProcessConfig cfg;
  cfg.n = 3;
  cfg.patterns = family({"K3"});
  cfg.variant = ProcessVariant::reverse_removal;
  cfg.seed = 5;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    cfg.replication = rep;
    CHECK(run_process(cfg).final_edges == 2);
  }

  cfg.patterns = family({"K2"});
  cfg.n = 5;
  CHECK(run_process(cfg).final_edges == 0);  // every edge is a copy

  cfg.patterns = family({"K3"});
  cfg.n = 4;
  cfg.seed = 31;
  long hits4 = 0;
  const long trials = 20000;
  for (long i = 0; i < trials; ++i) {
    cfg.replication = static_cast<std::uint64_t>(i);
    hits4 += run_process(cfg).final_edges == 4;
  }
  const double p_hat = static_cast<double>(hits4) / trials;
  const double se = std::sqrt(0.2 * 0.8 / trials);
  CHECK(std::abs(p_hat - 0.2) <= 3.0 * se);
}

TEST_CASE("every reverse-accepted edge is forward-accepted on the same order") {
  const auto patterns = family({"K3"});
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    CounterRng rng({771, rep, streams::kEdgePermutation});
    const auto perm = random_edge_permutation(12, rng);
    const auto rev = reverse_addition_on(12, patterns, perm);
    const auto fwd = forward_hfree_on(12, patterns, perm);
    REQUIRE(rev.accepted.size() == fwd.accepted.size());
    for (std::size_t i = 0; i < rev.accepted.size(); ++i) {
      if (rev.accepted[i]) CHECK(fwd.accepted[i]);
    }
    CHECK(rev.final_edges <= fwd.final_edges);
  }
}

TEST_CASE("forward process: final graph is maximal pattern-free") {
  ProcessConfig cfg;
  cfg.patterns = family({"K3"});
  cfg.variant = ProcessVariant::forward_hfree;
  cfg.seed = 4242;
  for (int n : {3, 5, 8}) {
    cfg.n = n;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      cfg.replication = rep;
      const auto out = run_process(cfg);
      if (n == 3) CHECK(out.final_edges == 2);
      CHECK(count_copies_total(out.final_graph, cfg.patterns[0]) == 0);
      for (const Edge& e : all_edges(n)) {
        if (out.final_graph.has_edge(e.u, e.v)) continue;
        CHECK(completes_copy(out.final_graph, cfg.patterns[0], e));
      }
    }
  }
}

TEST_CASE("h-removal: triangles at n = 3 and n = 4, single edges everywhere") {
  ProcessConfig cfg;
  cfg.patterns = family({"K3"});
  cfg.variant = ProcessVariant::h_removal;
  cfg.seed = 99;

  cfg.n = 3;
  CHECK(run_process(cfg).final_edges == 0);

  // exact recursion: removing any triangle of K4 leaves a triangle-free star
  std::map<long, Rational> dist;
  h_removal_distribution(HostGraph::complete(4), Rational{1}, cfg.patterns[0], dist);
  REQUIRE(dist.size() == 1);
  CHECK(dist[3] == Rational{1});

  cfg.n = 4;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    cfg.replication = rep;
    CHECK(run_process(cfg).final_edges == 3);
  }

  cfg.patterns = family({"K2"});
  cfg.n = 5;
  CHECK(run_process(cfg).final_edges == 0);
}

TEST_CASE("determinism: identical config gives bit-identical outcomes") {
  ProcessConfig cfg;
  cfg.n = 16;
  cfg.patterns = family({"K3"});
  cfg.seed = 1234;
  cfg.replication = 7;
  const auto a = run_process(cfg);
  const auto b = run_process(cfg);
  CHECK(a.permutation_digest == b.permutation_digest);
  CHECK(a.accepted == b.accepted);
  CHECK(a.final_edges == b.final_edges);
  CHECK(a.final_graph == b.final_graph);

  cfg.replication = 8;
  const auto c = run_process(cfg);
  CHECK(a.permutation_digest != c.permutation_digest);
}

TEST_CASE("truncation monotonicity: longer budgets preserve prefix decisions") {
  ProcessConfig cfg;
  cfg.n = 10;
  cfg.patterns = family({"K3"});
  cfg.seed = 55;
  cfg.m_cap = 12;
  const auto small = run_process(cfg);
  cfg.m_cap = 40;
  const auto large = run_process(cfg);
  REQUIRE(small.accepted.size() == 12);
  REQUIRE(large.accepted.size() == 40);
  for (std::size_t i = 0; i < 12; ++i) CHECK(small.accepted[i] == large.accepted[i]);
}

TEST_CASE("birth-time variant") {
  ProcessConfig cfg;
  cfg.n = 12;
  cfg.patterns = family({"K3"});
  cfg.variant = ProcessVariant::birth_time;
  cfg.seed = 2718;

  cfg.p_cap = 0.0;
  CHECK(run_process(cfg).final_edges == 0);

  cfg.p_cap.reset();
  const auto full = run_process(cfg);
  CHECK(full.steps_traversed == pair_count(12));
  CHECK(count_copies_total(full.final_graph, cfg.patterns[0]) == 0);
  const auto again = run_process(cfg);
  CHECK(full.permutation_digest == again.permutation_digest);
  CHECK(full.accepted == again.accepted);

  // a cutoff traverses a prefix of the same birth order
  cfg.p_cap = 0.35;
  const auto cut = run_process(cfg);
  CHECK(cut.steps_traversed < full.steps_traversed);
  for (long i = 0; i < cut.steps_traversed; ++i)
    CHECK(cut.accepted[static_cast<std::size_t>(i)] ==
          full.accepted[static_cast<std::size_t>(i)]);
}

TEST_CASE("family rule: any member closing rejects the edge") {
  const auto patterns = family({"K3", "2K2"});
  // hand-built sequence on 4 vertices: (0,1) accepted, (2,3) closes 2K2
  std::vector<Edge> seq = {{0, 1}, {2, 3}, {0, 2}};
  const auto out = reverse_addition_on(4, patterns, seq);
  CHECK(out.accepted == std::vector<std::uint8_t>{1, 0, 1});

  // with triangles alone the same disjoint edge is fine
  const auto only_k3 = reverse_addition_on(4, family({"K3"}), seq);
  CHECK(only_k3.accepted == std::vector<std::uint8_t>{1, 1, 1});

  // final graphs carry no copy of any family member
  ProcessConfig cfg;
  cfg.n = 10;
  cfg.patterns = family({"K3", "C4"});
  cfg.seed = 10101;
  const auto run = run_process(cfg);
  for (const auto& h : cfg.patterns) CHECK(count_copies_total(run.final_graph, h) == 0);
}

TEST_CASE("perturb_and_rerun") {
  const auto patterns = family({"K3"});
  CounterRng rng({31415, 0, streams::kEdgePermutation});
  const auto perm = random_edge_permutation(9, rng);
  std::span<const Edge> base(perm.data(), 20);

  Perturbation identity;
  identity.kind = Perturbation::Kind::swap_positions;
  identity.i = identity.j = 3;
  const auto [a, b] = perturb_and_rerun(9, patterns, base, identity);
  CHECK(a.accepted == b.accepted);
  CHECK(a.final_edges == b.final_edges);

  Perturbation dup;
  dup.kind = Perturbation::Kind::replace_edge;
  dup.i = 0;
  dup.replacement = perm[5];  // already inside the base prefix
  CHECK_THROWS_AS(perturb_and_rerun(9, patterns, base, dup), std::invalid_argument);

  Perturbation fresh;
  fresh.kind = Perturbation::Kind::replace_edge;
  fresh.i = 2;
  fresh.replacement = perm[30];  // outside the prefix
  const auto [c, d] = perturb_and_rerun(9, patterns, base, fresh);
  CHECK(c.steps_traversed == d.steps_traversed);
}

TEST_CASE("default_m_cap") {
  // triangles: n^{3/2} (ln n)^2, clamped by the pair count
  CHECK(default_m_cap(64, family({"K3"})) == pair_count(64));
  const long m100 = default_m_cap(100, family({"2K2"}));
  const double expected = std::ceil(std::pow(std::log(100.0), 2.0));
  CHECK(m100 == static_cast<long>(expected));

  ProcessConfig bad;
  bad.n = 8;
  bad.patterns = family({"K3"});
  bad.m_cap = 5;
  bad.p_cap = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
