// Test-only oracles, independent of the implementation paths they check:
// exact distribution recursions for the removal processes and the exact
// binomial tail.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "conclab/graphs.hpp"
#include "conclab/rational.hpp"

namespace conclab::oracles {

inline bool edge_in_any_copy(const HostGraph& g, const std::vector<PatternGraph>& patterns,
                             Edge e) {
  for (const auto& h : patterns)
    if (completes_copy(g, h, e)) return true;
  return false;
}

// Exact final-edge-count distribution of the uniform-removal process, by
// recursion over graph states.
inline void removal_distribution(HostGraph g, Rational prob,
                                 const std::vector<PatternGraph>& patterns,
                                 std::map<long, Rational>& dist) {
  std::vector<Edge> candidates;
  for (const Edge& e : g.edges())
    if (edge_in_any_copy(g, patterns, e)) candidates.push_back(e);
  if (candidates.empty()) {
    auto [it, inserted] = dist.try_emplace(g.edge_count(), Rational{0});
    it->second = it->second + prob;
    return;
  }
  const Rational share = prob / Rational{static_cast<long long>(candidates.size())};
  for (const Edge& e : candidates) {
    HostGraph next = g;
    next.remove_edge(e.u, e.v);
    removal_distribution(std::move(next), share, patterns, dist);
  }
}

// Same for the whole-copy-removal process.
inline void h_removal_distribution(HostGraph g, Rational prob, const PatternGraph& h,
                                   std::map<long, Rational>& dist) {
  std::vector<std::vector<Edge>> copies;
  std::vector<Edge> image;
  for_each_embedding(g, h, [&](std::span<const int> map) {
    image.clear();
    for (const Edge& pe : h.edges()) image.push_back(make_edge(map[pe.u], map[pe.v]));
    std::sort(image.begin(), image.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    if (std::find(copies.begin(), copies.end(), image) == copies.end())
      copies.push_back(image);
    return true;
  });
  if (copies.empty()) {
    auto [it, inserted] = dist.try_emplace(g.edge_count(), Rational{0});
    it->second = it->second + prob;
    return;
  }
  const Rational share = prob / Rational{static_cast<long long>(copies.size())};
  for (const auto& copy : copies) {
    HostGraph next = g;
    for (const Edge& e : copy) next.remove_edge(e.u, e.v);
    h_removal_distribution(std::move(next), share, h, dist);
  }
}

// Exact P(Binomial(n, p) >= k), summed from the top in extended precision.
inline double binomial_upper_tail(int n, double p, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  long double pmf = std::pow(1.0L - static_cast<long double>(p), n);  // P(X = 0)
  long double tail = k == 0 ? pmf : 0.0L;
  for (int i = 0; i < n; ++i) {
    pmf *= static_cast<long double>(n - i) / static_cast<long double>(i + 1);
    pmf *= static_cast<long double>(p) / (1.0L - static_cast<long double>(p));
    if (i + 1 >= k) tail += pmf;
  }
  return static_cast<double>(tail);
}

}  // namespace conclab::oracles
