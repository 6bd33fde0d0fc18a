#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conclab/rational.hpp"

namespace conclab {

struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Normalized so u < v.
inline Edge make_edge(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

// A small forbidden pattern. Immutable after construction; the automorphism
// group order is computed up front. Vertex count is capped at 8.
class PatternGraph {
 public:
  static constexpr int kMaxVertices = 8;

  static PatternGraph from_edges(int vertex_count, std::vector<Edge> edges);

  // Built-ins: K2 K3 K4 K5 C4 C5 C6 P3 2K2 K4+pendant
  static PatternGraph named(std::string_view name);
  static std::vector<std::string> builtin_names();

  // Text format: first non-comment line is the vertex count, every following
  // line is one edge "u v" with 0-based vertices. '#' starts a comment.
  static PatternGraph parse_text(std::string_view text);

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int u) const { return adjacency_[u]; }
  int degree(int u) const { return static_cast<int>(adjacency_[u].size()); }
  bool has_edge(int u, int v) const;
  long aut_count() const { return aut_count_; }
  const std::string& name() const { return name_; }

 private:
  PatternGraph() = default;
  void finish(std::string name);

  int vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  long aut_count_ = 1;
  std::string name_;
};

struct PatternStats {
  int v = 0;
  int e = 0;
  Rational d2;
  Rational m2;
  bool two_balanced = false;
  bool strictly_two_balanced = false;
  bool extbal = false;
};

// 2-densities by exact rational arithmetic; m2 by enumerating induced
// subgraphs (optimal: adding edges inside a fixed vertex set only raises the
// 2-density). Requires e_H >= 1; d2 uses the K2 convention d2(K2) = 1/2.
PatternStats pattern_stats(const PatternGraph& h);

// Dynamic host graph with bitset adjacency rows: O(1) membership and
// insertion, word-parallel neighborhood intersections.
class HostGraph {
 public:
  HostGraph() = default;
  explicit HostGraph(int n);
  static HostGraph complete(int n);

  int n() const { return n_; }
  int words() const { return words_; }
  long edge_count() const { return edge_count_; }
  bool has_edge(int u, int v) const {
    return (rows_[static_cast<std::size_t>(u) * words_ + (v >> 6)] >> (v & 63)) & 1u;
  }
  void add_edge(int u, int v);
  void remove_edge(int u, int v);
  const std::uint64_t* row(int u) const { return rows_.data() + static_cast<std::size_t>(u) * words_; }
  std::vector<Edge> edges() const;

  friend bool operator==(const HostGraph&, const HostGraph&) = default;

 private:
  int n_ = 0;
  int words_ = 0;
  long edge_count_ = 0;
  std::vector<std::uint64_t> rows_;
};

// Does G + e contain a copy of H that uses e? (e may or may not be present
// in G; the test is on G with e inserted.)
bool completes_copy(const HostGraph& g, const PatternGraph& h, Edge e);

// Number of distinct copies of H in G + e containing e. A copy is a vertex
// subset together with an isomorphic edge set; injective embeddings are
// divided by aut_count.
long count_copies_with_edge(const HostGraph& g, const PatternGraph& h, Edge e);

// Total number of distinct copies of H in G.
long count_copies_total(const HostGraph& g, const PatternGraph& h);

// Visits every injective embedding of H into G (map: pattern vertex to host
// vertex) until the visitor returns false; returns the number visited. Every
// copy is visited exactly aut_count times.
long for_each_embedding(const HostGraph& g, const PatternGraph& h,
                        const std::function<bool(std::span<const int>)>& visit);

// Max over vertex pairs of the common-neighborhood size.
int max_codegree(const HostGraph& g);

// Lexicographic list of all vertex pairs of [n], u < v.
std::vector<Edge> all_edges(int n);
inline long pair_count(int n) { return static_cast<long>(n) * (n - 1) / 2; }

}  // namespace conclab
