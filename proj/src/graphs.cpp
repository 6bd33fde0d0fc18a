#include "conclab/graphs.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace conclab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

// ---------------------------------------------------------------------------
// PatternGraph

PatternGraph PatternGraph::from_edges(int vertex_count, std::vector<Edge> edges) {
  require(vertex_count >= 1 && vertex_count <= kMaxVertices,
          "pattern vertex count must lie in [1, 8]");
  PatternGraph h;
  h.vertex_count_ = vertex_count;
  h.adjacency_.assign(vertex_count, {});
  for (Edge e : edges) {
    require(e.u >= 0 && e.u < vertex_count && e.v >= 0 && e.v < vertex_count,
            "pattern edge endpoint out of range");
    require(e.u != e.v, "pattern self-loops are not allowed");
    Edge norm = make_edge(e.u, e.v);
    for (const Edge& seen : h.edges_)
      require(!(seen == norm), "duplicate pattern edge");
    h.edges_.push_back(norm);
    h.adjacency_[norm.u].push_back(norm.v);
    h.adjacency_[norm.v].push_back(norm.u);
  }
  std::sort(h.edges_.begin(), h.edges_.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  h.finish("custom");
  return h;
}

bool PatternGraph::has_edge(int u, int v) const {
  for (int w : adjacency_[u])
    if (w == v) return true;
  return false;
}

void PatternGraph::finish(std::string name) {
  name_ = std::move(name);
  // Automorphisms: vertex bijections mapping every edge onto an edge. Edge
  // counts match, so edge-preserving already implies an automorphism.
  std::vector<int> perm(vertex_count_);
  std::iota(perm.begin(), perm.end(), 0);
  long count = 0;
  do {
    bool ok = true;
    for (const Edge& e : edges_) {
      if (!has_edge(perm[e.u], perm[e.v])) {
        ok = false;
        break;
      }
    }
    count += ok;
  } while (std::next_permutation(perm.begin(), perm.end()));
  aut_count_ = count;
}

PatternGraph PatternGraph::named(std::string_view name) {
  auto complete = [](int k) {
    std::vector<Edge> es;
    for (int u = 0; u < k; ++u)
      for (int v = u + 1; v < k; ++v) es.push_back({u, v});
    return es;
  };
  auto cycle = [](int k) {
    std::vector<Edge> es;
    for (int u = 0; u < k; ++u) es.push_back(make_edge(u, (u + 1) % k));
    return es;
  };

  PatternGraph h;
  if (name == "K2") {
    h = from_edges(2, complete(2));
  } else if (name == "K3") {
    h = from_edges(3, complete(3));
  } else if (name == "K4") {
    h = from_edges(4, complete(4));
  } else if (name == "K5") {
    h = from_edges(5, complete(5));
  } else if (name == "C4") {
    h = from_edges(4, cycle(4));
  } else if (name == "C5") {
    h = from_edges(5, cycle(5));
  } else if (name == "C6") {
    h = from_edges(6, cycle(6));
  } else if (name == "P3") {
    h = from_edges(3, {{0, 1}, {1, 2}});
  } else if (name == "2K2") {
    h = from_edges(4, {{0, 1}, {2, 3}});
  } else if (name == "K4+pendant") {
    auto es = complete(4);
    es.push_back({3, 4});
    h = from_edges(5, es);
  } else {
    throw std::invalid_argument("unknown pattern name: " + std::string(name));
  }
  h.name_ = std::string(name);
  return h;
}

std::vector<std::string> PatternGraph::builtin_names() {
  return {"K2", "K3", "K4", "K5", "C4", "C5", "C6", "P3", "2K2", "K4+pendant"};
}

PatternGraph PatternGraph::parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int vertex_count = -1;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    if (vertex_count < 0) {
      if (fields >> vertex_count) {
        int extra;
        require(!(fields >> extra), "pattern header must be a single vertex count");
      }
      continue;
    }
    int u, v;
    if (fields >> u) {
      require(static_cast<bool>(fields >> v),
              "pattern line " + std::to_string(line_no) + " needs two vertices");
      edges.push_back({u, v});
    }
  }
  require(vertex_count >= 1, "pattern text is missing the vertex count header");
  return from_edges(vertex_count, std::move(edges));
}

// ---------------------------------------------------------------------------
// PatternStats

namespace {

Rational density2(int v, int e) {
  if (v == 2) return {1, 2};  // K2 convention
  return {e - 1, v - 2};
}

}  // namespace

PatternStats pattern_stats(const PatternGraph& h) {
  require(h.vertex_count() >= 2, "pattern_stats requires at least two vertices");
  require(h.edge_count() >= 1, "pattern_stats requires at least one edge");

  PatternStats s;
  s.v = h.vertex_count();
  s.e = h.edge_count();
  s.d2 = density2(s.v, s.e);

  // Induced subgraphs by vertex subset; filling in all edges inside a fixed
  // subset only raises the 2-density, so induced subgraphs are the maximizers.
  const int v = s.v;
  s.m2 = Rational{0, 1};
  bool balanced = true;
  bool strictly = true;
  for (unsigned mask = 1; mask < (1u << v); ++mask) {
    const int size = std::popcount(mask);
    if (size < 2) continue;
    int inside = 0;
    for (const Edge& e : h.edges())
      if ((mask >> e.u & 1) && (mask >> e.v & 1)) ++inside;
    if (inside >= 1) {
      const Rational d = density2(size, inside);
      if (d > s.m2) s.m2 = d;
    }
    const bool proper = mask != (1u << v) - 1;
    if (proper && size >= 3) {
      const Rational d = density2(size, inside);
      if (d > s.d2) balanced = false;
      if (d >= s.d2) strictly = false;
    }
  }
  s.two_balanced = s.e >= 2 && balanced;
  s.strictly_two_balanced = s.e >= 2 && strictly;

  if (s.v == 3) {
    s.extbal = s.e >= 2;
  } else if (s.v >= 4) {
    s.extbal = s.m2 < Rational{2 * s.e - 3, 2 * s.v - 6};
  }
  return s;
}

// ---------------------------------------------------------------------------
// HostGraph

HostGraph::HostGraph(int n) : n_(n), words_((n + 63) / 64) {
  require(n >= 0, "host graph size must be non-negative");
  rows_.assign(static_cast<std::size_t>(n_) * words_, 0);
}

HostGraph HostGraph::complete(int n) {
  HostGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

void HostGraph::add_edge(int u, int v) {
  assert(u != v && u >= 0 && v >= 0 && u < n_ && v < n_);
  if (has_edge(u, v)) return;
  rows_[static_cast<std::size_t>(u) * words_ + (v >> 6)] |= 1ull << (v & 63);
  rows_[static_cast<std::size_t>(v) * words_ + (u >> 6)] |= 1ull << (u & 63);
  ++edge_count_;
}

void HostGraph::remove_edge(int u, int v) {
  assert(u != v && u >= 0 && v >= 0 && u < n_ && v < n_);
  if (!has_edge(u, v)) return;
  rows_[static_cast<std::size_t>(u) * words_ + (v >> 6)] &= ~(1ull << (v & 63));
  rows_[static_cast<std::size_t>(v) * words_ + (u >> 6)] &= ~(1ull << (u & 63));
  --edge_count_;
}

std::vector<Edge> HostGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int u = 0; u < n_; ++u) {
    const std::uint64_t* r = row(u);
    for (int w = (u + 1) >> 6; w < words_; ++w) {
      std::uint64_t word = r[w];
      if (w == (u + 1) >> 6 && ((u + 1) & 63) != 0)
        word &= ~0ull << ((u + 1) & 63);
      while (word) {
        out.push_back({u, (w << 6) + std::countr_zero(word)});
        word &= word - 1;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embedding search

namespace {

struct SearchCtx {
  const HostGraph* g = nullptr;
  const PatternGraph* h = nullptr;
  const Edge* virt = nullptr;  // edge treated as present in g
  std::vector<int> order;
  std::vector<int> map;
  std::vector<char> used;
  std::vector<std::uint64_t> scratch;
  int words = 0;
};

thread_local SearchCtx tl_ctx;

bool adjacent(const SearchCtx& c, int x, int y) {
  if (c.g->has_edge(x, y)) return true;
  return c.virt && ((x == c.virt->u && y == c.virt->v) || (x == c.virt->v && y == c.virt->u));
}

// Visit order: anchors first, then always the unplaced pattern vertex with
// the most already-placed neighbors (ties by degree).
void plan_order(SearchCtx& c, int anchor_a, int anchor_b) {
  const int v = c.h->vertex_count();
  c.order.clear();
  char placed[PatternGraph::kMaxVertices] = {};
  if (anchor_a >= 0) {
    c.order.push_back(anchor_a);
    placed[anchor_a] = 1;
  }
  if (anchor_b >= 0) {
    c.order.push_back(anchor_b);
    placed[anchor_b] = 1;
  }
  while (static_cast<int>(c.order.size()) < v) {
    int best = -1, best_conn = -1, best_deg = -1;
    for (int x = 0; x < v; ++x) {
      if (placed[x]) continue;
      int conn = 0;
      for (int w : c.h->neighbors(x)) conn += placed[w];
      if (conn > best_conn || (conn == best_conn && c.h->degree(x) > best_deg)) {
        best = x;
        best_conn = conn;
        best_deg = c.h->degree(x);
      }
    }
    c.order.push_back(best);
    placed[best] = 1;
  }
}

// Recursively extends the partial embedding. The visitor runs once per
// complete embedding and returns false to abort the whole search.
template <class Visit>
bool extend(SearchCtx& c, std::size_t pos, Visit&& visit) {
  if (pos == c.order.size()) return visit();
  const int pv = c.order[pos];

  int placed[PatternGraph::kMaxVertices];
  int placed_count = 0;
  for (int w : c.h->neighbors(pv))
    if (c.map[w] >= 0) placed[placed_count++] = c.map[w];

  auto try_host = [&](int x) -> bool {
    c.map[pv] = x;
    c.used[x] = 1;
    const bool keep_going = extend(c, pos + 1, visit);
    c.used[x] = 0;
    c.map[pv] = -1;
    return keep_going;
  };

  if (placed_count == 0) {
    for (int x = 0; x < c.g->n(); ++x) {
      if (c.used[x]) continue;
      if (!try_host(x)) return false;
    }
    return true;
  }

  std::uint64_t* bits = c.scratch.data() + pos * c.words;
  const std::uint64_t* first = c.g->row(placed[0]);
  for (int w = 0; w < c.words; ++w) bits[w] = first[w];
  for (int i = 1; i < placed_count; ++i) {
    const std::uint64_t* r = c.g->row(placed[i]);
    for (int w = 0; w < c.words; ++w) bits[w] &= r[w];
  }

  // The virtual edge can only qualify its own endpoints; test those two
  // host vertices separately and mask them out of the bitset walk.
  if (c.virt) {
    for (int x : {c.virt->u, c.virt->v}) {
      bits[x >> 6] &= ~(1ull << (x & 63));
      if (c.used[x]) continue;
      bool ok = true;
      for (int i = 0; i < placed_count; ++i) {
        if (!adjacent(c, x, placed[i])) {
          ok = false;
          break;
        }
      }
      if (ok && !try_host(x)) return false;
    }
  }

  for (int w = 0; w < c.words; ++w) {
    std::uint64_t word = bits[w];
    while (word) {
      const int x = (w << 6) + std::countr_zero(word);
      word &= word - 1;
      if (!c.used[x] && !try_host(x)) return false;
    }
  }
  return true;
}

void init_ctx(SearchCtx& c, const HostGraph& g, const PatternGraph& h, const Edge* virt) {
  c.g = &g;
  c.h = &h;
  c.virt = virt;
  c.words = g.words();
  c.map.assign(h.vertex_count(), -1);
  c.used.assign(g.n(), 0);
  c.scratch.assign(static_cast<std::size_t>(h.vertex_count()) * c.words, 0);
}

// Runs the visitor over every embedding that maps some pattern edge onto e.
// Each embedding is seen exactly once (vertex-injectivity means exactly one
// pattern edge can cover e).
template <class Visit>
void anchored_search(const HostGraph& g, const PatternGraph& h, Edge e, Visit&& visit) {
  if (g.n() < h.vertex_count()) return;
  e = make_edge(e.u, e.v);
  SearchCtx& c = tl_ctx;
  init_ctx(c, g, h, &e);
  for (const Edge& pe : h.edges()) {
    for (int flip = 0; flip < 2; ++flip) {
      const int a = flip ? pe.v : pe.u;
      const int b = flip ? pe.u : pe.v;
      plan_order(c, a, b);
      c.map[a] = e.u;
      c.map[b] = e.v;
      c.used[e.u] = c.used[e.v] = 1;
      const bool keep_going = extend(c, 2, visit);
      c.map[a] = c.map[b] = -1;
      c.used[e.u] = c.used[e.v] = 0;
      if (!keep_going) return;
    }
  }
}

}  // namespace

bool completes_copy(const HostGraph& g, const PatternGraph& h, Edge e) {
  if (h.edge_count() == 0) return false;
  bool found = false;
  anchored_search(g, h, e, [&] {
    found = true;
    return false;
  });
  return found;
}

long count_copies_with_edge(const HostGraph& g, const PatternGraph& h, Edge e) {
  if (h.edge_count() == 0) return 0;
  long embeddings = 0;
  anchored_search(g, h, e, [&] {
    ++embeddings;
    return true;
  });
  assert(embeddings % h.aut_count() == 0);
  return embeddings / h.aut_count();
}

long count_copies_total(const HostGraph& g, const PatternGraph& h) {
  if (g.n() < h.vertex_count()) return 0;
  SearchCtx& c = tl_ctx;
  init_ctx(c, g, h, nullptr);
  plan_order(c, -1, -1);
  long embeddings = 0;
  extend(c, 0, [&] {
    ++embeddings;
    return true;
  });
  assert(embeddings % h.aut_count() == 0);
  return embeddings / h.aut_count();
}

long for_each_embedding(const HostGraph& g, const PatternGraph& h,
                        const std::function<bool(std::span<const int>)>& visit) {
  if (g.n() < h.vertex_count()) return 0;
  SearchCtx& c = tl_ctx;
  init_ctx(c, g, h, nullptr);
  plan_order(c, -1, -1);
  long visited = 0;
  extend(c, 0, [&] {
    ++visited;
    return visit(std::span<const int>(c.map.data(), c.map.size()));
  });
  return visited;
}

int max_codegree(const HostGraph& g) {
  int best = 0;
  for (int u = 0; u < g.n(); ++u) {
    const std::uint64_t* ru = g.row(u);
    for (int v = u + 1; v < g.n(); ++v) {
      const std::uint64_t* rv = g.row(v);
      int common = 0;
      for (int w = 0; w < g.words(); ++w) common += std::popcount(ru[w] & rv[w]);
      best = std::max(best, common);
    }
  }
  return best;
}

std::vector<Edge> all_edges(int n) {
  std::vector<Edge> out;
  out.reserve(pair_count(n));
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) out.push_back({u, v});
  return out;
}

}  // namespace conclab
