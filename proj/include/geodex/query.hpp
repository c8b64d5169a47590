#pragma once

// Distance queries over the precomputed structures. Saddle pairs read the
// embedding directly; other pairs walk a fixed case ladder on the graph:
// direct edge, common neighbor, saddle relay through the embedding, and a
// full-graph Dijkstra as the last resort. Every answer is clamped from
// below by the Euclidean chord because the embedding distance is not a
// metric and can even go negative.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geodex/embedding.hpp"
#include "geodex/mesh.hpp"
#include "geodex/svg.hpp"

namespace geodex {

struct QueryStats {
  long long ss = 0;        // both endpoints saddles
  long long direct = 0;    // graph edge hit
  long long near = 0;      // relayed through a common neighbor
  long long far = 0;       // relayed through saddle neighbor sets
  long long fallback = 0;  // full-graph Dijkstra
  long long clamped = 0;   // chord clamp raised the answer

  long long total() const { return ss + direct + near + far + fallback; }
};

// Read-only bundle of everything a query needs. The constructor verifies
// the pieces describe the same mesh so a stale graph or embedding cannot
// be paired with the wrong surface.
struct QueryContext {
  const Mesh* mesh = nullptr;
  const Svg* svg = nullptr;
  const Embedding* embedding = nullptr;
  const VertexClassification* cls = nullptr;

  QueryContext(const Mesh& m, const Svg& g, const Embedding& e,
               const VertexClassification& c)
      : mesh(&m), svg(&g), embedding(&e), cls(&c) {
    const int n = m.vertex_count();
    if (g.vertex_count() != n)
      throw std::invalid_argument("graph does not match mesh");
    if (static_cast<int>(c.saddle_rank.size()) != n)
      throw std::invalid_argument("classification does not match mesh");
    for (int v = 0; v < n; ++v)
      if ((g.saddle[v] != 0) != c.is_saddle(v))
        throw std::invalid_argument("graph saddle flags disagree");
    if (e.row_count() != c.saddle_count())
      throw std::invalid_argument("embedding does not match classification");
    for (int r = 0; r < e.row_count(); ++r) {
      const int v = e.saddle_vertices[r];
      if (v < 0 || v >= n || !c.is_saddle(v) || e.row_of_vertex[v] != r)
        throw std::invalid_argument("embedding saddle map disagrees");
    }
  }

  void check_vertex(int v) const {
    if (v < 0 || v >= mesh->vertex_count())
      throw std::out_of_range("vertex index " + std::to_string(v));
  }
};

namespace detail {

inline double chord(const QueryContext& ctx, int a, int b) {
  return (ctx.mesh->position(a) - ctx.mesh->position(b)).norm();
}

// Embedding distance between two saddle mesh vertices, floored by their
// chord so a relay leg can never contribute a negative length.
inline double saddle_leg(const QueryContext& ctx, int sa, int sb) {
  if (sa == sb) return 0.0;
  const int a = std::min(sa, sb), b = std::max(sa, sb);
  const double f = embed_distance(*ctx.embedding, ctx.embedding->row_of_vertex[a],
                                  ctx.embedding->row_of_vertex[b]);
  return std::max(f, chord(ctx, a, b));
}

// Dijkstra over the whole graph with early exit at the target.
inline double dijkstra_to(const Svg& g, int src, int dst) {
  const int n = g.vertex_count();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[src] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    if (v == dst) return d;
    for (auto k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const int u = g.neighbors[k];
      const double nd = d + g.weights[k];
      if (nd < dist[u]) {
        dist[u] = nd;
        heap.push({nd, u});
      }
    }
  }
  return dist[dst];
}

}  // namespace detail

// Both endpoints saddles: read the embedding, clamp to the chord.
inline double ss_distance(const QueryContext& ctx, int s, int t,
                          QueryStats* stats = nullptr) {
  ctx.check_vertex(s);
  ctx.check_vertex(t);
  if (!ctx.cls->is_saddle(s) || !ctx.cls->is_saddle(t))
    throw std::invalid_argument("ss_distance needs two saddle vertices");
  if (stats) ++stats->ss;
  if (s == t) return 0.0;
  const int a = std::min(s, t), b = std::max(s, t);
  const double f = embed_distance(*ctx.embedding,
                                  ctx.embedding->row_of_vertex[a],
                                  ctx.embedding->row_of_vertex[b]);
  const double lo = detail::chord(ctx, a, b);
  if (f < lo) {
    if (stats) ++stats->clamped;
    return lo;
  }
  return f;
}

// Both endpoints non-saddles: the four-case ladder.
inline double nn_distance(const QueryContext& ctx, int u, int v,
                          QueryStats* stats = nullptr) {
  ctx.check_vertex(u);
  ctx.check_vertex(v);
  if (ctx.cls->is_saddle(u) || ctx.cls->is_saddle(v))
    throw std::invalid_argument("nn_distance needs two non-saddle vertices");
  if (u == v) return 0.0;
  if (u > v) std::swap(u, v);  // fixed evaluation order keeps exact symmetry

  const Svg& g = *ctx.svg;
  if (auto w = edge_weight(g, u, v)) {
    if (stats) ++stats->direct;
    return *w;
  }

  // Merge-walk the two sorted rows for common neighbors.
  constexpr double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  auto iu = g.offsets[u], eu = g.offsets[u + 1];
  auto iv = g.offsets[v], ev = g.offsets[v + 1];
  while (iu < eu && iv < ev) {
    if (g.neighbors[iu] < g.neighbors[iv]) {
      ++iu;
    } else if (g.neighbors[iu] > g.neighbors[iv]) {
      ++iv;
    } else {
      best = std::min(best, g.weights[iu] + g.weights[iv]);
      ++iu;
      ++iv;
    }
  }
  if (best < inf) {
    if (stats) ++stats->near;
    return best;
  }

  // Relay through the saddle neighbor sets of both sides.
  bool u_has = false, v_has = false;
  for (auto k = g.offsets[u]; k < g.offsets[u + 1] && !u_has; ++k)
    u_has = g.saddle[g.neighbors[k]] != 0;
  for (auto k = g.offsets[v]; k < g.offsets[v + 1] && !v_has; ++k)
    v_has = g.saddle[g.neighbors[k]] != 0;
  if (u_has && v_has) {
    double min_wv = inf;
    for (auto k = g.offsets[v]; k < g.offsets[v + 1]; ++k)
      if (g.saddle[g.neighbors[k]]) min_wv = std::min(min_wv, g.weights[k]);
    for (auto ku = g.offsets[u]; ku < g.offsets[u + 1]; ++ku) {
      const int s = g.neighbors[ku];
      if (!g.saddle[s]) continue;
      if (g.weights[ku] + min_wv >= best) continue;  // cannot win
      for (auto kv = g.offsets[v]; kv < g.offsets[v + 1]; ++kv) {
        const int t = g.neighbors[kv];
        if (!g.saddle[t]) continue;
        const double lead = g.weights[ku] + g.weights[kv];
        if (lead >= best) continue;
        const double cand = g.weights[ku] + detail::saddle_leg(ctx, s, t) +
                            g.weights[kv];
        best = std::min(best, cand);
      }
    }
    if (stats) ++stats->far;
    return best;
  }

  if (stats) ++stats->fallback;
  return detail::dijkstra_to(g, u, v);
}

// Mixed pair: u non-saddle, s saddle. Same ladder, but the relay only
// fans out on the non-saddle side.
inline double ns_distance(const QueryContext& ctx, int u, int s,
                          QueryStats* stats = nullptr) {
  ctx.check_vertex(u);
  ctx.check_vertex(s);
  if (ctx.cls->is_saddle(u) || !ctx.cls->is_saddle(s))
    throw std::invalid_argument(
        "ns_distance needs a non-saddle then a saddle vertex");

  const Svg& g = *ctx.svg;
  if (auto w = edge_weight(g, u, s)) {
    if (stats) ++stats->direct;
    return *w;
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  auto iu = g.offsets[u], eu = g.offsets[u + 1];
  auto is = g.offsets[s], es = g.offsets[s + 1];
  while (iu < eu && is < es) {
    if (g.neighbors[iu] < g.neighbors[is]) {
      ++iu;
    } else if (g.neighbors[iu] > g.neighbors[is]) {
      ++is;
    } else {
      best = std::min(best, g.weights[iu] + g.weights[is]);
      ++iu;
      ++is;
    }
  }
  if (best < inf) {
    if (stats) ++stats->near;
    return best;
  }

  bool u_has = false;
  for (auto k = g.offsets[u]; k < g.offsets[u + 1] && !u_has; ++k)
    u_has = g.saddle[g.neighbors[k]] != 0;
  if (u_has) {
    for (auto k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
      const int t = g.neighbors[k];
      if (!g.saddle[t]) continue;
      if (g.weights[k] >= best) continue;
      best = std::min(best, g.weights[k] + detail::saddle_leg(ctx, t, s));
    }
    if (stats) ++stats->far;
    return best;
  }

  if (stats) ++stats->fallback;
  return detail::dijkstra_to(g, std::min(u, s), std::max(u, s));
}

// Dispatch on endpoint classes, then clamp to the Euclidean chord. The
// pair is canonicalized first so both argument orders run bit-identical
// arithmetic.
inline double query_distance(const QueryContext& ctx, int u, int v,
                             QueryStats* stats = nullptr) {
  ctx.check_vertex(u);
  ctx.check_vertex(v);
  if (u == v) return 0.0;
  const int a = std::min(u, v), b = std::max(u, v);
  const bool sa = ctx.cls->is_saddle(a), sb = ctx.cls->is_saddle(b);

  double d;
  if (sa && sb)
    d = ss_distance(ctx, a, b, stats);
  else if (!sa && !sb)
    d = nn_distance(ctx, a, b, stats);
  else if (sa)
    d = ns_distance(ctx, b, a, stats);
  else
    d = ns_distance(ctx, a, b, stats);

  const double lo = detail::chord(ctx, a, b);
  if (d < lo) {
    if (stats) ++stats->clamped;
    return lo;
  }
  return d;
}

}  // namespace geodex
