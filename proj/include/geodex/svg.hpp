#pragma once

// Degree-capped saddle vertex graph. Every vertex keeps its nearest direct
// geodesic neighbours (capped overall and separately for saddles), the
// per-vertex lists are unioned and symmetrized, and weights are the exact
// geodesic distances. Shortest paths on the graph can only over-approximate
// surface distance, with equality whenever the true geodesic bends at
// saddle vertices only.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "geodex/geodesic.hpp"
#include "geodex/mesh.hpp"
#include "geodex/parallel.hpp"

namespace geodex {

struct SvgParams {
  int neighbor_cap = 60;         // per-vertex direct-neighbour budget (K)
  int saddle_neighbor_cap = 20;  // at most this many saddles among them (K_S)
};

// Edge tier by endpoint class: both ends saddle (SS), exactly one (NS),
// neither (NN).
enum class EdgeTier : std::uint8_t { SS, NS, NN };

inline const char* tier_name(EdgeTier t) {
  switch (t) {
    case EdgeTier::SS: return "SS";
    case EdgeTier::NS: return "NS";
    default: return "NN";
  }
}

struct TaggedNeighbor {
  int vertex;
  double weight;
  EdgeTier tier;
};

// Immutable CSR adjacency, rows sorted by neighbour index. Saddle flags are
// snapshotted so edge tiers survive without the classification object.
struct Svg {
  std::vector<std::int64_t> offsets;  // vertex_count() + 1
  std::vector<int> neighbors;
  std::vector<double> weights;
  std::vector<std::uint8_t> saddle;

  int vertex_count() const { return static_cast<int>(saddle.size()); }
  int degree(int v) const {
    return static_cast<int>(offsets[v + 1] - offsets[v]);
  }
  std::int64_t edge_slots() const {
    return static_cast<std::int64_t>(neighbors.size());
  }

  void check_vertex(int v) const {
    if (v < 0 || v >= vertex_count())
      throw std::out_of_range("vertex " + std::to_string(v) +
                              " outside graph of " +
                              std::to_string(vertex_count()));
  }
};

inline Svg build_svg(const Mesh& mesh, const VertexClassification& cls,
                     const SvgParams& params, int threads = 0) {
  if (params.neighbor_cap < 1 || params.saddle_neighbor_cap < 1 ||
      params.saddle_neighbor_cap > params.neighbor_cap)
    throw std::invalid_argument("need 1 <= saddle cap <= neighbor cap");
  const int n = mesh.vertex_count();
  if (static_cast<int>(cls.saddle_rank.size()) != n)
    throw std::invalid_argument("classification does not match mesh");

  // Independent local propagations; each worker writes its own rows.
  std::vector<std::vector<DirectNeighbor>> rows(n);
  parallel_for_blocks(n, resolve_threads(threads),
                      [&](std::int64_t b, std::int64_t e) {
                        for (std::int64_t v = b; v < e; ++v)
                          rows[v] = local_direct_geodesics(
                                        mesh, cls, static_cast<int>(v),
                                        params.neighbor_cap,
                                        params.saddle_neighbor_cap)
                                        .entries;
                      });

  // Undirected union. Both directions of a surviving pair hold the same
  // exact distance up to rounding; keep the smaller one.
  std::vector<std::tuple<int, int, double>> und;
  for (int v = 0; v < n; ++v)
    for (const auto& e : rows[v])
      und.emplace_back(std::min(v, e.vertex), std::max(v, e.vertex),
                       e.distance);
  std::sort(und.begin(), und.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });
  std::size_t m = 0;
  for (std::size_t i = 0; i < und.size(); ++i) {
    if (m > 0 && std::get<0>(und[m - 1]) == std::get<0>(und[i]) &&
        std::get<1>(und[m - 1]) == std::get<1>(und[i])) {
      std::get<2>(und[m - 1]) =
          std::min(std::get<2>(und[m - 1]), std::get<2>(und[i]));
    } else {
      und[m++] = und[i];
    }
  }
  und.resize(m);

  Svg g;
  g.saddle.assign(n, 0);
  for (int v = 0; v < n; ++v) g.saddle[v] = cls.is_saddle(v) ? 1 : 0;
  g.offsets.assign(n + 1, 0);
  for (const auto& [a, b, w] : und) {
    ++g.offsets[a + 1];
    ++g.offsets[b + 1];
  }
  for (int v = 0; v < n; ++v) g.offsets[v + 1] += g.offsets[v];
  g.neighbors.assign(und.size() * 2, -1);
  g.weights.assign(und.size() * 2, 0.0);
  std::vector<std::int64_t> cur(g.offsets.begin(), g.offsets.end() - 1);
  // One pass over pairs sorted by (a, b), a < b, emitting both directions,
  // leaves every row sorted: row v collects its smaller neighbours while
  // a < v (ascending a) and its larger ones in the contiguous a == v block
  // (ascending b).
  for (const auto& [a, b, w] : und) {
    g.neighbors[cur[a]] = b;
    g.weights[cur[a]++] = w;
    g.neighbors[cur[b]] = a;
    g.weights[cur[b]++] = w;
  }
  return g;
}

inline std::optional<double> edge_weight(const Svg& g, int u, int v) {
  g.check_vertex(u);
  g.check_vertex(v);
  const auto begin = g.neighbors.begin() + g.offsets[u];
  const auto end = g.neighbors.begin() + g.offsets[u + 1];
  const auto it = std::lower_bound(begin, end, v);
  if (it == end || *it != v) return std::nullopt;
  return g.weights[it - g.neighbors.begin()];
}

inline std::vector<TaggedNeighbor> neighbors(const Svg& g, int v) {
  g.check_vertex(v);
  std::vector<TaggedNeighbor> out;
  out.reserve(g.degree(v));
  for (auto i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
    const int u = g.neighbors[i];
    const int nsad = (g.saddle[v] ? 1 : 0) + (g.saddle[u] ? 1 : 0);
    const EdgeTier tier = nsad == 2   ? EdgeTier::SS
                          : nsad == 1 ? EdgeTier::NS
                                      : EdgeTier::NN;
    out.push_back({u, g.weights[i], tier});
  }
  return out;
}

// Full single-source shortest paths over the graph; infinity marks
// unreachable vertices.
inline std::vector<double> svg_dijkstra(const Svg& g, int source) {
  g.check_vertex(source);
  std::vector<double> dist(g.vertex_count(),
                           std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    for (auto i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
      const int v = g.neighbors[i];
      const double nd = d + g.weights[i];
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }
  return dist;
}

}  // namespace geodex
