#pragma once

// Exact single-source geodesic distances by window propagation (continuous
// Dijkstra with pseudo-source tracking), plus a Steiner-subdivision Dijkstra
// used as an independent slower reference.
//
// A window lives on halfedge h and describes a bundle of geodesic paths that
// cross edge(h). In the window's frame origin(h) is (0,0), dest(h) is
// (len,0), face(h) lies on the +y side, and the unfolded image of the path
// bundle's root (source or pseudo-source) sits at +y. b0/b1 bound the
// crossing interval on the edge, d0/d1 are straight-line distances from the
// interval ends to the root image, and sigma is the on-surface distance from
// the true source to the root. Propagation unfolds the face across twin(h),
// splits the window at the far apex when the bundle straddles it, and
// relaxes the apex label when covered. Saddle and boundary vertices re-emit
// windows (pseudo-sources); a finished label is a direct geodesic iff its
// pseudo-source is the source itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <vector>

#include "geodex/mesh.hpp"

namespace geodex {

struct DistanceField {
  int source = -1;
  std::vector<double> distances;
};

struct DirectNeighbor {
  int vertex;
  double distance;
  bool saddle;
};

struct DirectNeighborList {
  int source = -1;
  std::vector<DirectNeighbor> entries;  // ascending (distance, vertex)
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slack for window pruning and interval drops.
constexpr double kWindowTol = 1e-12;
// Slack for deciding that a window's cone reaches the far apex. A geodesic
// running exactly through a vertex puts the apex on a window endpoint ray,
// and rounding can push the crossing a few ulps outside the closed
// interval; without the slack such vertices (and everything behind them)
// never get their straight-line label. Accepting a near-miss is safe: the
// unfolded straight line differs from a realizable path through the
// nearest covered point only at second order in the miss distance.
constexpr double kStraddleSlop = 1e-10;

struct Window {
  double b0, b1, d0, d1;
  double sigma;
  double key;
  int h;
  int psrc;
  int psrc_birth;
  int level;
  std::uint64_t id;
  // 0 full-edge spawn, 1 left child (keeps the origin end), 2 right child.
  int kind;

  bool operator>(const Window& o) const {
    return key != o.key ? key > o.key : id > o.id;
  }
};

struct PseudoEvent {
  double key;
  int v;
  int birth;
  std::uint64_t id;

  bool operator>(const PseudoEvent& o) const {
    return key != o.key ? key > o.key : id > o.id;
  }
};

struct PendingLabel {
  double dist;
  int v;
  bool operator>(const PendingLabel& o) const {
    return dist != o.dist ? dist > o.dist : v > o.v;
  }
};

// Root image position in the window frame. y is clamped non-negative: a
// root sitting exactly on the edge line is legal (collinear unfolding).
inline void root_image(const Window& w, double& sx, double& sy) {
  const double span = w.b1 - w.b0;
  sx = 0.5 * (w.b0 + w.b1) + (w.d0 * w.d0 - w.d1 * w.d1) / (2.0 * span);
  const double y2 = w.d0 * w.d0 - (sx - w.b0) * (sx - w.b0);
  sy = y2 > 0.0 ? std::sqrt(y2) : 0.0;
}

inline double window_key(const Window& w) {
  double sx, sy;
  root_image(w, sx, sy);
  if (sx < w.b0) return w.sigma + w.d0;
  if (sx > w.b1) return w.sigma + w.d1;
  return w.sigma + sy;
}

class WindowEngine {
 public:
  explicit WindowEngine(const Mesh& mesh) : mesh_(mesh) {}

  // Full run: caps <= 0. Capped run: stops once `direct_cap` direct labels
  // or `saddle_cap` direct saddle labels are finalized (classification
  // required to recognize saddles).
  void run(int source, const VertexClassification* cls, int direct_cap,
           int saddle_cap) {
    const int n = mesh_.vertex_count();
    if (source < 0 || source >= n)
      throw std::out_of_range("source vertex " + std::to_string(source));
    source_ = source;
    dist_.assign(n, kInf);
    birth_.assign(n, 0);
    psrc_.assign(n, -1);
    level_.assign(n, 0);
    entry_kind_.assign(n, kEntryNone);
    entry_he_.assign(n, -1);
    entry_x_.assign(n, 0.0);
    counted_.assign(n, 0);
    windows_ = {};
    pseudo_ = {};
    pending_ = {};
    next_window_id_ = 0;
    next_pseudo_id_ = 0;
    frontier_ = 0.0;
    finalized_direct_ = 0;
    finalized_direct_saddles_ = 0;
    level_cap_ = 4 * mesh_.face_count() + 16;
    slack_ = kWindowTol * (1.0 + mesh_.bbox_diagonal());

    const bool capped = direct_cap > 0;
    dist_[source] = 0.0;
    birth_[source] = 1;
    psrc_[source] = source;
    entry_kind_[source] = kEntrySource;
    spawn_from_vertex(source);

    while (!windows_.empty() || !pseudo_.empty()) {
      const bool take_window =
          !windows_.empty() &&
          (pseudo_.empty() || windows_.top().key <= pseudo_.top().key);
      if (take_window) {
        Window w = windows_.top();
        windows_.pop();
        frontier_ = std::max(frontier_, w.key);
        if (w.psrc_birth == birth_[w.psrc]) propagate(w);
      } else {
        PseudoEvent ev = pseudo_.top();
        pseudo_.pop();
        frontier_ = std::max(frontier_, ev.key);
        if (ev.birth == birth_[ev.v]) spawn_from_vertex(ev.v);
      }
      if (capped) {
        drain_pending(cls);
        if (finalized_direct_ >= direct_cap ||
            finalized_direct_saddles_ >= saddle_cap)
          break;
      }
    }
    exhausted_ = windows_.empty() && pseudo_.empty();
  }

  const std::vector<double>& distances() const { return dist_; }
  bool direct(int v) const { return psrc_[v] == source_; }
  // Labels at or below the cutoff are final; infinity after a full run.
  double final_cutoff() const {
    return exhausted_ ? kInf : frontier_ + slack_;
  }

 private:
  static constexpr int kEntryNone = 0;
  static constexpr int kEntrySource = 1;
  static constexpr int kEntryWindow = 2;
  static constexpr int kEntryEdge = 3;

  void improve(int v, double d, int psrc, int lvl, int kind, int he,
               double x) {
    dist_[v] = d;
    ++birth_[v];
    psrc_[v] = psrc;
    level_[v] = lvl;
    entry_kind_[v] = kind;
    entry_he_[v] = he;
    entry_x_[v] = x;
    counted_[v] = 0;
    pending_.push({d, v});
    if (mesh_.angle_sum(v) > 2.0 * std::numbers::pi + kSaddleAngleTolerance ||
        mesh_.is_boundary_vertex(v)) {
      pseudo_.push({d, v, birth_[v], next_pseudo_id_++});
    }
  }

  void drain_pending(const VertexClassification* cls) {
    while (!pending_.empty() && pending_.top().dist <= frontier_ + slack_) {
      auto [d, v] = pending_.top();
      pending_.pop();
      if (d != dist_[v] || counted_[v] || v == source_) continue;
      counted_[v] = 1;
      if (psrc_[v] == source_) {
        ++finalized_direct_;
        if (cls && cls->is_saddle(v)) ++finalized_direct_saddles_;
      }
    }
  }

  // All outgoing halfedges of v in rotation order, with cumulative corner
  // angles. For boundary fans the walk covers the open disk once.
  void collect_fan(int v, std::vector<int>& out, std::vector<double>& cum) {
    out.clear();
    cum.clear();
    const int h0 = mesh_.outgoing(v);
    int h = h0;
    double acc = 0.0;
    do {
      out.push_back(h);
      cum.push_back(acc);
      acc += mesh_.corner_angle(h);
      h = mesh_.rotate(h);
    } while (h >= 0 && h != h0);
    cum.push_back(acc);  // == angle_sum(v)
  }

  // Spawns full-edge windows on the opposite edges of v's incident faces,
  // restricted to directions that continue the incoming path geodesically
  // (both side angles >= pi on the vertex cone). Sources and boundary
  // vertices emit into the whole fan. Also relaxes all edge neighbours:
  // walking an edge away from a relay is always a realizable path, and the
  // labels feed the pruning filters even when a later window beats them.
  void spawn_from_vertex(int v) {
    collect_fan(v, fan_, cum_);
    const double total = cum_.back();
    const int nf = static_cast<int>(fan_.size());
    const double dv = dist_[v];
    const int lvl = level_[v] + 1;
    if (lvl > level_cap_) return;

    for (int k = 0; k < nf; ++k) {
      const int u = mesh_.dest(fan_[k]);
      const double cand = dv + mesh_.halfedge_length(fan_[k]);
      if (cand < dist_[u]) {
        const int back = mesh_.twin(fan_[k]);  // outgoing u -> v, if any
        improve(u, cand, v, lvl, kEntryEdge, back >= 0 ? back : fan_[k], 0.0);
      }
    }
    // Boundary fans miss the tail-end rim neighbour (the walk only yields
    // outgoing halfedges); reach it through the last face's far corner.
    if (mesh_.is_boundary_vertex(v) && nf > 0) {
      const int last = fan_.back();
      const int w = mesh_.dest(Mesh::next(last));
      const double cand = dv + mesh_.halfedge_length(Mesh::prev(last));
      if (cand < dist_[w])
        improve(w, cand, v, lvl, kEntryEdge, Mesh::prev(last), 0.0);
    }

    // Angular position of the incoming direction on the vertex cone, used to
    // clip re-emission to the geodesic continuation wedge.
    double ref = 0.0;
    bool clipped = false;
    if (entry_kind_[v] == kEntryEdge) {
      for (int k = 0; k < nf; ++k) {
        if (fan_[k] == entry_he_[v]) {
          ref = cum_[k];
          clipped = true;
          break;
        }
      }
    } else if (entry_kind_[v] == kEntryWindow) {
      // v was covered as the apex of a window that crossed halfedge t; the
      // final segment runs inside face(t) from the crossing point to v. Its
      // direction sits inside the corner of face(t) at v, measured from the
      // outgoing edge prev(t).
      const int t = entry_he_[v];
      const int out_he = Mesh::prev(t);  // v -> origin(t)
      const double l = mesh_.halfedge_length(t);
      const double alpha = mesh_.halfedge_length(Mesh::next(t));  // dest(t)-v
      const double beta = mesh_.halfedge_length(out_he);          // v-origin(t)
      // Lay out face(t): origin(t)=(0,0), dest(t)=(l,0), v above.
      const double vx = (beta * beta - alpha * alpha + l * l) / (2.0 * l);
      const double vy2 = beta * beta - vx * vx;
      const double vy = vy2 > 0.0 ? std::sqrt(vy2) : 0.0;
      const double px = entry_x_[v];  // crossing point, from origin(t)
      const double ang_edge = std::atan2(-vy, -vx);       // toward origin(t)
      const double ang_seg = std::atan2(-vy, px - vx);    // toward crossing
      const double off = std::abs(ang_seg - ang_edge);
      for (int k = 0; k < nf; ++k) {
        if (fan_[k] == out_he) {
          ref = cum_[k] + off;
          clipped = true;
          break;
        }
      }
    }
    if (mesh_.is_boundary_vertex(v) || entry_kind_[v] == kEntrySource)
      clipped = false;

    double w0 = 0.0, w1 = 0.0;
    if (clipped) {
      w0 = ref + std::numbers::pi;
      w1 = ref + total - std::numbers::pi;
      if (w1 < w0) return;  // cone angle < 2*pi: no geodesic continues
    }
    for (int k = 0; k < nf; ++k) {
      if (clipped) {
        const double f0 = cum_[k];
        const double f1 = cum_[k] + mesh_.corner_angle(fan_[k]);
        const bool hit = (f1 > w0 - 1e-12 && f0 < w1 + 1e-12) ||
                         (f1 > w0 - total - 1e-12 && f0 < w1 - total + 1e-12);
        if (!hit) continue;
      }
      const int g = Mesh::next(fan_[k]);  // opposite edge, origin = dest(fan)
      Window w;
      w.b0 = 0.0;
      w.b1 = mesh_.halfedge_length(g);
      w.d0 = mesh_.halfedge_length(fan_[k]);
      w.d1 = mesh_.halfedge_length(Mesh::prev(fan_[k]));
      w.sigma = dv;
      w.h = g;
      w.psrc = v;
      w.psrc_birth = birth_[v];
      w.level = lvl;
      w.kind = 0;
      push_window(w);
    }
  }

  // ICH label filters: drop a window when paths through it are dominated by
  // routes via an already-labelled vertex of its source-side face. Labels
  // are upper bounds, so pruning against them is safe; the slack keeps
  // exact ties alive.
  bool useful(const Window& w) const {
    if (w.b1 - w.b0 <= kWindowTol * mesh_.halfedge_length(w.h)) return false;
    const int v0 = mesh_.origin(w.h);
    const int v1 = mesh_.dest(w.h);
    const int va = mesh_.dest(Mesh::next(w.h));  // apex of source-side face
    const double l = mesh_.halfedge_length(w.h);
    const double tol = kWindowTol * (1.0 + frontier_);
    if (w.sigma + w.d1 > dist_[v0] + w.b1 + tol) return false;
    if (w.sigma + w.d0 > dist_[v1] + (l - w.b0) + tol) return false;
    if (w.kind != 0 && dist_[va] < kInf) {
      const double a = mesh_.halfedge_length(Mesh::next(w.h));  // dest-apex
      const double b = mesh_.halfedge_length(Mesh::prev(w.h));  // apex-origin
      const double ax = (b * b - a * a + l * l) / (2.0 * l);
      const double ay2 = b * b - ax * ax;
      const double ay = ay2 > 0.0 ? std::sqrt(ay2) : 0.0;  // +y: source side
      if (w.kind == 1) {
        if (w.sigma + w.d0 > dist_[va] + std::hypot(ax - w.b0, ay) + tol)
          return false;
      } else {
        if (w.sigma + w.d1 > dist_[va] + std::hypot(ax - w.b1, ay) + tol)
          return false;
      }
    }
    return true;
  }

  void push_window(Window w) {
    if (w.level > level_cap_) return;
    if (!useful(w)) return;
    w.key = window_key(w);
    w.id = next_window_id_++;
    windows_.push(w);
  }

  // Unfold across twin(h) and emit child windows; relax the far apex when
  // the bundle covers it.
  void propagate(const Window& w) {
    const int t = mesh_.twin(w.h);
    if (t < 0) return;
    double sx, sy;
    root_image(w, sx, sy);

    const double l = mesh_.halfedge_length(w.h);
    const int he_left = Mesh::next(t);   // origin(h) -> apex
    const int he_right = Mesh::prev(t);  // apex -> dest(h)
    const double a = mesh_.halfedge_length(he_left);
    const double b = mesh_.halfedge_length(he_right);
    // Apex below the edge in the parent frame.
    const double cx = (a * a - b * b + l * l) / (2.0 * l);
    const double cy2 = a * a - cx * cx;
    const double cy = -(cy2 > 0.0 ? std::sqrt(cy2) : 0.0);

    // Where the root->apex ray crosses the carrying edge; sy >= 0 > cy for
    // non-degenerate faces, so the denominator is safe.
    const double inter_x = sx + sy * (cx - sx) / (sy - cy);

    // Parameter (arc length from q0) where the ray root->(px,0) crosses
    // segment q0->q1, clamped to the segment. A near-parallel ray grazes:
    // collapse to the closer endpoint, the tiny window gets dropped and
    // edge-walk relaxation covers such paths anyway.
    const auto hit = [&](double px, double q0x, double q0y, double q1x,
                         double q1y) {
      const double rx = px - sx, ry = -sy;
      const double ex = q1x - q0x, ey = q1y - q0y;
      const double seg = std::hypot(ex, ey);
      const double den = rx * ey - ry * ex;
      const double c0 = rx * (q0y - sy) - ry * (q0x - sx);
      if (std::abs(den) < 1e-300) {
        const double c1 = rx * (q1y - sy) - ry * (q1x - sx);
        return std::abs(c0) <= std::abs(c1) ? 0.0 : seg;
      }
      return std::clamp(-c0 / den * seg, 0.0, seg);
    };
    // Positions along the two far edges.
    const auto on_left = [&](double p, double& x, double& y) {
      x = p / a * cx;
      y = p / a * cy;
    };
    const auto on_right = [&](double p, double& x, double& y) {
      x = cx + p / b * (l - cx);
      y = cy + p / b * (0.0 - cy);
    };

    const int apex = mesh_.dest(he_left);
    const int lvl = w.level + 1;

    Window c;
    c.sigma = w.sigma;
    c.psrc = w.psrc;
    c.psrc_birth = w.psrc_birth;
    c.level = lvl;

    // Relax the apex whenever the cone reaches it, with slack for endpoint
    // rays that graze it (see kStraddleSlop).
    const double slop = kStraddleSlop * l;
    if (inter_x >= w.b0 - slop && inter_x <= w.b1 + slop) {
      const double cand = w.sigma + std::hypot(cx - sx, cy - sy);
      if (cand < dist_[apex])
        improve(apex, cand, w.psrc, lvl, kEntryWindow, t, l - inter_x);
    }

    if (inter_x >= w.b0 && inter_x <= w.b1) {
      // Bundle straddles the apex: split into two children.
      c.h = he_left;
      c.kind = 1;
      c.b0 = hit(w.b0, 0.0, 0.0, cx, cy);
      c.b1 = a;
      double x0, y0;
      on_left(c.b0, x0, y0);
      c.d0 = std::hypot(sx - x0, sy - y0);
      c.d1 = std::hypot(sx - cx, sy - cy);
      push_window(c);

      c.h = he_right;
      c.kind = 2;
      c.b0 = 0.0;
      c.b1 = hit(w.b1, cx, cy, l, 0.0);
      double x1, y1;
      on_right(c.b1, x1, y1);
      c.d0 = std::hypot(sx - cx, sy - cy);
      c.d1 = std::hypot(sx - x1, sy - y1);
      push_window(c);
    } else if (inter_x < w.b0) {
      // Whole bundle exits through apex->dest.
      c.h = he_right;
      c.kind = 2;
      const double p0 = hit(w.b0, cx, cy, l, 0.0);
      const double p1 = hit(w.b1, cx, cy, l, 0.0);
      c.b0 = std::min(p0, p1);
      c.b1 = std::max(p0, p1);
      double x0, y0, x1, y1;
      on_right(c.b0, x0, y0);
      on_right(c.b1, x1, y1);
      c.d0 = std::hypot(sx - x0, sy - y0);
      c.d1 = std::hypot(sx - x1, sy - y1);
      push_window(c);
    } else {
      // Whole bundle exits through origin->apex.
      c.h = he_left;
      c.kind = 1;
      const double p0 = hit(w.b0, 0.0, 0.0, cx, cy);
      const double p1 = hit(w.b1, 0.0, 0.0, cx, cy);
      c.b0 = std::min(p0, p1);
      c.b1 = std::max(p0, p1);
      double x0, y0, x1, y1;
      on_left(c.b0, x0, y0);
      on_left(c.b1, x1, y1);
      c.d0 = std::hypot(sx - x0, sy - y0);
      c.d1 = std::hypot(sx - x1, sy - y1);
      push_window(c);
    }
  }

  const Mesh& mesh_;
  int source_ = -1;
  std::vector<double> dist_;
  std::vector<int> birth_, psrc_, level_, entry_he_;
  std::vector<int> entry_kind_;
  std::vector<double> entry_x_;
  std::vector<char> counted_;
  std::priority_queue<Window, std::vector<Window>, std::greater<>> windows_;
  std::priority_queue<PseudoEvent, std::vector<PseudoEvent>, std::greater<>>
      pseudo_;
  std::priority_queue<PendingLabel, std::vector<PendingLabel>, std::greater<>>
      pending_;
  std::vector<int> fan_;
  std::vector<double> cum_;
  std::uint64_t next_window_id_ = 0, next_pseudo_id_ = 0;
  double frontier_ = 0.0;
  double slack_ = 0.0;
  int finalized_direct_ = 0, finalized_direct_saddles_ = 0;
  int level_cap_ = 0;
  bool exhausted_ = false;
};

}  // namespace detail

inline DistanceField ssad_exact(const Mesh& mesh, int source) {
  detail::WindowEngine engine(mesh);
  engine.run(source, nullptr, 0, 0);
  DistanceField out;
  out.source = source;
  out.distances = engine.distances();
  return out;
}

// Direct geodesic neighbours of `source`, nearest first, stopping at K
// entries or K_S saddle entries, whichever comes first.
inline DirectNeighborList local_direct_geodesics(
    const Mesh& mesh, const VertexClassification& cls, int source, int K,
    int K_S) {
  if (K < 1 || K_S < 1 || K_S > K)
    throw std::invalid_argument("need 1 <= K_S <= K");
  detail::WindowEngine engine(mesh);
  engine.run(source, &cls, K, K_S);

  const auto& dist = engine.distances();
  const double cutoff = engine.final_cutoff();
  std::vector<DirectNeighbor> all;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (v == source || !(dist[v] <= cutoff)) continue;
    if (!engine.direct(v)) continue;
    all.push_back({v, dist[v], cls.is_saddle(v)});
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.distance != y.distance ? x.distance < y.distance
                                    : x.vertex < y.vertex;
  });
  DirectNeighborList out;
  out.source = source;
  int saddles = 0;
  for (const auto& e : all) {
    out.entries.push_back(e);
    saddles += e.saddle ? 1 : 0;
    if (static_cast<int>(out.entries.size()) >= K || saddles >= K_S) break;
  }
  return out;
}

// Dijkstra over the mesh graph augmented with `splits` evenly spaced Steiner
// points per edge and complete per-face connections. Converges to the true
// geodesic distance from above as splits grows; splits = 0 is the classic
// edge-graph upper bound.
inline DistanceField ssad_reference(const Mesh& mesh, int source, int splits) {
  if (splits < 0) throw std::invalid_argument("splits must be >= 0");
  const int n = mesh.vertex_count();
  if (source < 0 || source >= n)
    throw std::out_of_range("source vertex " + std::to_string(source));
  const int N = n + mesh.edge_count() * splits;

  std::vector<Vec3> pos(N);
  for (int v = 0; v < n; ++v) pos[v] = mesh.position(v);
  for (int e = 0; e < mesh.edge_count(); ++e) {
    auto [va, vb] = mesh.edge_vertices(e);
    for (int k = 0; k < splits; ++k) {
      double t = double(k + 1) / (splits + 1);
      pos[n + e * splits + k] =
          (1.0 - t) * mesh.position(va) + t * mesh.position(vb);
    }
  }

  // Complete graph on each face's corner + Steiner nodes, flattened to CSR.
  std::vector<int> face_nodes;
  std::vector<std::pair<int, int>> arcs;
  for (int f = 0; f < mesh.face_count(); ++f) {
    face_nodes.clear();
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      face_nodes.push_back(mesh.origin(h));
      const int e = mesh.halfedge(h).edge;
      for (int s = 0; s < splits; ++s)
        face_nodes.push_back(n + e * splits + s);
    }
    for (std::size_t i = 0; i < face_nodes.size(); ++i)
      for (std::size_t j = i + 1; j < face_nodes.size(); ++j) {
        arcs.emplace_back(face_nodes[i], face_nodes[j]);
        arcs.emplace_back(face_nodes[j], face_nodes[i]);
      }
  }
  std::vector<int> off(N + 1, 0);
  for (const auto& [u, v] : arcs) ++off[u + 1];
  for (int i = 0; i < N; ++i) off[i + 1] += off[i];
  std::vector<int> adj(arcs.size());
  {
    std::vector<int> cur(off.begin(), off.end() - 1);
    for (const auto& [u, v] : arcs) adj[cur[u]++] = v;
  }

  std::vector<double> dist(N, detail::kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    for (int i = off[u]; i < off[u + 1]; ++i) {
      const int v = adj[i];
      const double nd = d + (pos[u] - pos[v]).norm();
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }

  DistanceField out;
  out.source = source;
  out.distances.assign(dist.begin(), dist.begin() + n);
  return out;
}

}  // namespace geodex
