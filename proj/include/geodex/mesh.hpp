#pragma once

// Triangle mesh with halfedge adjacency. Loads ASCII OFF and OBJ, rejects
// anything that is not a clean edge-connected triangle mesh (boundaries are
// fine, non-manifold edges are not). Vertices and faces are immutable after
// construction; all derived quantities (edge lengths, corner angles, angle
// sums) are precomputed.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace geodex {

using Vec3 = Eigen::Vector3d;

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct TopologyError : std::runtime_error {
  explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

// Halfedge h belongs to face h/3; next/prev stay inside that face.
struct Halfedge {
  int origin = -1;
  int twin = -1;  // -1 on boundary
  int edge = -1;
};

class Mesh {
 public:
  Mesh() = default;

  static Mesh from_data(std::vector<Vec3> vertices,
                        std::vector<std::array<int, 3>> faces) {
    Mesh m;
    m.vertices_ = std::move(vertices);
    m.faces_ = std::move(faces);
    m.build();
    return m;
  }

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  int edge_count() const { return static_cast<int>(edge_halfedge_.size()); }
  int halfedge_count() const { return 3 * face_count(); }

  const Vec3& position(int v) const { return vertices_.at(v); }
  const std::vector<Vec3>& positions() const { return vertices_; }
  const std::array<int, 3>& face(int f) const { return faces_.at(f); }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }

  const Halfedge& halfedge(int h) const { return halfedges_[h]; }
  static int next(int h) { return h - h % 3 + (h + 1) % 3; }
  static int prev(int h) { return h - h % 3 + (h + 2) % 3; }
  static int face_of(int h) { return h / 3; }
  int origin(int h) const { return halfedges_[h].origin; }
  int dest(int h) const { return halfedges_[next(h)].origin; }
  int twin(int h) const { return halfedges_[h].twin; }

  // Some outgoing halfedge of v; for boundary vertices the boundary-edge one,
  // so a rotate() walk covers the whole disk before hitting -1.
  int outgoing(int v) const { return vertex_halfedge_.at(v); }

  double edge_length(int e) const { return edge_length_.at(e); }
  double halfedge_length(int h) const {
    return edge_length_[halfedges_[h].edge];
  }
  std::pair<int, int> edge_vertices(int e) const {
    int h = edge_halfedge_.at(e);
    return {origin(h), dest(h)};
  }

  // Interior angle at origin(h) inside face h/3.
  double corner_angle(int h) const { return corner_angle_[h]; }
  double angle_sum(int v) const { return angle_sum_.at(v); }
  bool is_boundary_vertex(int v) const { return boundary_vertex_.at(v) != 0; }

  // Rotates an outgoing halfedge of v to the adjacent outgoing halfedge on
  // the other side of face(h); -1 when the walk leaves the surface.
  int rotate(int h) const { return halfedges_[prev(h)].twin; }

  double bbox_diagonal() const { return bbox_diagonal_; }
  double mean_edge_length() const { return mean_edge_length_; }

  // FNV-1a over vertex coordinates (raw doubles) and face indices; binds
  // precomputed files to the exact mesh they were built from.
  std::uint64_t checksum() const { return checksum_; }

 private:
  void build();

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<Halfedge> halfedges_;
  std::vector<int> vertex_halfedge_;
  std::vector<int> edge_halfedge_;
  std::vector<double> edge_length_;
  std::vector<double> corner_angle_;
  std::vector<double> angle_sum_;
  std::vector<char> boundary_vertex_;
  double bbox_diagonal_ = 0.0;
  double mean_edge_length_ = 0.0;
  std::uint64_t checksum_ = 0;
};

namespace detail {

inline std::uint64_t fnv1a(const void* data, std::size_t bytes,
                           std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

inline void Mesh::build() {
  const int nv = vertex_count();
  const int nf = face_count();
  if (nv == 0 || nf == 0) throw TopologyError("mesh has no vertices or faces");

  for (const auto& p : vertices_) {
    if (!p.allFinite()) throw ParseError("non-finite vertex coordinate");
  }

  halfedges_.assign(3 * nf, {});
  vertex_halfedge_.assign(nv, -1);
  std::unordered_map<std::uint64_t, int> directed;  // origin*nv+dest -> h
  directed.reserve(3 * nf);

  for (int f = 0; f < nf; ++f) {
    const auto& fv = faces_[f];
    for (int k = 0; k < 3; ++k) {
      if (fv[k] < 0 || fv[k] >= nv)
        throw TopologyError("face " + std::to_string(f) +
                            " references vertex " + std::to_string(fv[k]));
    }
    if (fv[0] == fv[1] || fv[1] == fv[2] || fv[0] == fv[2])
      throw TopologyError("face " + std::to_string(f) +
                          " has repeated vertices");
    const Vec3 ab = vertices_[fv[1]] - vertices_[fv[0]];
    const Vec3 ac = vertices_[fv[2]] - vertices_[fv[0]];
    const double area2 = ab.cross(ac).norm();
    if (!(area2 > 1e-12 * ab.norm() * ac.norm()))
      throw TopologyError("face " + std::to_string(f) + " is degenerate");

    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      const int a = fv[k];
      const int b = fv[(k + 1) % 3];
      halfedges_[h].origin = a;
      auto key = static_cast<std::uint64_t>(a) * nv + b;
      if (!directed.emplace(key, h).second)
        throw TopologyError("directed edge " + std::to_string(a) + "->" +
                            std::to_string(b) +
                            " appears twice (non-manifold or flipped face)");
      if (vertex_halfedge_[a] < 0) vertex_halfedge_[a] = h;
    }
  }

  // Twin pairing and undirected edge ids.
  for (int h = 0; h < 3 * nf; ++h) {
    if (halfedges_[h].edge >= 0) continue;
    const int a = origin(h), b = dest(h);
    auto it = directed.find(static_cast<std::uint64_t>(b) * nv + a);
    const int e = static_cast<int>(edge_halfedge_.size());
    edge_halfedge_.push_back(h);
    halfedges_[h].edge = e;
    if (it != directed.end()) {
      halfedges_[h].twin = it->second;
      halfedges_[it->second].twin = h;
      halfedges_[it->second].edge = e;
    }
  }

  edge_length_.resize(edge_count());
  double edge_total = 0.0;
  for (int e = 0; e < edge_count(); ++e) {
    auto [a, b] = edge_vertices(e);
    edge_length_[e] = (vertices_[a] - vertices_[b]).norm();
    if (!(edge_length_[e] > 0.0))
      throw TopologyError("edge " + std::to_string(a) + "-" +
                          std::to_string(b) + " has zero length");
    edge_total += edge_length_[e];
  }
  mean_edge_length_ = edge_total / edge_count();

  // A non-manifold "bowtie" vertex (two fans sharing one vertex) would make
  // fan walks silently miss faces; detect by counting incident faces per
  // vertex vs. faces reachable by rotation. First place the stored outgoing
  // halfedge at the boundary start of the fan, if any.
  std::vector<int> incident(nv, 0);
  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 3; ++k) ++incident[faces_[f][k]];
  boundary_vertex_.assign(nv, 0);
  for (int h = 0; h < 3 * nf; ++h) {
    if (halfedges_[h].twin < 0) {
      // rotate() crosses the incoming edge of each corner, so a fan walk
      // covers a boundary disk only when started at the outgoing halfedge
      // whose own edge is boundary.
      boundary_vertex_[origin(h)] = 1;
      boundary_vertex_[dest(h)] = 1;
      vertex_halfedge_[origin(h)] = h;
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (vertex_halfedge_[v] < 0)
      throw TopologyError("vertex " + std::to_string(v) +
                          " has no incident face");
    int reached = 0;
    int h = vertex_halfedge_[v];
    do {
      ++reached;
      h = rotate(h);
    } while (h >= 0 && h != vertex_halfedge_[v] && reached <= incident[v]);
    if (reached != incident[v])
      throw TopologyError("vertex " + std::to_string(v) +
                          " is non-manifold (split fan)");
  }

  // Edge connectivity: every vertex reachable from vertex 0.
  {
    std::vector<char> seen(nv, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      int h = vertex_halfedge_[v];
      // Walk the full fan; for boundary fans also step over the last face.
      int steps = 0;
      while (h >= 0 && steps <= incident[v]) {
        int u = dest(h);
        if (!seen[u]) {
          seen[u] = 1;
          ++count;
          stack.push_back(u);
        }
        // Also the far vertex of this face, so boundary fans cover both rim
        // neighbours even though only outgoing halfedges are walked.
        int w = dest(next(h));
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
        h = rotate(h);
        ++steps;
        if (h == vertex_halfedge_[v]) break;
      }
    }
    if (count != nv) throw TopologyError("mesh is not edge-connected");
  }

  // Corner angles (law of cosines, clamped) and per-vertex angle sums.
  corner_angle_.resize(3 * nf);
  angle_sum_.assign(nv, 0.0);
  for (int h = 0; h < 3 * nf; ++h) {
    const double a = halfedge_length(h);        // edges adjacent to corner
    const double b = halfedge_length(prev(h));  //
    const double c = halfedge_length(next(h));  // opposite
    double cosv = (a * a + b * b - c * c) / (2.0 * a * b);
    cosv = std::clamp(cosv, -1.0, 1.0);
    corner_angle_[h] = std::acos(cosv);
    angle_sum_[origin(h)] += corner_angle_[h];
  }

  Vec3 lo = vertices_[0], hi = vertices_[0];
  for (const auto& p : vertices_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bbox_diagonal_ = (hi - lo).norm();

  std::uint64_t h64 = 0xcbf29ce484222325ull;
  std::uint64_t counts[2] = {static_cast<std::uint64_t>(nv),
                             static_cast<std::uint64_t>(nf)};
  h64 = detail::fnv1a(counts, sizeof(counts), h64);
  for (const auto& p : vertices_) {
    double xyz[3] = {p.x(), p.y(), p.z()};
    h64 = detail::fnv1a(xyz, sizeof(xyz), h64);
  }
  for (const auto& f : faces_) {
    std::uint32_t idx[3] = {static_cast<std::uint32_t>(f[0]),
                            static_cast<std::uint32_t>(f[1]),
                            static_cast<std::uint32_t>(f[2])};
    h64 = detail::fnv1a(idx, sizeof(idx), h64);
  }
  checksum_ = h64;
}

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
  }
  return false;
}

inline Mesh load_off(std::istream& in, const std::string& name) {
  std::string line;
  if (!next_content_line(in, line)) throw ParseError(name + ": empty file");
  {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag != "OFF")
      throw ParseError(name + ": expected OFF header, got '" + tag + "'");
    // Counts may share the header line.
    long a, b, c;
    if (ls >> a >> b >> c) {
      line = std::to_string(a) + " " + std::to_string(b) + " " +
             std::to_string(c);
    } else if (!next_content_line(in, line)) {
      throw ParseError(name + ": missing element counts");
    }
  }
  long nv = 0, nf = 0, ne = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> nv >> nf >> ne) || nv < 0 || nf < 0)
      throw ParseError(name + ": bad element counts '" + line + "'");
  }
  std::vector<Vec3> vertices;
  vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_content_line(in, line))
      throw ParseError(name + ": truncated vertex list at " +
                       std::to_string(i));
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z))
      throw ParseError(name + ": bad vertex line '" + line + "'");
    vertices.emplace_back(x, y, z);
  }
  std::vector<std::array<int, 3>> faces;
  faces.reserve(nf);
  for (long i = 0; i < nf; ++i) {
    if (!next_content_line(in, line))
      throw ParseError(name + ": truncated face list at " + std::to_string(i));
    std::istringstream ls(line);
    long cnt;
    if (!(ls >> cnt)) throw ParseError(name + ": bad face line '" + line + "'");
    if (cnt != 3)
      throw TopologyError(name + ": face " + std::to_string(i) + " has " +
                          std::to_string(cnt) + " vertices, need 3");
    long a, b, c;
    if (!(ls >> a >> b >> c))
      throw ParseError(name + ": bad face line '" + line + "'");
    faces.push_back({static_cast<int>(a), static_cast<int>(b),
                     static_cast<int>(c)});
  }
  return Mesh::from_data(std::move(vertices), std::move(faces));
}

inline int obj_index(const std::string& tok, long nv, const std::string& name) {
  // "7", "7/1", "7//3", "7/1/3"; negative indices count from the end.
  std::size_t slash = tok.find('/');
  std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
  char* end = nullptr;
  long idx = std::strtol(head.c_str(), &end, 10);
  if (end == head.c_str() || idx == 0)
    throw ParseError(name + ": bad face index '" + tok + "'");
  long zero_based = idx > 0 ? idx - 1 : nv + idx;
  if (zero_based < 0 || zero_based >= nv)
    throw ParseError(name + ": face index out of range '" + tok + "'");
  return static_cast<int>(zero_based);
}

inline Mesh load_obj(std::istream& in, const std::string& name) {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  while (next_content_line(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z))
        throw ParseError(name + ": bad vertex line '" + line + "'");
      vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (toks.size() != 3)
        throw TopologyError(name + ": face with " +
                            std::to_string(toks.size()) +
                            " vertices, need 3");
      long nv = static_cast<long>(vertices.size());
      faces.push_back({obj_index(toks[0], nv, name),
                       obj_index(toks[1], nv, name),
                       obj_index(toks[2], nv, name)});
    }
    // vn/vt/usemtl/... ignored
  }
  if (vertices.empty()) throw ParseError(name + ": no vertices");
  return Mesh::from_data(std::move(vertices), std::move(faces));
}

}  // namespace detail

inline Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return detail::load_off(in, path.filename().string());
  if (ext == ".obj") return detail::load_obj(in, path.filename().string());
  throw ParseError("unsupported mesh format '" + ext + "' (want .off/.obj)");
}

inline double vertex_angle_sum(const Mesh& mesh, int v) {
  return mesh.angle_sum(v);
}

// A vertex is a saddle when its total incident angle exceeds 2*pi, i.e. the
// surface is locally hyperbolic and shortest paths can bend through it.
inline constexpr double kSaddleAngleTolerance = 1e-9;

struct VertexClassification {
  std::vector<int> saddles;      // ascending mesh indices
  std::vector<int> non_saddles;  // ascending mesh indices
  std::vector<int> saddle_rank;  // vertex -> row in saddle matrices, or -1

  bool is_saddle(int v) const { return saddle_rank[v] >= 0; }
  int saddle_count() const { return static_cast<int>(saddles.size()); }
};

inline VertexClassification classify_vertices(const Mesh& mesh) {
  VertexClassification out;
  const int n = mesh.vertex_count();
  out.saddle_rank.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (mesh.angle_sum(v) > 2.0 * std::numbers::pi + kSaddleAngleTolerance) {
      out.saddle_rank[v] = static_cast<int>(out.saddles.size());
      out.saddles.push_back(v);
    } else {
      out.non_saddles.push_back(v);
    }
  }
  return out;
}

}  // namespace geodex
