#pragma once

// Versioned binary artifact holding one precomputation: classification,
// graph, embedding, and the solver settings that produced them. The mesh
// itself is not stored; a checksum over its vertices and faces binds the
// file to the right surface. Layout is explicit little-endian bytes so
// the format stays portable and diffable:
//
//   "GEPC"  u32 version  u64 mesh_checksum
//   u32 n   u32 saddle_count  u32 m  u32 l  u32 K  u32 K_S
//   u64 edge_slots  u64 weight_cap_events
//   cascade options   u32 max_iter u32 memory f64 gtol f64 rtol u64 seed
//   stress options    (same shape)
//   classification bitmap, ceil(n/8) bytes, bit v set = saddle
//   saddle list       saddle_count x u32, ascending
//   objective history (l+1) x f64, non-increasing
//   epsilon history   (l+1) x f64
//   euclidean         saddle_count*m x f64, row-major
//   s_block, t_block  saddle_count*l x f64 each, row-major
//   csr offsets       (n+1) x u64
//   csr neighbors     edge_slots x u32, sorted per row
//   csr weights       edge_slots x f64

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodex/embedding.hpp"
#include "geodex/mesh.hpp"
#include "geodex/query.hpp"
#include "geodex/svg.hpp"

namespace geodex {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  std::uint64_t offset;
  FormatError(const std::string& what, std::uint64_t at)
      : std::runtime_error(what + " (at byte " + std::to_string(at) + ")"),
        offset(at) {}
};

constexpr char kPrecompMagic[4] = {'G', 'E', 'P', 'C'};
constexpr std::uint32_t kPrecompVersion = 1;

struct PrecomputeMetadata {
  SvgParams svg_params;
  SolverOptions cascade_options;
  SolverOptions stress_options;
};

struct Precomputation {
  VertexClassification classification;
  Svg svg;
  Embedding embedding;
  PrecomputeMetadata metadata;

  // The caller keeps mesh and this object alive for the context lifetime.
  QueryContext make_context(const Mesh& mesh) const {
    return QueryContext(mesh, svg, embedding, classification);
  }
};

struct PrecomputationHeader {
  std::uint32_t version = 0;
  std::uint64_t mesh_checksum = 0;
  std::uint32_t vertex_count = 0;
  std::uint32_t saddle_count = 0;
  std::uint32_t dim_euclidean = 0;
  std::uint32_t rounds = 0;
  std::uint32_t neighbor_cap = 0;
  std::uint32_t saddle_neighbor_cap = 0;
  std::uint64_t edge_slots = 0;
};

// FNV-1a over the little-endian bytes of every coordinate and face index.
inline std::uint64_t mesh_checksum(const Mesh& mesh) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](std::uint64_t value, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      h ^= (value >> (8 * i)) & 0xffu;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(mesh.vertex_count()), 8);
  mix(static_cast<std::uint64_t>(mesh.face_count()), 8);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3& p = mesh.position(v);
    for (int c = 0; c < 3; ++c) {
      std::uint64_t bits;
      const double x = p[c];
      std::memcpy(&bits, &x, 8);
      mix(bits, 8);
    }
  }
  for (const auto& f : mesh.faces())
    for (int k = 0; k < 3; ++k) mix(static_cast<std::uint64_t>(f[k]), 4);
  return h;
}

namespace detail {

inline void put_bytes(std::string& b, std::uint64_t v, int n) {
  for (int i = 0; i < n; ++i)
    b.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}
inline void put_u32(std::string& b, std::uint32_t v) { put_bytes(b, v, 4); }
inline void put_u64(std::string& b, std::uint64_t v) { put_bytes(b, v, 8); }
inline void put_f64(std::string& b, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_bytes(b, bits, 8);
}

struct Cursor {
  const unsigned char* data;
  std::uint64_t size;
  std::uint64_t pos = 0;

  void need(std::uint64_t n, const char* what) {
    if (pos + n > size) throw FormatError(std::string("truncated ") + what, pos);
  }
  std::uint64_t take(int n, const char* what) {
    need(n, what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
    pos += n;
    return v;
  }
  std::uint32_t u32(const char* what) {
    return static_cast<std::uint32_t>(take(4, what));
  }
  std::uint64_t u64(const char* what) { return take(8, what); }
  double f64(const char* what) {
    const std::uint64_t bits = take(8, what);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
};

inline void put_options(std::string& b, const SolverOptions& o) {
  put_u32(b, static_cast<std::uint32_t>(o.max_iterations));
  put_u32(b, static_cast<std::uint32_t>(o.memory));
  put_f64(b, o.gradient_tolerance);
  put_f64(b, o.relative_objective_tolerance);
  put_u64(b, o.seed);
}

inline SolverOptions get_options(Cursor& c, const char* what) {
  SolverOptions o;
  o.max_iterations = static_cast<int>(c.u32(what));
  o.memory = static_cast<int>(c.u32(what));
  o.gradient_tolerance = c.f64(what);
  o.relative_objective_tolerance = c.f64(what);
  o.seed = c.u64(what);
  return o;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on " + path);
  return bytes;
}

}  // namespace detail

inline void save_precomputation(const std::string& path, const Mesh& mesh,
                                const Precomputation& pre) {
  // QueryContext construction performs the full cross-consistency check.
  (void)pre.make_context(mesh);
  const int n = mesh.vertex_count();
  const int sc = pre.classification.saddle_count();
  const int m = pre.embedding.dim_euclidean;
  const int l = pre.embedding.rounds;
  if (pre.embedding.objective_history.size() !=
          static_cast<size_t>(l + 1) ||
      pre.embedding.epsilon_history.size() != static_cast<size_t>(l + 1))
    throw std::invalid_argument("history lengths do not match round count");

  std::string b;
  b.reserve(128 + static_cast<size_t>(n) / 8 +
            8ull * sc * (m + 2 * l) + 12ull * pre.svg.edge_slots());
  b.append(kPrecompMagic, 4);
  detail::put_u32(b, kPrecompVersion);
  detail::put_u64(b, mesh_checksum(mesh));
  detail::put_u32(b, static_cast<std::uint32_t>(n));
  detail::put_u32(b, static_cast<std::uint32_t>(sc));
  detail::put_u32(b, static_cast<std::uint32_t>(m));
  detail::put_u32(b, static_cast<std::uint32_t>(l));
  detail::put_u32(b,
                  static_cast<std::uint32_t>(pre.metadata.svg_params.neighbor_cap));
  detail::put_u32(b, static_cast<std::uint32_t>(
                         pre.metadata.svg_params.saddle_neighbor_cap));
  detail::put_u64(b, static_cast<std::uint64_t>(pre.svg.edge_slots()));
  detail::put_u64(b,
                  static_cast<std::uint64_t>(pre.embedding.weight_cap_events));
  detail::put_options(b, pre.metadata.cascade_options);
  detail::put_options(b, pre.metadata.stress_options);

  std::string bitmap(static_cast<size_t>((n + 7) / 8), '\0');
  for (int v : pre.classification.saddles)
    bitmap[static_cast<size_t>(v) / 8] |= static_cast<char>(1 << (v % 8));
  b += bitmap;
  for (int v : pre.classification.saddles)
    detail::put_u32(b, static_cast<std::uint32_t>(v));
  for (double h : pre.embedding.objective_history) detail::put_f64(b, h);
  for (double h : pre.embedding.epsilon_history) detail::put_f64(b, h);
  for (int r = 0; r < sc; ++r)
    for (int c = 0; c < m; ++c) detail::put_f64(b, pre.embedding.euclidean(r, c));
  for (int r = 0; r < sc; ++r)
    for (int c = 0; c < l; ++c) detail::put_f64(b, pre.embedding.s_block(r, c));
  for (int r = 0; r < sc; ++r)
    for (int c = 0; c < l; ++c) detail::put_f64(b, pre.embedding.t_block(r, c));
  for (auto off : pre.svg.offsets)
    detail::put_u64(b, static_cast<std::uint64_t>(off));
  for (int nb : pre.svg.neighbors)
    detail::put_u32(b, static_cast<std::uint32_t>(nb));
  for (double w : pre.svg.weights) detail::put_f64(b, w);

  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed on " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("rename to " + path + " failed");
  }
}

// Header only; enough for an `info` listing without touching the payload.
inline PrecomputationHeader read_precomputation_header(
    const std::string& path) {
  const std::string bytes = detail::read_file(path);
  detail::Cursor c{reinterpret_cast<const unsigned char*>(bytes.data()),
                   bytes.size()};
  c.need(4, "magic");
  if (std::memcmp(bytes.data(), kPrecompMagic, 4) != 0)
    throw FormatError("bad magic", 0);
  c.pos = 4;
  PrecomputationHeader h;
  h.version = c.u32("version");
  if (h.version != kPrecompVersion)
    throw FormatError("unsupported version " + std::to_string(h.version), 4);
  h.mesh_checksum = c.u64("checksum");
  h.vertex_count = c.u32("vertex count");
  h.saddle_count = c.u32("saddle count");
  h.dim_euclidean = c.u32("dim");
  h.rounds = c.u32("rounds");
  h.neighbor_cap = c.u32("neighbor cap");
  h.saddle_neighbor_cap = c.u32("saddle cap");
  h.edge_slots = c.u64("edge slots");
  return h;
}

inline Precomputation load_precomputation(const std::string& path,
                                          const Mesh& mesh) {
  const std::string bytes = detail::read_file(path);
  detail::Cursor c{reinterpret_cast<const unsigned char*>(bytes.data()),
                   bytes.size()};
  c.need(4, "magic");
  if (std::memcmp(bytes.data(), kPrecompMagic, 4) != 0)
    throw FormatError("bad magic", 0);
  c.pos = 4;
  const std::uint32_t version = c.u32("version");
  if (version != kPrecompVersion)
    throw FormatError("unsupported version " + std::to_string(version), 4);
  const std::uint64_t checksum = c.u64("checksum");
  if (checksum != mesh_checksum(mesh))
    throw FormatError("checksum does not match the supplied mesh", 8);

  const auto n = static_cast<int>(c.u32("vertex count"));
  if (n != mesh.vertex_count())
    throw FormatError("vertex count does not match the supplied mesh", 16);
  const std::uint32_t sc_u = c.u32("saddle count");
  const std::uint32_t m_u = c.u32("dim");
  const std::uint32_t l_u = c.u32("rounds");
  if (sc_u > static_cast<std::uint32_t>(n) || m_u > 1000000 ||
      l_u > 1000000)
    throw FormatError("implausible counts", 20);
  const auto sc = static_cast<int>(sc_u);
  const auto m = static_cast<int>(m_u);
  const auto l = static_cast<int>(l_u);

  Precomputation pre;
  pre.metadata.svg_params.neighbor_cap =
      static_cast<int>(c.u32("neighbor cap"));
  pre.metadata.svg_params.saddle_neighbor_cap =
      static_cast<int>(c.u32("saddle cap"));
  const std::uint64_t nnz = c.u64("edge slots");
  pre.embedding.weight_cap_events =
      static_cast<long long>(c.u64("cap events"));
  pre.metadata.cascade_options = detail::get_options(c, "cascade options");
  pre.metadata.stress_options = detail::get_options(c, "stress options");

  // One exact size gate before any payload allocation: the section sizes
  // are fully determined by the counts, so the whole file length must
  // match. Wide arithmetic keeps hostile counts from overflowing.
  {
    using wide = unsigned __int128;
    const wide expect = wide(120) + wide((n + 7) / 8) + wide(4) * sc_u +
                        wide(16) * (wide(l_u) + 1) +
                        wide(8) * sc_u * (wide(m_u) + 2 * wide(l_u)) +
                        wide(8) * (wide(n) + 1) + wide(12) * nnz;
    if (expect != wide(c.size))
      throw FormatError("file size does not match header counts", c.pos);
  }

  const auto bitmap_bytes = static_cast<std::uint64_t>((n + 7) / 8);
  c.need(bitmap_bytes, "classification bitmap");
  const unsigned char* bitmap = c.data + c.pos;
  c.pos += bitmap_bytes;
  auto bit = [bitmap](int v) {
    return (bitmap[v / 8] >> (v % 8)) & 1;
  };

  auto& cls = pre.classification;
  cls.saddle_rank.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (bit(v)) {
      cls.saddle_rank[v] = static_cast<int>(cls.saddles.size());
      cls.saddles.push_back(v);
    } else {
      cls.non_saddles.push_back(v);
    }
  }
  if (cls.saddle_count() != sc)
    throw FormatError("bitmap disagrees with saddle count", c.pos);
  for (int i = 0; i < sc; ++i) {
    const auto v = static_cast<int>(c.u32("saddle list"));
    if (v != cls.saddles[i])
      throw FormatError("saddle list disagrees with bitmap", c.pos - 4);
  }

  auto& emb = pre.embedding;
  emb.dim_euclidean = m;
  emb.rounds = l;
  emb.saddle_vertices = cls.saddles;
  emb.row_of_vertex = cls.saddle_rank;
  emb.objective_history.resize(l + 1);
  for (int p = 0; p <= l; ++p)
    emb.objective_history[p] = c.f64("objective history");
  for (int p = 1; p <= l; ++p)
    if (!(emb.objective_history[p] <= emb.objective_history[p - 1]))
      throw FormatError("objective history is not non-increasing",
                        c.pos - 8ull * (l + 1 - p));
  emb.epsilon_history.resize(l + 1);
  for (int p = 0; p <= l; ++p)
    emb.epsilon_history[p] = c.f64("epsilon history");
  emb.euclidean.resize(sc, m);
  for (int r = 0; r < sc; ++r)
    for (int col = 0; col < m; ++col)
      emb.euclidean(r, col) = c.f64("euclidean block");
  emb.s_block.resize(sc, l);
  for (int r = 0; r < sc; ++r)
    for (int col = 0; col < l; ++col) emb.s_block(r, col) = c.f64("s block");
  emb.t_block.resize(sc, l);
  for (int r = 0; r < sc; ++r)
    for (int col = 0; col < l; ++col) emb.t_block(r, col) = c.f64("t block");

  auto& g = pre.svg;
  g.offsets.resize(n + 1);
  for (int v = 0; v <= n; ++v) {
    g.offsets[v] = static_cast<std::int64_t>(c.u64("csr offsets"));
    if (v > 0 && g.offsets[v] < g.offsets[v - 1])
      throw FormatError("csr offsets not monotone", c.pos - 8);
  }
  if (g.offsets.front() != 0 ||
      g.offsets.back() != static_cast<std::int64_t>(nnz))
    throw FormatError("csr offsets disagree with edge slots", c.pos - 8);
  g.neighbors.resize(nnz);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    const auto nb = static_cast<int>(c.u32("csr neighbors"));
    if (nb < 0 || nb >= n)
      throw FormatError("neighbor index out of range", c.pos - 4);
    g.neighbors[k] = nb;
  }
  for (int v = 0; v < n; ++v)
    for (auto k = g.offsets[v] + 1; k < g.offsets[v + 1]; ++k)
      if (g.neighbors[k - 1] >= g.neighbors[k])
        throw FormatError("neighbor row not sorted", c.pos);
  g.weights.resize(nnz);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    g.weights[k] = c.f64("csr weights");
    if (!(std::isfinite(g.weights[k]) && g.weights[k] > 0.0))
      throw FormatError("non-positive edge weight", c.pos - 8);
  }
  g.saddle.assign(n, 0);
  for (int v : cls.saddles) g.saddle[v] = 1;

  if (c.pos != c.size) throw FormatError("trailing data", c.pos);

  // Final cross-consistency gate, same as at save time.
  (void)pre.make_context(mesh);
  return pre;
}

// Human-readable summary; intentionally lossy.
inline std::string precomputation_debug_json(const Precomputation& pre) {
  nlohmann::json j;
  j["saddle_count"] = pre.classification.saddle_count();
  j["vertex_count"] = pre.classification.saddle_rank.size();
  j["dim_euclidean"] = pre.embedding.dim_euclidean;
  j["rounds"] = pre.embedding.rounds;
  j["edge_slots"] = pre.svg.edge_slots();
  j["neighbor_cap"] = pre.metadata.svg_params.neighbor_cap;
  j["saddle_neighbor_cap"] = pre.metadata.svg_params.saddle_neighbor_cap;
  j["weight_cap_events"] = pre.embedding.weight_cap_events;
  j["objective_history"] = pre.embedding.objective_history;
  j["epsilon_history"] = pre.embedding.epsilon_history;
  j["cascade_seed"] = pre.metadata.cascade_options.seed;
  j["stress_seed"] = pre.metadata.stress_options.seed;
  return j.dump(2);
}

}  // namespace geodex
