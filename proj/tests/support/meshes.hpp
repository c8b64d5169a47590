#pragma once

// Procedural meshes for tests: exact platonic solids, flat/folded vertex
// fans with known angle sums, and spheres/tori large enough to exercise the
// full pipeline. Everything is deterministic.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "geodex/mesh.hpp"

namespace testmesh {

using geodex::Mesh;
using geodex::Vec3;

inline Mesh unit_cube() {
  std::vector<Vec3> v = {
      {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
      {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
  };
  // Two triangles per face, outward orientation.
  std::vector<std::array<int, 3>> f = {
      {0, 2, 1}, {0, 3, 2},  // z=0
      {4, 5, 6}, {4, 6, 7},  // z=1
      {0, 1, 5}, {0, 5, 4},  // y=0
      {2, 3, 7}, {2, 7, 6},  // y=1
      {1, 2, 6}, {1, 6, 5},  // x=1
      {3, 0, 4}, {3, 4, 7},  // x=0
  };
  return Mesh::from_data(std::move(v), std::move(f));
}

inline Mesh icosahedron() {
  const double p = std::numbers::phi;
  std::vector<Vec3> v = {
      {-1, p, 0}, {1, p, 0},   {-1, -p, 0}, {1, -p, 0},
      {0, -1, p}, {0, 1, p},   {0, -1, -p}, {0, 1, -p},
      {p, 0, -1}, {p, 0, 1},   {-p, 0, -1}, {-p, 0, 1},
  };
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  return Mesh::from_data(std::move(v), std::move(f));
}

// Closed fan of `spokes` unit equilateral triangles around a hub. With six
// spokes the hub is flat (angle sum exactly 2*pi). With more, the ring
// zigzags in z so every triangle stays unit equilateral and the hub carries
// spokes*pi/3 of angle: a saddle.
inline Mesh equilateral_fan(int spokes) {
  const double step = 2.0 * std::numbers::pi / spokes;
  double h2 = 0.0;
  if (spokes != 6) {
    const double s = std::sin(step / 2.0);
    h2 = (1.0 - 4.0 * s * s) / (4.0 * (1.0 - s * s));
    if (h2 < 0.0) throw std::invalid_argument("fan cannot fold, too few spokes");
  }
  const double h = std::sqrt(h2);
  const double rho = std::sqrt(1.0 - h2);
  std::vector<Vec3> v;
  v.emplace_back(0, 0, 0);
  for (int k = 0; k < spokes; ++k) {
    v.emplace_back(rho * std::cos(k * step), rho * std::sin(k * step),
                   (k % 2 == 0) ? h : -h);
  }
  std::vector<std::array<int, 3>> f;
  for (int k = 0; k < spokes; ++k)
    f.push_back({0, 1 + k, 1 + (k + 1) % spokes});
  return Mesh::from_data(std::move(v), std::move(f));
}

// Flat rows x cols grid in the z=0 plane, unit spacing, split diagonals.
inline Mesh planar_grid(int rows, int cols) {
  std::vector<Vec3> v;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) v.emplace_back(c, r, 0.0);
  auto id = [cols](int r, int c) { return r * cols + c; };
  std::vector<std::array<int, 3>> f;
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      f.push_back({id(r, c), id(r, c + 1), id(r + 1, c + 1)});
      f.push_back({id(r, c), id(r + 1, c + 1), id(r + 1, c)});
    }
  }
  return Mesh::from_data(std::move(v), std::move(f));
}

// Geodesic sphere: icosahedron with each face split into freq^2 triangles,
// lattice points projected to the unit sphere. V = 10*freq^2 + 2.
inline Mesh icosphere(int freq) {
  Mesh ico = icosahedron();
  std::vector<Vec3> pts;
  for (int i = 0; i < ico.vertex_count(); ++i)
    pts.push_back(ico.position(i).normalized());
  const int nu = freq;

  std::map<std::array<int, 3>, int> edge_pts;  // (a, b, k) with a < b
  auto edge_point = [&](int a, int b, int k) {
    if (a > b) {
      std::swap(a, b);
      k = nu - k;
    }
    auto it = edge_pts.find({a, b, k});
    if (it != edge_pts.end()) return it->second;
    double t = double(k) / nu;
    Vec3 p = ((1.0 - t) * pts[a] + t * pts[b]).normalized();
    int id = static_cast<int>(pts.size());
    pts.push_back(p);
    edge_pts.emplace(std::array<int, 3>{a, b, k}, id);
    return id;
  };

  std::vector<std::array<int, 3>> faces;
  for (int fi = 0; fi < ico.face_count(); ++fi) {
    auto [A, B, C] = ico.face(fi);
    // lattice(i, j): i rows from A toward BC, j steps from the AB side.
    std::vector<int> lattice((nu + 1) * (nu + 2) / 2);
    auto at = [&](int i, int j) -> int& {
      return lattice[i * (i + 1) / 2 + j];
    };
    for (int i = 0; i <= nu; ++i) {
      for (int j = 0; j <= i; ++j) {
        int id;
        if (i == 0) {
          id = A;
        } else if (i == nu && j == 0) {
          id = B;
        } else if (i == nu && j == nu) {
          id = C;
        } else if (j == 0) {
          id = edge_point(A, B, i);
        } else if (j == i) {
          id = edge_point(A, C, i);
        } else if (i == nu) {
          id = edge_point(B, C, j);
        } else {
          Vec3 p = (double(nu - i) * pts[A] + double(i - j) * pts[B] +
                    double(j) * pts[C])
                       .normalized();
          id = static_cast<int>(pts.size());
          pts.push_back(p);
        }
        at(i, j) = id;
      }
    }
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j <= i; ++j) {
        faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
        if (j < i)
          faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
      }
    }
  }
  return Mesh::from_data(std::move(pts), std::move(faces));
}

// Unit sphere with radial ripples. Amplitude drives how many vertices end
// up hyperbolic: at freq >= 8 and wave_scale 1, 0.15 gives ~7% saddles,
// 0.3 roughly 27%, saturating near 36% by 0.5. wave_scale multiplies the
// spatial frequency of the ripples: larger values trade a few big lobes
// for many small dents spread evenly over the surface, which shortens
// lines of sight the way creased scanned models do.
inline Mesh bumpy_sphere(int freq, double amplitude, std::uint64_t seed = 42,
                         double wave_scale = 1.0) {
  Mesh sphere = icosphere(freq);
  std::mt19937_64 rng(seed);
  auto unif = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  struct Wave {
    Vec3 dir;
    double freq, phase, scale;
  };
  std::vector<Wave> waves;
  for (int k = 0; k < 6; ++k) {
    Vec3 d(unif() * 2 - 1, unif() * 2 - 1, unif() * 2 - 1);
    while (d.norm() < 1e-3) d = Vec3(unif() * 2 - 1, unif() * 2 - 1, unif() * 2 - 1);
    waves.push_back({d.normalized(), wave_scale * (3.0 + 4.0 * unif()),
                     2 * std::numbers::pi * unif(), 1.0 / (1.0 + k)});
  }
  std::vector<Vec3> v(sphere.vertex_count());
  std::vector<double> g(sphere.vertex_count());
  double gmax = 0.0;
  for (int i = 0; i < sphere.vertex_count(); ++i) {
    const Vec3& p = sphere.position(i);
    double s = 0.0;
    for (const auto& w : waves)
      s += w.scale * std::sin(w.freq * p.dot(w.dir) + w.phase);
    g[i] = s;
    gmax = std::max(gmax, std::abs(s));
  }
  for (int i = 0; i < sphere.vertex_count(); ++i)
    v[i] = sphere.position(i) * (1.0 + amplitude * g[i] / gmax);
  std::vector<std::array<int, 3>> f(sphere.faces());
  return Mesh::from_data(std::move(v), std::move(f));
}

// Unit sphere with shallow pits punched at a spherical Fibonacci lattice.
// Each pit rim turns into a ring of hyperbolic vertices, so the saddles
// are few but spread evenly: every vertex has one a couple of edge rings
// away. That is the coverage profile large query benchmarks want, at a
// saddle count (roughly 6 per dent) that keeps ground truth affordable.
inline Mesh dented_sphere(int freq, int dents, double depth = 0.05) {
  Mesh sphere = icosphere(freq);
  std::vector<Vec3> v(sphere.vertex_count());
  for (int i = 0; i < sphere.vertex_count(); ++i) v[i] = sphere.position(i);

  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<char> dented(v.size(), 0);
  for (int k = 0; k < dents; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / dents;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * std::numbers::pi * k / golden;
    const Vec3 dir(r * std::cos(phi), r * std::sin(phi), z);
    int best = 0;
    double best_dot = -2.0;
    for (int i = 0; i < sphere.vertex_count(); ++i) {
      const double d = sphere.position(i).normalized().dot(dir);
      if (d > best_dot) {
        best_dot = d;
        best = i;
      }
    }
    if (!dented[best]) {
      dented[best] = 1;
      v[best] *= 1.0 - depth;
    }
  }
  std::vector<std::array<int, 3>> f(sphere.faces());
  return Mesh::from_data(std::move(v), std::move(f));
}

inline Mesh torus(int major_steps, int minor_steps, double major_radius = 2.0,
                  double minor_radius = 0.8) {
  std::vector<Vec3> v;
  for (int i = 0; i < major_steps; ++i) {
    double th = 2 * std::numbers::pi * i / major_steps;
    for (int j = 0; j < minor_steps; ++j) {
      double ph = 2 * std::numbers::pi * j / minor_steps;
      double w = major_radius + minor_radius * std::cos(ph);
      v.emplace_back(w * std::cos(th), w * std::sin(th),
                     minor_radius * std::sin(ph));
    }
  }
  auto id = [=](int i, int j) {
    return (i % major_steps) * minor_steps + (j % minor_steps);
  };
  std::vector<std::array<int, 3>> f;
  for (int i = 0; i < major_steps; ++i) {
    for (int j = 0; j < minor_steps; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh::from_data(std::move(v), std::move(f));
}

}  // namespace testmesh
