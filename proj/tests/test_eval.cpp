#include "geodex/eval.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>

#include "geodex/embedding.hpp"
#include "geodex/svg.hpp"
#include "support/meshes.hpp"

using namespace geodex;

namespace {

Mesh triangle() {
  return Mesh::from_data({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)},
                         {{0, 1, 2}});
}

struct Pipeline {
  Mesh mesh = testmesh::torus(12, 8);
  VertexClassification cls;
  Svg svg;
  Embedding emb;

  Pipeline() {
    cls = classify_vertices(mesh);
    SvgParams p;
    p.neighbor_cap = 12;
    p.saddle_neighbor_cap = 6;
    svg = build_svg(mesh, cls, p);
    SolverOptions opts;
    opts.seed = 9;
    SolverOptions sopts = SolverOptions::stress_defaults();
    sopts.seed = 9;
    emb = geodesic_embedding(mesh, cls, 6, 8, opts, sopts);
  }
};

}  // namespace

TEST_CASE("pair sampling is deterministic and duplicate-free", "[eval]") {
  Mesh m = testmesh::torus(8, 5);
  auto a = sample_pairs(m, 200, 77);
  auto b = sample_pairs(m, 200, 77);
  REQUIRE(a.pairs == b.pairs);
  REQUIRE(a.seed == 77);

  auto c = sample_pairs(m, 200, 78);
  REQUIRE(a.pairs != c.pairs);

  std::set<std::pair<int, int>> seen(a.pairs.begin(), a.pairs.end());
  REQUIRE(seen.size() == a.pairs.size());
  for (const auto& [u, v] : a.pairs) {
    REQUIRE(u != v);
    REQUIRE(u >= 0);
    REQUIRE(v < m.vertex_count());
  }
}

TEST_CASE("pair sampling exhausts and rejects correctly", "[eval]") {
  Mesh tri = triangle();
  auto all = sample_pairs(tri, 6, 3);  // every ordered pair of 3 vertices
  std::set<std::pair<int, int>> seen(all.pairs.begin(), all.pairs.end());
  REQUIRE(seen.size() == 6);
  REQUIRE_THROWS_AS(sample_pairs(tri, 7, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(sample_pairs(tri, 0, 3), std::invalid_argument);
}

TEST_CASE("pair sampling scales past the shuffle threshold", "[eval]") {
  // 1002 vertices gives just over a million ordered pairs, forcing the
  // rejection path.
  Mesh m = testmesh::icosphere(10);
  REQUIRE(static_cast<std::int64_t>(m.vertex_count()) *
              (m.vertex_count() - 1) >
          1'000'000);
  auto a = sample_pairs(m, 500, 11);
  auto b = sample_pairs(m, 500, 11);
  REQUIRE(a.pairs == b.pairs);
  std::set<std::pair<int, int>> seen(a.pairs.begin(), a.pairs.end());
  REQUIRE(seen.size() == 500);
  for (const auto& [u, v] : a.pairs) REQUIRE(u != v);
}

TEST_CASE("relative error scalar cases", "[eval]") {
  REQUIRE(relative_error(1.05, 1.0) == Catch::Approx(0.05).epsilon(1e-12));
  REQUIRE(relative_error(2.0, 2.0) == 0.0);
  REQUIRE(relative_error(0.95, 1.0) == Catch::Approx(0.05).epsilon(1e-12));
  REQUIRE(relative_error(0.0, 0.0) == 0.0);
  REQUIRE_THROWS_AS(relative_error(1.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(relative_error(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("error aggregation, histogram edges, and exclusions", "[eval]") {
  PairSample sample;
  sample.pairs = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}, {0, 7}};
  //              0.4%    0.75%   4.8%    5.1%    30%    excluded  zero
  std::vector<double> truth = {1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0};
  std::vector<double> approx = {1.004, 1.0075, 1.048, 1.051, 1.30, 1.0, 0.0};

  auto r = mean_relative_error(sample, approx, truth);
  REQUIRE(r.excluded == 1);
  REQUIRE(r.included() == 6);
  REQUIRE(std::isnan(r.per_pair_error[5]));
  REQUIRE(r.per_pair_error[6] == 0.0);

  REQUIRE(r.bin_counts.size() == 11);
  REQUIRE(r.bin_counts[0] == 2);   // 0.4% and the exact-zero pair
  REQUIRE(r.bin_counts[1] == 1);   // 0.75%
  REQUIRE(r.bin_counts[9] == 1);   // 4.8%
  REQUIRE(r.bin_counts[10] == 2);  // 5.1% and 30% overflow
  long long total = 0;
  for (auto c : r.bin_counts) total += c;
  REQUIRE(total == r.included());

  double mean = 0.0;
  int cnt = 0;
  for (double e : r.per_pair_error)
    if (!std::isnan(e)) {
      mean += e;
      ++cnt;
    }
  mean /= cnt;
  REQUIRE(r.mean_relative_error == Catch::Approx(mean).epsilon(1e-12));

  PairSample two;
  two.pairs = {{0, 1}, {1, 2}};
  auto r2 = mean_relative_error(two, {1.01, 1.03}, {1.0, 1.0});
  REQUIRE(r2.mean_relative_error == Catch::Approx(0.02).epsilon(1e-12));

  REQUIRE_THROWS_AS(mean_relative_error(two, {1.0}, {1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("grouped exact truth equals per-pair propagation", "[eval]") {
  Mesh m = testmesh::torus(8, 6);
  auto sample = sample_pairs(m, 60, 21);
  auto grouped = exact_distances_for_pairs(m, sample.pairs);
  for (size_t k = 0; k < sample.pairs.size(); ++k) {
    auto field = ssad_exact(m, sample.pairs[k].first);
    REQUIRE(grouped[k] == field.distances[sample.pairs[k].second]);
  }
}

TEST_CASE("end-to-end error against the exact oracle", "[eval]") {
  Pipeline pl;
  QueryContext ctx(pl.mesh, pl.svg, pl.emb, pl.cls);

  auto sample = sample_pairs(pl.mesh, 300, 5);
  auto truth = exact_distances_for_pairs(pl.mesh, sample.pairs);
  std::vector<double> approx(sample.pairs.size());
  for (size_t k = 0; k < sample.pairs.size(); ++k)
    approx[k] = query_distance(ctx, sample.pairs[k].first,
                               sample.pairs[k].second);

  auto r = mean_relative_error(sample, approx, truth);
  REQUIRE(r.excluded == 0);
  REQUIRE(r.mean_relative_error < 0.02);
  long long total = 0;
  for (auto c : r.bin_counts) total += c;
  REQUIRE(total == 300);

  // Callable form matches the array form exactly.
  auto r2 = mean_relative_error(
      sample,
      [&](int u, int v) { return query_distance(ctx, u, v); },
      [&, k = size_t{0}](int, int) mutable { return truth[k++]; });
  REQUIRE(r2.mean_relative_error == r.mean_relative_error);
}

TEST_CASE("embedding epsilon equals the eval metric over saddle pairs",
          "[eval]") {
  Pipeline pl;
  Eigen::MatrixXd d = ground_truth_saddle_distances(pl.mesh, pl.cls);

  PairSample sample;
  std::vector<double> approx, truth;
  for (int i = 0; i < pl.cls.saddle_count(); ++i)
    for (int j = i + 1; j < pl.cls.saddle_count(); ++j) {
      sample.pairs.emplace_back(pl.cls.saddles[i], pl.cls.saddles[j]);
      approx.push_back(embed_distance(pl.emb, i, j));
      truth.push_back(d(i, j));
    }

  auto r = mean_relative_error(sample, approx, truth);
  REQUIRE(r.mean_relative_error ==
          Catch::Approx(pl.emb.epsilon_history.back()).epsilon(1e-12));
}

TEST_CASE("query benchmarking", "[eval]") {
  Pipeline pl;
  QueryContext ctx(pl.mesh, pl.svg, pl.emb, pl.cls);

  auto sample = sample_pairs(pl.mesh, 300, 5);
  auto bench = benchmark_queries(ctx, sample, 2);
  REQUIRE(bench.case_mix.total() == 300);  // counted once per pair
  REQUIRE(bench.timing.timed_queries == 500);  // 600 minus 100 warm-up
  REQUIRE(bench.timing.mean_seconds > 0.0);
  REQUIRE(bench.timing.min_seconds <= bench.timing.median_seconds);
  REQUIRE(bench.timing.median_seconds <= bench.timing.p99_seconds);
  REQUIRE(bench.timing.p99_seconds <= bench.timing.max_seconds);
  REQUIRE(bench.checksum > 0.0);

  // Short runs keep every sample instead of discarding them all.
  auto tiny = sample_pairs(pl.mesh, 30, 6);
  auto small = benchmark_queries(ctx, tiny, 1);
  REQUIRE(small.timing.timed_queries == 30);
  REQUIRE(small.case_mix.total() == 30);

  REQUIRE_THROWS_AS(benchmark_queries(ctx, tiny, 0), std::invalid_argument);
}

TEST_CASE("report export round-trips", "[eval]") {
  PairSample sample;
  sample.pairs = {{0, 1}, {2, 3}, {4, 5}};
  std::vector<double> truth = {1.0, 2.0, 4.0};
  std::vector<double> approx = {1.01, 1.98, 4.0};
  auto r = mean_relative_error(sample, approx, truth);
  r.timing.mean_seconds = 1.5e-6;
  r.timing.timed_queries = 3;
  r.case_mix.direct = 2;
  r.case_mix.near = 1;

  auto j = nlohmann::json::parse(error_report_json(r));
  REQUIRE(j["mean_relative_error"].get<double>() == r.mean_relative_error);
  REQUIRE(j["histogram"]["counts"].size() == 11);
  REQUIRE(j["histogram"]["excluded"].get<long long>() == 0);
  REQUIRE(j["timing"]["mean_seconds"].get<double>() == 1.5e-6);
  REQUIRE(j["case_mix"]["direct"].get<long long>() == 2);

  auto csv = per_pair_csv(sample, r);
  REQUIRE(csv.rfind("u,v,approx,truth,relative_error\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 4);
  // The first data row ends with the error printed at full precision.
  const auto line_start = csv.find('\n') + 1;
  const auto line = csv.substr(line_start, csv.find('\n', line_start) -
                                               line_start);
  const auto last_comma = line.rfind(',');
  REQUIRE(std::stod(line.substr(last_comma + 1)) == r.per_pair_error[0]);

  PairSample wrong;
  wrong.pairs = {{0, 1}};
  REQUIRE_THROWS_AS(per_pair_csv(wrong, r), std::invalid_argument);
}
