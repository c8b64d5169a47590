#pragma once

// Evaluation protocol: seeded pair sampling, relative-error aggregation
// with a fixed-width histogram, and single-threaded query benchmarking.
// Truth values for large runs come from one exact propagation per unique
// source vertex rather than one per pair.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "geodex/geodesic.hpp"
#include "geodex/mesh.hpp"
#include "geodex/parallel.hpp"
#include "geodex/query.hpp"

namespace geodex {

struct PairSample {
  std::vector<std::pair<int, int>> pairs;  // ordered, u != v, no repeats
  std::uint64_t seed = 0;
};

// Uniform ordered pairs without replacement. Small universes are shuffled
// outright; large ones use rejection against a seen-set. Index draws use
// plain modulo so runs reproduce across platforms; the bias is immaterial
// at these sizes.
inline PairSample sample_pairs(const Mesh& mesh, std::int64_t count,
                               std::uint64_t seed) {
  const std::int64_t n = mesh.vertex_count();
  if (n < 2) throw std::invalid_argument("pair sampling needs >= 2 vertices");
  if (count < 1) throw std::invalid_argument("pair count must be positive");
  const std::int64_t available = n * (n - 1);
  if (count > available)
    throw std::invalid_argument("pair count exceeds distinct ordered pairs");

  PairSample out;
  out.seed = seed;
  out.pairs.reserve(static_cast<size_t>(count));
  std::mt19937_64 rng(seed);

  if (available <= 1'000'000) {
    std::vector<std::int64_t> all;
    all.reserve(static_cast<size_t>(available));
    for (std::int64_t u = 0; u < n; ++u)
      for (std::int64_t v = 0; v < n; ++v)
        if (u != v) all.push_back(u * n + v);
    for (std::int64_t k = 0; k < count; ++k) {
      const auto j = k + static_cast<std::int64_t>(
                             rng() % static_cast<std::uint64_t>(
                                         available - k));
      std::swap(all[k], all[j]);
      out.pairs.emplace_back(static_cast<int>(all[k] / n),
                             static_cast<int>(all[k] % n));
    }
  } else {
    std::unordered_set<std::int64_t> seen;
    seen.reserve(static_cast<size_t>(count) * 2);
    while (static_cast<std::int64_t>(out.pairs.size()) < count) {
      const auto u = static_cast<std::int64_t>(rng() % n);
      const auto v = static_cast<std::int64_t>(rng() % n);
      if (u == v) continue;
      if (!seen.insert(u * n + v).second) continue;
      out.pairs.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
  }
  return out;
}

inline double relative_error(double approx, double truth) {
  if (truth > 0.0) return std::abs(approx - truth) / truth;
  if (truth == 0.0 && approx == 0.0) return 0.0;
  throw std::invalid_argument("relative error undefined for this truth");
}

constexpr double kErrorBinWidth = 0.005;  // half a percent
constexpr int kErrorBinCount = 10;        // up to 5%, then one overflow bin

struct TimingStats {
  double mean_seconds = 0.0;
  double median_seconds = 0.0;
  double p99_seconds = 0.0;
  double min_seconds = 0.0;
  double max_seconds = 0.0;
  long long timed_queries = 0;
};

struct ErrorReport {
  double mean_relative_error = 0.0;
  std::vector<double> per_pair_error;  // NaN where the pair was excluded
  std::vector<double> approx_values;
  std::vector<double> truth_values;
  std::vector<double> bin_edges;       // kErrorBinCount + 1 edges from 0
  std::vector<long long> bin_counts;   // last entry counts >= 5%
  long long excluded = 0;
  TimingStats timing;
  QueryStats case_mix;

  long long included() const {
    return static_cast<long long>(per_pair_error.size()) - excluded;
  }
};

inline ErrorReport mean_relative_error(const PairSample& sample,
                                       const std::vector<double>& approx,
                                       const std::vector<double>& truth) {
  const size_t n = sample.pairs.size();
  if (approx.size() != n || truth.size() != n)
    throw std::invalid_argument("value arrays do not match the sample");

  ErrorReport r;
  r.per_pair_error.assign(n, std::numeric_limits<double>::quiet_NaN());
  r.approx_values = approx;
  r.truth_values = truth;
  r.bin_edges.resize(kErrorBinCount + 1);
  for (int b = 0; b <= kErrorBinCount; ++b)
    r.bin_edges[b] = kErrorBinWidth * b;
  r.bin_counts.assign(kErrorBinCount + 1, 0);

  double acc = 0.0;
  long long cnt = 0;
  for (size_t k = 0; k < n; ++k) {
    const double t = truth[k];
    if (!(t > 0.0) && !(t == 0.0 && approx[k] == 0.0)) {
      ++r.excluded;
      continue;
    }
    const double e = relative_error(approx[k], t);
    r.per_pair_error[k] = e;
    acc += e;
    ++cnt;
    const int bin = std::min(kErrorBinCount,
                             static_cast<int>(e / kErrorBinWidth));
    ++r.bin_counts[bin];
  }
  r.mean_relative_error = cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
  return r;
}

// Evaluate callables over the sample (parallel, order-preserving), then
// aggregate.
template <class ApproxFn, class TruthFn>
  requires std::invocable<ApproxFn&, int, int> &&
           std::invocable<TruthFn&, int, int>
ErrorReport mean_relative_error(const PairSample& sample, ApproxFn&& approx,
                                TruthFn&& truth, int threads = 0) {
  const auto n = static_cast<std::int64_t>(sample.pairs.size());
  std::vector<double> a(n), t(n);
  parallel_for_blocks(n, resolve_threads(threads),
                      [&](std::int64_t b, std::int64_t e) {
                        for (std::int64_t k = b; k < e; ++k) {
                          a[k] = approx(sample.pairs[k].first,
                                        sample.pairs[k].second);
                          t[k] = truth(sample.pairs[k].first,
                                       sample.pairs[k].second);
                        }
                      });
  return mean_relative_error(sample, a, t);
}

// Ground truth for a pair list: one exact propagation per distinct source.
inline std::vector<double> exact_distances_for_pairs(
    const Mesh& mesh, const std::vector<std::pair<int, int>>& pairs,
    int threads = 0) {
  std::vector<int> sources;
  sources.reserve(pairs.size());
  for (const auto& p : pairs) sources.push_back(p.first);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

  std::vector<std::vector<size_t>> by_source(sources.size());
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto it = std::lower_bound(sources.begin(), sources.end(),
                                     pairs[k].first);
    by_source[it - sources.begin()].push_back(k);
  }

  std::vector<double> out(pairs.size());
  parallel_for_blocks(static_cast<std::int64_t>(sources.size()),
                      resolve_threads(threads),
                      [&](std::int64_t b, std::int64_t e) {
                        for (std::int64_t i = b; i < e; ++i) {
                          auto field = ssad_exact(mesh, sources[i]);
                          for (size_t k : by_source[i])
                            out[k] = field.distances[pairs[k].second];
                        }
                      });
  return out;
}

struct BenchmarkResult {
  TimingStats timing;
  QueryStats case_mix;  // counted once per pair, on the first repetition
  double checksum = 0.0;  // sum of returned distances; defeats dead-code
};

// Wall-clock per-query latencies, single-threaded on purpose. The first
// 100 timed queries warm caches and are excluded when the run is long
// enough to spare them.
inline BenchmarkResult benchmark_queries(const QueryContext& ctx,
                                         const PairSample& sample,
                                         int repetitions = 1) {
  if (repetitions < 1)
    throw std::invalid_argument("repetitions must be positive");
  BenchmarkResult out;
  const auto total =
      static_cast<std::int64_t>(sample.pairs.size()) * repetitions;
  const std::int64_t warmup = total > 100 ? 100 : 0;
  std::vector<double> times;
  times.reserve(static_cast<size_t>(total - warmup));

  std::int64_t k = 0;
  for (int rep = 0; rep < repetitions; ++rep) {
    QueryStats* stats = rep == 0 ? &out.case_mix : nullptr;
    for (const auto& [u, v] : sample.pairs) {
      const auto t0 = std::chrono::steady_clock::now();
      const double d = query_distance(ctx, u, v, stats);
      const auto t1 = std::chrono::steady_clock::now();
      out.checksum += d;
      if (k++ >= warmup)
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
  }

  if (!times.empty()) {
    std::sort(times.begin(), times.end());
    double acc = 0.0;
    for (double t : times) acc += t;
    const auto m = static_cast<std::int64_t>(times.size());
    out.timing.timed_queries = m;
    out.timing.mean_seconds = acc / static_cast<double>(m);
    out.timing.median_seconds = times[static_cast<size_t>((m - 1) / 2)];
    const auto p99 = std::min<std::int64_t>(
        m - 1, static_cast<std::int64_t>(std::ceil(0.99 * m)) - 1);
    out.timing.p99_seconds = times[static_cast<size_t>(std::max<std::int64_t>(
        0, p99))];
    out.timing.min_seconds = times.front();
    out.timing.max_seconds = times.back();
  }
  return out;
}

inline std::string error_report_json(const ErrorReport& r) {
  nlohmann::json j;
  j["mean_relative_error"] = r.mean_relative_error;
  j["pairs"] = r.per_pair_error.size();
  j["histogram"]["bin_edges"] = r.bin_edges;
  j["histogram"]["counts"] = r.bin_counts;
  j["histogram"]["excluded"] = r.excluded;
  j["timing"]["mean_seconds"] = r.timing.mean_seconds;
  j["timing"]["median_seconds"] = r.timing.median_seconds;
  j["timing"]["p99_seconds"] = r.timing.p99_seconds;
  j["timing"]["min_seconds"] = r.timing.min_seconds;
  j["timing"]["max_seconds"] = r.timing.max_seconds;
  j["timing"]["timed_queries"] = r.timing.timed_queries;
  j["case_mix"]["ss"] = r.case_mix.ss;
  j["case_mix"]["direct"] = r.case_mix.direct;
  j["case_mix"]["near"] = r.case_mix.near;
  j["case_mix"]["far"] = r.case_mix.far;
  j["case_mix"]["fallback"] = r.case_mix.fallback;
  j["case_mix"]["clamped"] = r.case_mix.clamped;
  return j.dump(2);
}

inline std::string per_pair_csv(const PairSample& sample,
                                const ErrorReport& r) {
  if (sample.pairs.size() != r.per_pair_error.size())
    throw std::invalid_argument("report does not match the sample");
  std::string out = "u,v,approx,truth,relative_error\n";
  char buf[128];
  for (size_t k = 0; k < sample.pairs.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n",
                  sample.pairs[k].first, sample.pairs[k].second,
                  r.approx_values[k], r.truth_values[k],
                  r.per_pair_error[k]);
    out += buf;
  }
  return out;
}

}  // namespace geodex
