// Command-line front end: precompute the graph and embedding for a mesh,
// then answer distance queries, export distance fields, and run the
// evaluation protocol against the exact oracle.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "geodex/embedding.hpp"
#include "geodex/eval.hpp"
#include "geodex/mesh.hpp"
#include "geodex/persistence.hpp"
#include "geodex/query.hpp"
#include "geodex/svg.hpp"

namespace {

using namespace geodex;

struct CliConfig {
  std::string mesh_path;
  std::string pre_path;
  std::string out_path;
  std::string csv_path;
  int dim = 8;
  int rounds = 46;
  int k = 60;
  int ks = 20;
  std::uint64_t seed = 0;
  std::int64_t pairs = 1000;
  int reps = 1;
  int src = 0;
  int dst = 0;
  int threads = 0;
  bool debug_json = false;
  int verbosity = 0;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void note(const CliConfig& cfg, const std::string& msg) {
  if (cfg.verbosity > 0) std::cerr << msg << "\n";
}

int cmd_precompute(const CliConfig& cfg) {
  Mesh mesh = load_mesh(cfg.mesh_path);
  note(cfg, "mesh: " + std::to_string(mesh.vertex_count()) + " vertices, " +
                std::to_string(mesh.face_count()) + " faces");

  Precomputation pre;
  pre.classification = classify_vertices(mesh);
  note(cfg, "saddles: " +
                std::to_string(pre.classification.saddle_count()));
  pre.metadata.svg_params.neighbor_cap = cfg.k;
  pre.metadata.svg_params.saddle_neighbor_cap = cfg.ks;
  pre.svg = build_svg(mesh, pre.classification, pre.metadata.svg_params,
                      cfg.threads);
  note(cfg, "graph edge slots: " + std::to_string(pre.svg.edge_slots()));

  pre.metadata.cascade_options.seed = cfg.seed;
  pre.metadata.stress_options = SolverOptions::stress_defaults();
  pre.metadata.stress_options.seed = cfg.seed;
  const int sc = pre.classification.saddle_count();
  if (sc >= 2) {
    pre.embedding = geodesic_embedding(
        mesh, pre.classification, cfg.dim, cfg.rounds,
        pre.metadata.cascade_options, pre.metadata.stress_options,
        cfg.threads);
    note(cfg,
         "embedding error: " + fmt17(pre.embedding.epsilon_history.back()));
  } else {
    // Convex-ish surface: queries resolve on the graph alone, but the
    // file format still carries a (zero) embedding of the right shape.
    auto& e = pre.embedding;
    e.dim_euclidean = cfg.dim;
    e.rounds = cfg.rounds;
    e.euclidean = Eigen::MatrixXd::Zero(sc, cfg.dim);
    e.s_block = Eigen::MatrixXd::Zero(sc, cfg.rounds);
    e.t_block = Eigen::MatrixXd::Zero(sc, cfg.rounds);
    e.saddle_vertices = pre.classification.saddles;
    e.row_of_vertex = pre.classification.saddle_rank;
    e.objective_history.assign(cfg.rounds + 1, 0.0);
    e.epsilon_history.assign(cfg.rounds + 1, 0.0);
    note(cfg, "fewer than two saddles; stored an empty embedding");
  }

  save_precomputation(cfg.out_path, mesh, pre);
  note(cfg, "wrote " + cfg.out_path);
  return 0;
}

int cmd_query(const CliConfig& cfg) {
  Mesh mesh = load_mesh(cfg.mesh_path);
  Precomputation pre = load_precomputation(cfg.pre_path, mesh);
  QueryContext ctx = pre.make_context(mesh);
  std::cout << fmt17(query_distance(ctx, cfg.src, cfg.dst)) << "\n";
  return 0;
}

int cmd_ssad(const CliConfig& cfg) {
  Mesh mesh = load_mesh(cfg.mesh_path);
  Precomputation pre = load_precomputation(cfg.pre_path, mesh);
  QueryContext ctx = pre.make_context(mesh);
  ctx.check_vertex(cfg.src);

  std::ofstream out(cfg.out_path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + cfg.out_path);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    out << v << " " << fmt17(query_distance(ctx, cfg.src, v)) << "\n";
  out.flush();
  if (!out) throw IoError("write failed on " + cfg.out_path);
  return 0;
}

int cmd_eval(const CliConfig& cfg) {
  Mesh mesh = load_mesh(cfg.mesh_path);
  Precomputation pre = load_precomputation(cfg.pre_path, mesh);
  QueryContext ctx = pre.make_context(mesh);

  PairSample sample = sample_pairs(mesh, cfg.pairs, cfg.seed);
  note(cfg, "sampled " + std::to_string(sample.pairs.size()) + " pairs");

  BenchmarkResult bench = benchmark_queries(ctx, sample, cfg.reps);
  std::vector<double> approx(sample.pairs.size());
  for (size_t i = 0; i < sample.pairs.size(); ++i)
    approx[i] =
        query_distance(ctx, sample.pairs[i].first, sample.pairs[i].second);
  note(cfg, "computing exact ground truth");
  std::vector<double> truth =
      exact_distances_for_pairs(mesh, sample.pairs, cfg.threads);

  ErrorReport report = mean_relative_error(sample, approx, truth);
  report.timing = bench.timing;
  report.case_mix = bench.case_mix;

  const std::string json = error_report_json(report);
  if (cfg.out_path.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream out(cfg.out_path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + cfg.out_path);
    out << json << "\n";
    if (!out) throw IoError("write failed on " + cfg.out_path);
  }
  if (!cfg.csv_path.empty()) {
    std::ofstream csv(cfg.csv_path, std::ios::trunc);
    if (!csv) throw IoError("cannot create " + cfg.csv_path);
    csv << per_pair_csv(sample, report);
    if (!csv) throw IoError("write failed on " + cfg.csv_path);
  }
  return 0;
}

int cmd_info(const CliConfig& cfg) {
  if (cfg.debug_json) {
    Mesh mesh = load_mesh(cfg.mesh_path);
    Precomputation pre = load_precomputation(cfg.pre_path, mesh);
    std::cout << precomputation_debug_json(pre) << "\n";
    return 0;
  }
  PrecomputationHeader h = read_precomputation_header(cfg.pre_path);
  char sum[32];
  std::snprintf(sum, sizeof(sum), "%016llx",
                static_cast<unsigned long long>(h.mesh_checksum));
  std::cout << "version: " << h.version << "\n"
            << "mesh_checksum: " << sum << "\n"
            << "vertices: " << h.vertex_count << "\n"
            << "saddles: " << h.saddle_count << "\n"
            << "dim: " << h.dim_euclidean << "\n"
            << "rounds: " << h.rounds << "\n"
            << "neighbor_cap: " << h.neighbor_cap << "\n"
            << "saddle_neighbor_cap: " << h.saddle_neighbor_cap << "\n"
            << "edge_slots: " << h.edge_slots << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CliConfig cfg;
  CLI::App app{"geodesic distance queries via a saddle graph and a cascaded "
               "embedding"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", cfg.verbosity, "progress notes on stderr");

  auto* pc = app.add_subcommand("precompute",
                                "build the graph and embedding for a mesh");
  pc->fallthrough();
  pc->add_option("--mesh", cfg.mesh_path, "input mesh (.off or .obj)")
      ->required();
  pc->add_option("--out", cfg.out_path, "output .gepc file")->required();
  pc->add_option("--dim", cfg.dim, "Euclidean embedding dimensions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pc->add_option("--rounds", cfg.rounds, "cascade rounds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  pc->add_option("--k", cfg.k, "direct neighbor cap per vertex")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pc->add_option("--ks", cfg.ks, "direct saddle neighbor cap per vertex")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pc->add_option("--seed", cfg.seed, "solver seed")->capture_default_str();
  pc->add_option("--threads", cfg.threads, "worker threads (0 = auto)")
      ->envname("GE_THREADS");

  auto* qc = app.add_subcommand("query",
                                "distance between two vertices");
  qc->fallthrough();
  qc->add_option("--mesh", cfg.mesh_path)->required();
  qc->add_option("--pre", cfg.pre_path, "precomputation file")->required();
  qc->add_option("--src", cfg.src)->required();
  qc->add_option("--dst", cfg.dst)->required();

  auto* sc = app.add_subcommand(
      "ssad", "single-source field as 'index distance' lines");
  sc->fallthrough();
  sc->add_option("--mesh", cfg.mesh_path)->required();
  sc->add_option("--pre", cfg.pre_path)->required();
  sc->add_option("--src", cfg.src)->required();
  sc->add_option("--out", cfg.out_path, "output text file")->required();

  auto* ec = app.add_subcommand("eval",
                                "error and latency report against the "
                                "exact oracle");
  ec->fallthrough();
  ec->add_option("--mesh", cfg.mesh_path)->required();
  ec->add_option("--pre", cfg.pre_path)->required();
  ec->add_option("--pairs", cfg.pairs, "sample size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ec->add_option("--seed", cfg.seed)->capture_default_str();
  ec->add_option("--reps", cfg.reps, "benchmark repetitions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ec->add_option("--out", cfg.out_path, "report JSON (default stdout)");
  ec->add_option("--csv", cfg.csv_path, "optional per-pair CSV");
  ec->add_option("--threads", cfg.threads)->envname("GE_THREADS");

  auto* ic = app.add_subcommand("info", "describe a precomputation file");
  ic->fallthrough();
  ic->add_option("--pre", cfg.pre_path)->required();
  auto* mesh_opt = ic->add_option("--mesh", cfg.mesh_path,
                                  "mesh, required with --json");
  ic->add_flag("--json", cfg.debug_json, "full debug dump as JSON")
      ->needs(mesh_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*pc) return cmd_precompute(cfg);
    if (*qc) return cmd_query(cfg);
    if (*sc) return cmd_ssad(cfg);
    if (*ec) return cmd_eval(cfg);
    if (*ic) return cmd_info(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
