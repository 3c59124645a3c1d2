#include <pgslam/g2o_io.hpp>
#include <pgslam/optimizer.hpp>
#include <pgslam/replay.hpp>
#include <pgslam/report.hpp>
#include <pgslam/svg.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using namespace pgslam;

struct Paths {
  std::string dataset;
  std::string second;
  std::string out;
  std::string svg;
};

void add_common(CLI::App* cmd, RunConfig& cfg, Paths& paths) {
  cmd->add_option("--cell-size", cfg.cell_size, "grid cell size, meters");
  cmd->add_option("--s", cfg.s, "information vs geometry balance, in [0,1]");
  const std::map<std::string, WeightMode> modes{
      {"node", WeightMode::node_info}, {"edge", WeightMode::edge_info}};
  cmd->add_option("--weight-mode", cfg.weight_mode, "node|edge")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  cmd->add_option("--submap", cfg.submap_side, "loop-gating submap side, meters");
  cmd->add_option("--window", cfg.window, "unregistered-node window size");
  cmd->add_option("--huber", cfg.huber_delta, "huber threshold on whitened residuals");
  cmd->add_option("--max-iter", cfg.max_iter, "optimizer iteration cap");
  cmd->add_option("--tol", cfg.tol, "relative cost-change tolerance");
  cmd->add_option("--deadline-ms", cfg.deadline_ms, "tracker deadline, milliseconds");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--out", paths.out, "write the resulting graph as g2o");
  cmd->add_option("--svg", paths.svg, "write a trajectory plot");
  cmd->add_flag("--single-thread", cfg.single_thread, "fully serial replay");
  cmd->add_flag("--timing", cfg.timing, "report wall-clock stage times");
}

std::vector<Pose2d> graph_trajectory(const PoseGraph& g) {
  std::vector<Pose2d> t;
  for (int id : g.node_ids()) t.push_back(g.node(id).pose);
  return t;
}

std::vector<Pose2d> reference_trajectory(const std::map<int, Pose2d>& poses) {
  std::vector<Pose2d> t;
  for (const auto& [id, p] : poses) {
    (void)id;
    t.push_back(p);
  }
  return t;
}

void emit_line(const PoseGraph& g) {
  StageReport r;
  r.stage = "emit";
  r.nodes = static_cast<long>(g.num_nodes());
  r.edges = static_cast<long>(g.num_edges());
  std::cout << to_json_line(r) << "\n";
}

int do_optimize(const RunConfig& cfg, const Paths& paths) {
  const DatasetRecord rec = load_g2o_file(paths.dataset);
  PoseGraph g = build_graph(rec);
  {
    StageReport r;
    r.stage = "load";
    r.nodes = static_cast<long>(g.num_nodes());
    r.edges = static_cast<long>(g.num_edges());
    std::cout << to_json_line(r) << "\n";
  }
  OptimizeConfig oc;
  oc.max_iter = cfg.max_iter;
  oc.tol = cfg.tol;
  oc.huber_delta = cfg.huber_delta;
  const OptimizeResult res = optimize(g, oc);
  std::cerr << "optimize: cost " << res.initial_cost << " -> " << res.final_cost
            << " in " << res.iterations << " iterations\n";
  {
    StageReport r;
    r.stage = "optimize";
    r.nodes = static_cast<long>(g.num_nodes());
    r.edges = static_cast<long>(g.num_edges());
    std::cout << to_json_line(r) << "\n";
  }
  if (!paths.out.empty()) write_g2o_file(g, paths.out);
  if (!paths.svg.empty()) emit_svg({{"optimized", graph_trajectory(g)}}, paths.svg);
  emit_line(g);
  return 0;
}

int do_pipeline(const RunConfig& cfg, const Paths& paths, bool stop_after_sparsify) {
  const DatasetRecord rec = load_g2o_file(paths.dataset);
  const PipelineResult pr = run_pipeline(rec, cfg, stop_after_sparsify);
  for (const StageReport& r : pr.stages) std::cout << to_json_line(r) << "\n";
  if (!paths.out.empty()) write_g2o_file(pr.graph, paths.out);
  if (!paths.svg.empty())
    emit_svg({{"original", reference_trajectory(pr.reference)},
              {"pruned", graph_trajectory(pr.graph)}},
             paths.svg);
  emit_line(pr.graph);
  return 0;
}

int do_track(const RunConfig& cfg, const Paths& paths) {
  const DatasetRecord rec = load_g2o_file(paths.dataset);
  const PoseGraph snapshot = build_snapshot(rec, cfg);
  const ReplayResult rr =
      run_track_replay(rec, cfg, [](int) { return 0.0; }, snapshot);
  for (const TrackLogEntry& e : rr.log) {
    nlohmann::json j;
    j["step"] = e.step;
    j["mode"] = e.mode == TrackMode::estimated ? "estimated" : "fallback";
    j["x"] = e.pose.x;
    j["y"] = e.pose.y;
    j["theta"] = e.pose.theta;
    std::cout << j.dump() << "\n";
  }
  {
    StageReport r;
    r.stage = "track";
    r.nodes = static_cast<long>(snapshot.num_nodes());
    r.edges = static_cast<long>(snapshot.num_edges());
    std::cout << to_json_line(r) << "\n";
  }
  if (!paths.svg.empty()) {
    std::vector<Pose2d> tracked;
    for (const TrackLogEntry& e : rr.log) tracked.push_back(e.pose);
    emit_svg({{"tracked", tracked}, {"odometry", rr.raw_odometry}}, paths.svg);
  }
  emit_line(snapshot);
  return 0;
}

int do_metrics(const Paths& paths) {
  const DatasetRecord a = load_g2o_file(paths.dataset);
  const DatasetRecord b = load_g2o_file(paths.second);
  std::map<int, Pose2d> pa, pb;
  for (const DatasetVertex& v : a.vertices) pa.emplace(v.id, Pose2d(v.x, v.y, v.theta));
  for (const DatasetVertex& v : b.vertices) pb.emplace(v.id, Pose2d(v.x, v.y, v.theta));
  StageReport r;
  r.stage = "metrics";
  r.arps_pct = metric_arps(pa, pb);
  if (pa.size() == pb.size()) {
    std::vector<Pose2d> ta, tb;
    for (const auto& [id, p] : pa) {
      (void)id;
      ta.push_back(p);
    }
    for (const auto& [id, p] : pb) {
      (void)id;
      tb.push_back(p);
    }
    r.t_rel_m = metric_t_rel(tb, ta);
  }
  std::cout << to_json_line(r) << "\n";
  return 0;
}

int do_plot(const Paths& paths) {
  if (paths.svg.empty()) {
    std::cerr << "plot requires --svg <path>\n";
    return 2;
  }
  const DatasetRecord rec = load_g2o_file(paths.dataset);
  std::vector<Pose2d> t;
  for (const DatasetVertex& v : rec.vertices) t.emplace_back(v.x, v.y, v.theta);
  emit_svg({{"trajectory", t}}, paths.svg);
  StageReport r;
  r.stage = "emit";
  r.nodes = static_cast<long>(rec.vertices.size());
  r.edges = static_cast<long>(rec.edges.size());
  std::cout << to_json_line(r) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D pose-graph SLAM back-end"};
  app.require_subcommand(1);

  RunConfig cfg;
  Paths paths;

  CLI::App* c_optimize = app.add_subcommand("optimize", "optimize a dataset in place");
  c_optimize->add_option("dataset", paths.dataset, "g2o file")->required();
  add_common(c_optimize, cfg, paths);

  CLI::App* c_prune = app.add_subcommand("prune", "batch, prune, and sparsify a dataset");
  c_prune->add_option("dataset", paths.dataset, "g2o file")->required();
  add_common(c_prune, cfg, paths);

  CLI::App* c_pipeline =
      app.add_subcommand("pipeline", "full stage sequence with final metrics");
  c_pipeline->add_option("dataset", paths.dataset, "g2o file")->required();
  add_common(c_pipeline, cfg, paths);

  CLI::App* c_track =
      app.add_subcommand("track", "replay odometry through the tracker");
  c_track->add_option("dataset", paths.dataset, "g2o file")->required();
  add_common(c_track, cfg, paths);

  CLI::App* c_metrics = app.add_subcommand("metrics", "compare two maps");
  c_metrics->add_option("original", paths.dataset, "reference g2o file")->required();
  c_metrics->add_option("estimate", paths.second, "estimate g2o file")->required();
  add_common(c_metrics, cfg, paths);

  CLI::App* c_plot = app.add_subcommand("plot", "plot a dataset trajectory");
  c_plot->add_option("dataset", paths.dataset, "g2o file")->required();
  add_common(c_plot, cfg, paths);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    cfg.validate();
    std::cout << config_json_line(cfg) << "\n";
    if (c_optimize->parsed()) return do_optimize(cfg, paths);
    if (c_prune->parsed()) return do_pipeline(cfg, paths, true);
    if (c_pipeline->parsed()) return do_pipeline(cfg, paths, false);
    if (c_track->parsed()) return do_track(cfg, paths);
    if (c_metrics->parsed()) return do_metrics(paths);
    if (c_plot->parsed()) return do_plot(paths);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
