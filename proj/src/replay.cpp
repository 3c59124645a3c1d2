#include <pgslam/replay.hpp>

#include <pgslam/optimizer.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

namespace pgslam {

namespace {

/* Odometry step from `base` into `f`: the connecting odometry edge when one
 * exists, otherwise the relative pose of the current means. */
Pose2d step_into(const PoseGraph& graph, int base, int f) {
  for (int ei : graph.incident_edges(f)) {
    const Edge& e = graph.edge(ei);
    if (e.kind != EdgeKind::odometry) continue;
    if (e.from == base && e.to == f) return e.measurement;
    if (e.from == f && e.to == base) return inverse(e.measurement);
  }
  return inverse_compose(graph.node(base).pose, graph.node(f).pose);
}

Mat3 psd_clamped(const Mat3& info) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(info);
  if (es.eigenvalues().minCoeff() >= kSigmaEps) return info;
  const Vec3 ev = es.eigenvalues().cwiseMax(kSigmaEps);
  Mat3 m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return ((m + m.transpose()) / 2).eval();
}

OptimizeConfig optimizer_config(const RunConfig& config) {
  OptimizeConfig oc;
  oc.max_iter = config.max_iter;
  oc.tol = config.tol;
  oc.huber_delta = config.huber_delta;
  return oc;
}

}  // namespace

long run_batch(PoseGraph& graph, int window) {
  const std::vector<int> ids = graph.node_ids();
  if (ids.empty()) return 0;
  FrameNode& root = graph.node(ids.front());
  if (root.status == NodeStatus::unregistered) {
    root.status = NodeStatus::optimized;
    root.cov = Mat3::Zero();
  }
  long promoted = 0;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (graph.node(ids[i]).status != NodeStatus::unregistered) continue;
    if (static_cast<int>(ids.size() - i) < window) break;
    make_temporal_node(graph, window, step_into(graph, ids[i - 1], ids[i]));
    ++promoted;
  }
  return promoted;
}

PipelineResult run_pipeline(const DatasetRecord& record, const RunConfig& config,
                            bool stop_after_sparsify) {
  config.validate();
  using clock = std::chrono::steady_clock;
  PipelineResult out;
  auto stamp = [&](StageReport r, clock::time_point t0) {
    if (config.timing)
      r.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    out.stages.push_back(std::move(r));
  };
  auto counts = [](const PoseGraph& g, StageReport& r) {
    r.nodes = static_cast<long>(g.num_nodes());
    r.edges = static_cast<long>(g.num_edges());
  };

  auto t0 = clock::now();
  PoseGraph g = build_graph(record);
  {
    StageReport r;
    r.stage = "load";
    counts(g, r);
    stamp(std::move(r), t0);
  }

  t0 = clock::now();
  run_batch(g, config.window);
  optimize(g, optimizer_config(config));
  for (int id : g.node_ids()) g.node(id).status = NodeStatus::optimized;
  for (int id : g.node_ids()) out.reference.emplace(id, g.node(id).pose);
  {
    StageReport r;
    r.stage = "batch";
    counts(g, r);
    stamp(std::move(r), t0);
  }

  t0 = clock::now();
  GridIndex grid(config.cell_size);
  out.prune = prune_cells(g, grid, config.s, config.weight_mode);
  if (!config.timing) out.prune.elapsed_ms = 0;
  {
    StageReport r;
    r.stage = "prune";
    counts(g, r);
    r.npc = out.prune.npc;
    stamp(std::move(r), t0);
  }

  t0 = clock::now();
  out.sparsified = chow_liu_sparsify(g);
  {
    StageReport r;
    r.stage = "sparsify";
    counts(g, r);
    stamp(std::move(r), t0);
  }

  if (!stop_after_sparsify) {
    t0 = clock::now();
    optimize(g, optimizer_config(config));
    {
      StageReport r;
      r.stage = "optimize";
      counts(g, r);
      stamp(std::move(r), t0);
    }

    t0 = clock::now();
    std::map<int, Pose2d> pruned;
    for (int id : g.node_ids()) pruned.emplace(id, g.node(id).pose);
    out.arps_pct = metric_arps(out.reference, pruned);
    {
      StageReport r;
      r.stage = "metrics";
      r.arps_pct = out.arps_pct;
      stamp(std::move(r), t0);
    }
  }

  out.graph = std::move(g);
  return out;
}

PoseGraph build_snapshot(const DatasetRecord& record, const RunConfig& config) {
  config.validate();
  PoseGraph g = build_graph(record);
  optimize(g, optimizer_config(config));
  refresh_covariances(g);
  for (int id : g.node_ids()) g.node(id).status = NodeStatus::optimized;
  return g;
}

ReplayResult run_track_replay(const DatasetRecord& record, const RunConfig& config,
                              const DelaySchedule& delays, const PoseGraph& snapshot) {
  config.validate();
  if (record.vertices.empty()) throw std::runtime_error("replay: empty dataset");

  std::map<int, const DatasetEdge*> odometry;   // keyed by earlier endpoint
  std::map<int, std::vector<const DatasetEdge*>> loops;  // keyed by later endpoint
  for (const DatasetEdge& e : record.edges) {
    if (e.to == e.from + 1)
      odometry.emplace(e.from, &e);
    else
      loops[std::max(e.from, e.to)].push_back(&e);
  }

  int cur = record.vertices.front().id;
  for (const DatasetVertex& v : record.vertices) cur = std::min(cur, v.id);

  Pose2d start;
  if (snapshot.has_node(cur)) {
    start = snapshot.node(cur).pose;
  } else {
    for (const DatasetVertex& v : record.vertices)
      if (v.id == cur) start = Pose2d(v.x, v.y, v.theta);
  }

  struct Job {
    int step;
    Observation obs;
    double elapsed;
  };
  std::vector<Job> jobs;

  ReplayResult result;
  Pose2d raw = start;
  result.raw_odometry.push_back(raw);
  int step = 0;
  while (odometry.count(cur)) {
    const DatasetEdge* e = odometry[cur];
    const int next = cur + 1;
    Observation obs;
    obs.odometry = Pose2d(e->dx, e->dy, e->dtheta);
    obs.odometry_info = psd_clamped(information_matrix(*e));
    auto it = loops.find(next);
    if (it != loops.end()) {
      for (const DatasetEdge* le : it->second) {
        const int other = le->from == next ? le->to : le->from;
        if (!snapshot.has_node(other)) continue;
        if (snapshot.node(other).status == NodeStatus::pruned) continue;
        LoopCandidate c;
        c.node = other;
        const Pose2d z(le->dx, le->dy, le->dtheta);
        const Mat3 info = psd_clamped(information_matrix(*le));
        if (le->from == other) {
          c.measurement = z;
          c.information = info;
        } else {
          c.measurement = inverse(z);
          c.information = information_from_covariance(
              inverse_covariance(z, covariance_from_information(info)));
        }
        obs.loop_candidates.push_back(c);
      }
    }
    jobs.push_back({step, std::move(obs), delays(step)});
    raw = compose(raw, Pose2d(e->dx, e->dy, e->dtheta));
    result.raw_odometry.push_back(raw);
    cur = next;
    ++step;
  }

  TrackerState state;
  state.deadline_ms = config.deadline_ms;
  state.submap_side = config.submap_side;
  state.huber_delta = config.huber_delta;
  init_tracker(state, snapshot, start, Mat3::Identity() * 1e-6);

  auto run_one = [&](const Job& j) {
    auto [pose, mode] = track_step(state, snapshot, j.obs, j.elapsed);
    if (mode == TrackMode::fallback) ++result.fallback_steps;
    result.log.push_back({j.step, mode, pose});
  };

  if (config.single_thread) {
    for (const Job& j : jobs) run_one(j);
  } else {
    std::mutex m;
    std::condition_variable cv;
    std::deque<const Job*> queue;
    bool done = false;
    std::thread worker([&] {
      for (;;) {
        const Job* j = nullptr;
        {
          std::unique_lock<std::mutex> lk(m);
          cv.wait(lk, [&] { return !queue.empty() || done; });
          if (queue.empty()) return;
          j = queue.front();
          queue.pop_front();
        }
        run_one(*j);
      }
    });
    for (const Job& j : jobs) {
      {
        std::lock_guard<std::mutex> lk(m);
        queue.push_back(&j);
      }
      cv.notify_one();
    }
    {
      std::lock_guard<std::mutex> lk(m);
      done = true;
    }
    cv.notify_one();
    worker.join();
  }
  return result;
}

}  // namespace pgslam
