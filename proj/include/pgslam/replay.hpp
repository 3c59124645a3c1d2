#pragma once

#include <pgslam/backend.hpp>
#include <pgslam/config.hpp>
#include <pgslam/g2o_io.hpp>
#include <pgslam/report.hpp>
#include <pgslam/tracker.hpp>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace pgslam {

/* Synthetic elapsed milliseconds for each replay step; replaces wall clock
 * so runs are reproducible. */
using DelaySchedule = std::function<double(int step)>;

struct TrackLogEntry {
  int step = 0;
  TrackMode mode = TrackMode::estimated;
  Pose2d pose;
};

struct ReplayResult {
  std::vector<TrackLogEntry> log;     // one entry per frame after the first
  std::vector<Pose2d> raw_odometry;   // dead-reckoned path, same length + 1
  long fallback_steps = 0;
};

/* Replays the dataset's odometry edges in id order as tracker observations
 * against a fixed optimized snapshot. Loop edges are injected as candidates
 * once their later endpoint is reached. Unless config.single_thread is set
 * the tracker runs on its own thread behind an ordered queue; the result is
 * identical either way. */
ReplayResult run_track_replay(const DatasetRecord& record, const RunConfig& config,
                              const DelaySchedule& delays, const PoseGraph& snapshot);

/* Builds the snapshot for run_track_replay: full graph, optimized, with
 * covariances refreshed along the odometry chain and all nodes registered. */
PoseGraph build_snapshot(const DatasetRecord& record, const RunConfig& config);

struct PipelineResult {
  PoseGraph graph;                  // graph after the last executed stage
  std::map<int, Pose2d> reference;  // optimized full-graph poses, by node id
  PruneReport prune;
  int sparsified = 0;               // edges removed by the spanning reduction
  double arps_pct = 0;
  std::vector<StageReport> stages;
};

/* Batch stage driver: load -> batch (temporal promotion + baseline optimize)
 * -> prune -> sparsify, then unless stopped early: optimize -> metrics.
 * Stage observations are appended to `stages`; elapsed times are recorded
 * only when config.timing is set. */
PipelineResult run_pipeline(const DatasetRecord& record, const RunConfig& config,
                            bool stop_after_sparsify = false);

/* Number of sliding-window promotions applied; registers the first node as
 * the chain root beforehand. */
long run_batch(PoseGraph& graph, int window);

}  // namespace pgslam
