#pragma once

#include <pgslam/config.hpp>
#include <pgslam/graph.hpp>

#include <utility>
#include <vector>

namespace pgslam {

struct LoopCandidate {
  int node = -1;
  Pose2d measurement;  // pose of the tracked frame in the map node's frame
  Mat3 information = Mat3::Identity();
};

struct Observation {
  Pose2d odometry;  // relative motion since the previous frame
  Mat3 odometry_info = Mat3::Identity();
  std::vector<LoopCandidate> loop_candidates;
};

enum class TrackMode { estimated, fallback };

struct TrackerState {
  Pose2d reference;   // fixed gauge pose of the tracking problem
  Pose2d last_pgo;    // latest full estimate
  Mat3 last_pgo_cov = Mat3::Identity() * 1e-6;
  int anchor = -1;
  Pose2d correction;     // cached estimate-vs-raw-odometry transform
  Pose2d last_odometry;  // integrated raw odometry pose
  double deadline_ms = 50.0;

  Pose2d estimate;  // current corrected pose
  bool started = false;
  bool low_confidence = false;

  /* accumulated relative motion (and covariance) since the reference /
   * anchor instants */
  Pose2d odom_since_reference;
  Mat3 cov_since_reference = Mat3::Zero();
  Pose2d odom_since_anchor;
  Mat3 cov_since_anchor = Mat3::Zero();

  double submap_side = 10.0;
  double huber_delta = 1.0;
};

struct EstimateResult {
  Pose2d pose;
  Mat3 cov;
  bool low_confidence = false;
  int iterations = 0;
};

/* Optimized node minimizing the Mahalanobis distance to the last full
 * estimate; ties break to the smallest id. */
int select_anchor(const PoseGraph& snapshot, const Pose2d& last_pgo,
                  const Mat3& last_pgo_cov);

/* Seeds the tracker against an optimized snapshot. */
void init_tracker(TrackerState& state, const PoseGraph& snapshot,
                  const Pose2d& start, const Mat3& start_cov);

/* Motion-model prediction: previous estimate composed with the odometry. */
Pose2d predict(const TrackerState& state, const Observation& obs);

/* Full estimated-mode step: 3-DOF Gauss-Newton over the new pose combining
 * the reference-chain factor, the anchor factor, and submap-gated loop
 * factors under Huber. Commits chains, caches the correction, and re-selects
 * the anchor. */
EstimateResult estimate_global_pose(TrackerState& state, const PoseGraph& snapshot,
                                    const Observation& obs);

/* Caches and returns the transform that maps raw odometry onto the estimate. */
Pose2d apply_correction_cache(TrackerState& state, const Pose2d& estimated,
                              const Pose2d& raw_odometry_pose);

/* Deadline-miss prediction: cascades the cached correction onto the newest
 * raw odometry pose and advances the cache. */
Pose2d worst_case_predict(TrackerState& state, const Pose2d& new_raw_odometry);

/* One tracker frame: estimated mode inside the deadline, fallback beyond it. */
std::pair<Pose2d, TrackMode> track_step(TrackerState& state,
                                        const PoseGraph& snapshot,
                                        const Observation& obs, double elapsed_ms);

}  // namespace pgslam
