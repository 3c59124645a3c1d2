#include <pgslam/tracker.hpp>

#include <pgslam/optimizer.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pgslam {

namespace {

struct Chain {
  Pose2d z;
  Mat3 cov;
};

Chain advance(const Chain& chain, const Pose2d& odometry, const Mat3& odometry_cov) {
  Chain out;
  out.z = compose(chain.z, odometry);
  out.cov = compound_covariance(chain.z, chain.cov, odometry, odometry_cov);
  return out;
}

/* Quadratic factor tying the unknown pose to `base ⊕ chain`. */
struct Factor {
  Pose2d base;
  Pose2d z;
  Mat3 information;
  bool huber = false;
  double delta = 1.0;
};

double factor_cost(const Factor& f, const Pose2d& x) {
  const Vec3 r = edge_residual(f.base, x, f.z);
  const double q = r.dot(f.information * r);
  if (!f.huber) return 0.5 * q;
  const double u = std::sqrt(std::max(q, 0.0));
  return u <= f.delta ? 0.5 * u * u : f.delta * (u - 0.5 * f.delta);
}

void reset_anchor_chain(TrackerState& state, const PoseGraph& snapshot) {
  const FrameNode& a = snapshot.node(state.anchor);
  state.odom_since_anchor = inverse_compose(a.pose, state.last_pgo);
  state.cov_since_anchor = state.last_pgo_cov;
}

void integrate_chains(TrackerState& state, const Observation& obs) {
  const Mat3 odo_cov = covariance_from_information(obs.odometry_info);
  Chain ref{state.odom_since_reference, state.cov_since_reference};
  ref = advance(ref, obs.odometry, odo_cov);
  state.odom_since_reference = ref.z;
  state.cov_since_reference = ref.cov;
  Chain anc{state.odom_since_anchor, state.cov_since_anchor};
  anc = advance(anc, obs.odometry, odo_cov);
  state.odom_since_anchor = anc.z;
  state.cov_since_anchor = anc.cov;
}

}  // namespace

int select_anchor(const PoseGraph& snapshot, const Pose2d& last_pgo,
                  const Mat3& last_pgo_cov) {
  int best = -1;
  double best_d = 0;
  for (int id : snapshot.node_ids()) {
    const FrameNode& n = snapshot.node(id);
    if (n.status != NodeStatus::optimized) continue;
    const double d = smd(last_pgo, n.pose, (n.cov + last_pgo_cov).eval());
    if (best < 0 || d < best_d) {
      best = id;
      best_d = d;
    }
  }
  if (best < 0)
    throw std::runtime_error("tracker cannot start: snapshot has no optimized node");
  return best;
}

void init_tracker(TrackerState& state, const PoseGraph& snapshot,
                  const Pose2d& start, const Mat3& start_cov) {
  state.last_pgo = start;
  state.last_pgo_cov = start_cov + 1e-9 * Mat3::Identity();
  state.anchor = select_anchor(snapshot, start, start_cov);
  state.reference = snapshot.node(state.anchor).pose;
  state.odom_since_reference = inverse_compose(state.reference, start);
  state.cov_since_reference = start_cov;
  reset_anchor_chain(state, snapshot);
  state.estimate = start;
  state.last_odometry = start;
  state.correction = Pose2d();
  state.started = true;
  state.low_confidence = false;
}

Pose2d predict(const TrackerState& state, const Observation& obs) {
  return compose(state.estimate, obs.odometry);
}

EstimateResult estimate_global_pose(TrackerState& state, const PoseGraph& snapshot,
                                    const Observation& obs) {
  if (!state.started || state.anchor < 0 ||
      !snapshot.has_node(state.anchor))
    throw std::runtime_error("tracker not initialized against the snapshot");

  const Pose2d predicted = predict(state, obs);
  const Mat3 odo_cov = covariance_from_information(obs.odometry_info);

  Chain ref = advance({state.odom_since_reference, state.cov_since_reference},
                      obs.odometry, odo_cov);
  Chain anc = advance({state.odom_since_anchor, state.cov_since_anchor},
                      obs.odometry, odo_cov);

  std::vector<Factor> factors;
  factors.push_back({state.reference, ref.z,
                     information_from_covariance(ref.cov), false, 0});
  const FrameNode& anchor_node = snapshot.node(state.anchor);
  const Mat3 anchor_cov = compound_covariance(anchor_node.pose, anchor_node.cov,
                                              anc.z, anc.cov);
  factors.push_back({anchor_node.pose, anc.z,
                     information_from_covariance(anchor_cov), false, 0});

  const std::vector<int> submap = snapshot.submap_nodes(predicted, state.submap_side);
  for (const LoopCandidate& lc : obs.loop_candidates) {
    if (!std::binary_search(submap.begin(), submap.end(), lc.node)) continue;
    factors.push_back({snapshot.node(lc.node).pose, lc.measurement, lc.information,
                       true, state.huber_delta});
  }

  auto total = [&](const Pose2d& x) {
    double c = 0;
    for (const Factor& f : factors) c += factor_cost(f, x);
    return c;
  };

  Pose2d x = predicted;
  double cost = total(x);
  Mat3 h_final = Mat3::Zero();
  bool low_confidence = true;
  int iter = 0;
  for (; iter < 50; ++iter) {
    Mat3 h = Mat3::Zero();
    Vec3 b = Vec3::Zero();
    for (const Factor& f : factors) {
      const Vec3 r = edge_residual(f.base, x, f.z);
      Mat3 ji, jj;
      edge_jacobians(f.base, x, f.z, ji, jj);
      Mat3 lam = f.information;
      if (f.huber) {
        const double u = std::sqrt(std::max(r.dot(lam * r), 0.0));
        if (u > f.delta && u > 0) lam *= f.delta / u;
      }
      h += jj.transpose() * lam * jj;
      b += jj.transpose() * lam * r;
    }
    h_final = h;
    Eigen::LDLT<Mat3> ldlt(h);
    if (ldlt.info() != Eigen::Success || h.determinant() <= 0)
      throw std::runtime_error("tracker: underconstrained pose problem");
    Vec3 step = ldlt.solve(-b);

    double scale = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 20; ++halving) {
      Pose2d cand(x.x + scale * step[0], x.y + scale * step[1],
                  x.theta + scale * step[2]);
      const double cc = total(cand);
      if (cc <= cost) {
        x = cand;
        cost = cc;
        moved = true;
        break;
      }
      scale /= 2;
    }
    if (!moved || step.norm() < 1e-8) {
      low_confidence = false;
      if (moved) ++iter;
      break;
    }
  }

  EstimateResult result;
  result.pose = x;
  result.iterations = iter;
  result.low_confidence = low_confidence;
  Eigen::LDLT<Mat3> ldlt(h_final);
  result.cov = ldlt.solve(Mat3::Identity());
  result.cov = ((result.cov + result.cov.transpose()) / 2).eval();

  /* commit */
  state.odom_since_reference = ref.z;
  state.cov_since_reference = ref.cov;
  state.last_odometry = compose(state.last_odometry, obs.odometry);
  state.estimate = x;
  state.last_pgo = x;
  state.last_pgo_cov = result.cov + 1e-9 * Mat3::Identity();
  state.low_confidence = low_confidence;
  apply_correction_cache(state, x, state.last_odometry);
  const int new_anchor = select_anchor(snapshot, state.last_pgo, state.last_pgo_cov);
  state.anchor = new_anchor;
  reset_anchor_chain(state, snapshot);
  return result;
}

Pose2d apply_correction_cache(TrackerState& state, const Pose2d& estimated,
                              const Pose2d& raw_odometry_pose) {
  state.correction = compose(estimated, inverse(raw_odometry_pose));
  return state.correction;
}

Pose2d worst_case_predict(TrackerState& state, const Pose2d& new_raw_odometry) {
  if (!state.started) return new_raw_odometry;
  const Pose2d increment = inverse_compose(state.last_odometry, new_raw_odometry);
  const Pose2d predicted = compose(state.estimate, increment);
  state.estimate = predicted;
  state.last_odometry = new_raw_odometry;
  return predicted;
}

std::pair<Pose2d, TrackMode> track_step(TrackerState& state,
                                        const PoseGraph& snapshot,
                                        const Observation& obs, double elapsed_ms) {
  if (elapsed_ms <= state.deadline_ms) {
    EstimateResult r = estimate_global_pose(state, snapshot, obs);
    return {r.pose, TrackMode::estimated};
  }
  integrate_chains(state, obs);
  const Pose2d new_raw = compose(state.last_odometry, obs.odometry);
  const Pose2d pose = worst_case_predict(state, new_raw);
  return {pose, TrackMode::fallback};
}

}  // namespace pgslam
