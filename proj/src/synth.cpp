#include <pgslam/synth.hpp>

#include <cmath>
#include <random>

namespace pgslam {

namespace {

std::array<double, 6> diag_info(double ixx, double iyy, double itt) {
  return {ixx, 0.0, 0.0, iyy, 0.0, itt};
}

/* Poses along a point path, headed at the next point; the last pose keeps the
 * previous heading. */
std::vector<Pose2d> posed_path(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<Pose2d> poses;
  poses.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double heading;
    if (i + 1 < pts.size()) {
      const Eigen::Vector2d d = pts[i + 1] - pts[i];
      heading = std::atan2(d.y(), d.x());
    } else {
      heading = poses.back().theta;
    }
    poses.emplace_back(pts[i].x(), pts[i].y(), heading);
  }
  return poses;
}

void dead_reckon_vertices(DatasetRecord& record, const Pose2d& start,
                          int first_id) {
  record.vertices.clear();
  Pose2d cur = start;
  record.vertices.push_back({first_id, cur.x, cur.y, cur.theta});
  for (const DatasetEdge& e : record.edges) {
    if (e.to != e.from + 1) continue;
    cur = compose(cur, Pose2d(e.dx, e.dy, e.dtheta));
    record.vertices.push_back({e.to, cur.x, cur.y, cur.theta});
  }
}

}  // namespace

SynthDataset serpentine_survey(unsigned seed) {
  constexpr int kRows = 18;
  constexpr int kCols = 40;
  constexpr int kPoses = 989;
  constexpr int kLoops = 229;
  const double sxy = 0.015;
  const double sth = 0.2 * M_PI / 180;
  const double lxy = 0.01;
  const double lth = 0.1 * M_PI / 180;

  std::vector<Eigen::Vector2d> pts;
  for (int r = 0; r < kRows; ++r) {
    if (r % 2 == 0)
      for (int x = 0; x < kCols; ++x) pts.push_back({double(x), double(r)});
    else
      for (int x = kCols - 1; x >= 0; --x) pts.push_back({double(x), double(r)});
  }
  const int first_pass = static_cast<int>(pts.size());

  /* return pass over the top rows, offset inside the same cells */
  bool ascending = true;
  for (int r = kRows - 1; r >= 0 && static_cast<int>(pts.size()) < kPoses; --r) {
    if (ascending)
      for (int x = 1; x < kCols && static_cast<int>(pts.size()) < kPoses; ++x)
        pts.push_back({double(x), r + 0.35});
    else
      for (int x = kCols - 2; x >= 0 && static_cast<int>(pts.size()) < kPoses; --x)
        pts.push_back({double(x), r + 0.35});
    ascending = !ascending;
  }

  const std::vector<Pose2d> gt = posed_path(pts);

  std::mt19937 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);

  SynthDataset out;
  for (std::size_t i = 0; i + 1 < gt.size(); ++i) {
    const Pose2d step = inverse_compose(gt[i], gt[i + 1]);
    DatasetEdge e;
    e.from = static_cast<int>(i);
    e.to = static_cast<int>(i + 1);
    e.dx = step.x + sxy * n01(rng);
    e.dy = step.y + sxy * n01(rng);
    e.dtheta = step.theta + sth * n01(rng);
    e.info = diag_info(1.0 / (sxy * sxy), 1.0 / (sxy * sxy), 1.0 / (sth * sth));
    out.record.edges.push_back(e);
  }

  const int revisit = kPoses - first_pass;
  int emitted = 0;
  for (int i = 0; i < revisit; ++i) {
    if ((i + 1) * kLoops / revisit <= i * kLoops / revisit) continue;
    const int b = first_pass + i;
    const int row = static_cast<int>(std::floor(pts[b].y()));
    const int x = static_cast<int>(std::lround(pts[b].x()));
    const int a = row % 2 == 0 ? row * kCols + x : row * kCols + (kCols - 1 - x);
    const Pose2d z = inverse_compose(gt[a], gt[b]);
    DatasetEdge e;
    e.from = a;
    e.to = b;
    e.dx = z.x + lxy * n01(rng);
    e.dy = z.y + lxy * n01(rng);
    e.dtheta = z.theta + lth * n01(rng);
    e.info = diag_info(1.0 / (lxy * lxy), 1.0 / (lxy * lxy), 1.0 / (lth * lth));
    out.record.edges.push_back(e);
    ++emitted;
  }
  (void)emitted;

  dead_reckon_vertices(out.record, gt.front(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i)
    out.ground_truth.emplace(static_cast<int>(i), gt[i]);
  return out;
}

TrackerScenario tracker_circuit(unsigned seed) {
  constexpr int kLap = 100;
  constexpr int kSteps = 500;
  constexpr int kLoopEvery = 50;
  constexpr int kReplayBase = 1000;
  const double step_len = 0.4;
  const double sxy = 0.02;
  const double sth = 0.5 * M_PI / 180;
  const double lxy = 0.01;
  const double lth = 0.1 * M_PI / 180;

  /* square circuit, 25 steps per side */
  std::vector<Eigen::Vector2d> circuit;
  const int side = kLap / 4;
  const double len = side * step_len;
  for (int k = 0; k < side; ++k) circuit.push_back({k * step_len, 0.0});
  for (int k = 0; k < side; ++k) circuit.push_back({len, k * step_len});
  for (int k = 0; k < side; ++k) circuit.push_back({len - k * step_len, len});
  for (int k = 0; k < side; ++k) circuit.push_back({0.0, len - k * step_len});

  std::vector<Pose2d> lap = posed_path(circuit);
  /* circular heading: the last pose heads back to the start */
  {
    const Eigen::Vector2d d = circuit.front() - circuit.back();
    lap.back() = Pose2d(circuit.back().x(), circuit.back().y(),
                        std::atan2(d.y(), d.x()));
  }

  TrackerScenario out;
  const double tight_xy = 1e4;
  const double tight_th = 1e6;
  for (int k = 0; k < kLap; ++k)
    out.map_record.vertices.push_back({k, lap[k].x, lap[k].y, lap[k].theta});
  for (int k = 0; k + 1 < kLap; ++k) {
    const Pose2d step = inverse_compose(lap[k], lap[k + 1]);
    DatasetEdge e;
    e.from = k;
    e.to = k + 1;
    e.dx = step.x;
    e.dy = step.y;
    e.dtheta = step.theta;
    e.info = diag_info(tight_xy, tight_xy, tight_th);
    out.map_record.edges.push_back(e);
  }
  {
    const Pose2d close = inverse_compose(lap[kLap - 1], lap[0]);
    DatasetEdge e;
    e.from = 0;
    e.to = kLap - 1;
    const Pose2d z = inverse(close);
    e.dx = z.x;
    e.dy = z.y;
    e.dtheta = z.theta;
    e.info = diag_info(tight_xy, tight_xy, tight_th);
    out.map_record.edges.push_back(e);
  }

  std::mt19937 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);

  out.ground_truth.reserve(kSteps + 1);
  for (int k = 0; k <= kSteps; ++k) out.ground_truth.push_back(lap[k % kLap]);

  for (int k = 0; k < kSteps; ++k) {
    const Pose2d step = inverse_compose(out.ground_truth[k], out.ground_truth[k + 1]);
    DatasetEdge e;
    e.from = kReplayBase + k;
    e.to = kReplayBase + k + 1;
    e.dx = step.x + sxy * n01(rng);
    e.dy = step.y + sxy * n01(rng);
    e.dtheta = step.theta + sth * n01(rng);
    e.info = diag_info(1.0 / (sxy * sxy), 1.0 / (sxy * sxy), 1.0 / (sth * sth));
    out.replay_record.edges.push_back(e);
  }
  for (int k = kLoopEvery; k <= kSteps; k += kLoopEvery) {
    const int map_node = k % kLap;
    const Pose2d z = inverse_compose(lap[map_node], out.ground_truth[k]);
    DatasetEdge e;
    e.from = map_node;
    e.to = kReplayBase + k;
    e.dx = z.x + lxy * n01(rng);
    e.dy = z.y + lxy * n01(rng);
    e.dtheta = z.theta + lth * n01(rng);
    e.info = diag_info(1.0 / (lxy * lxy), 1.0 / (lxy * lxy), 1.0 / (lth * lth));
    out.replay_record.edges.push_back(e);
  }

  dead_reckon_vertices(out.replay_record, out.ground_truth.front(), kReplayBase);
  /* dead reckoning only walks odometry edges; loop rows above do not shift it */
  return out;
}

}  // namespace pgslam
