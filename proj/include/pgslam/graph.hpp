#pragma once

#include <pgslam/pose2.hpp>

#include <map>
#include <string>
#include <vector>

namespace pgslam {

/* Smallest covariance eigenvalue treated as invertible, and the global
 * information clamp that keeps degenerate edges finite. */
inline constexpr double kSigmaEps = 1e-9;
inline constexpr double kWMax = 1e12;

enum class NodeSource { wheel_imu, visual, lidar, synthetic };
enum class NodeStatus { unregistered, optimized, temporal, pruned };
enum class EdgeKind { odometry, loop_visual, loop_lidar, zero_constraint };
enum class KernelType { none, huber, max_mixture };

struct MixtureComponent {
  double weight;
  Mat3 information;
  Pose2d measurement;
};

struct FrameNode {
  int id = -1;
  Pose2d pose;
  Mat3 cov = Mat3::Zero();
  NodeSource source = NodeSource::wheel_imu;
  NodeStatus status = NodeStatus::unregistered;
};

struct Edge {
  int from = -1;
  int to = -1;
  EdgeKind kind = EdgeKind::odometry;
  Pose2d measurement;
  Mat3 information = Mat3::Identity();
  KernelType kernel = KernelType::none;
  double huber_delta = 1.0;
  std::vector<MixtureComponent> components;
  bool alive = true;
};

/* Mutual-information heuristic on a covariance: Frobenius norm of the inverse
 * when well conditioned, otherwise |1/det| clamped to kWMax. */
double mutual_information(const Mat3& cov);

/* Same heuristic evaluated directly on an information matrix. */
double edge_mutual_information(const Mat3& information);

/* Inverts a covariance with per-eigenvalue clamping so that singular
 * directions receive kWMax information instead of infinities. */
Mat3 information_from_covariance(const Mat3& cov);
Mat3 covariance_from_information(const Mat3& information);

/* Multigraph of frame nodes and relative-pose edges. Pruned nodes stay in the
 * table (ids are never reused) but drop out of every live view. */
class PoseGraph {
 public:
  int add_node(const Pose2d& pose, const Mat3& cov, NodeSource source);
  /* Dataset ingestion path: explicit id, must be fresh. */
  int add_node_with_id(int id, const Pose2d& pose, const Mat3& cov, NodeSource source);

  int add_edge(Edge edge);
  int add_zero_constraint(int a, int b);

  /* Non-pruned nodes inside the axis-aligned square window, ascending id. */
  std::vector<int> submap_nodes(const Pose2d& center, double side) const;

  bool has_node(int id) const { return nodes_.count(id) != 0; }
  const FrameNode& node(int id) const;
  FrameNode& node(int id);
  const std::map<int, FrameNode>& nodes() const { return nodes_; }

  const Edge& edge(int index) const { return edges_.at(index); }
  Edge& edge(int index) { return edges_.at(index); }
  std::size_t edge_storage_size() const { return edges_.size(); }

  /* Live incident edge indices, ascending. */
  std::vector<int> incident_edges(int id) const;
  int degree(int id) const;

  void remove_edge(int index);
  void mark_pruned(int id);

  std::size_t num_nodes() const;  // non-pruned
  std::size_t num_edges() const;  // alive

  std::vector<int> node_ids() const;           // non-pruned, ascending
  std::vector<int> live_edge_indices() const;  // alive, ascending

  /* Rebuilds adjacency from the edge list; used to cross-check the
   * incrementally maintained index. */
  std::map<int, std::vector<int>> recompute_adjacency() const;
  const std::map<int, std::vector<int>>& adjacency() const { return adjacency_; }

 private:
  std::map<int, FrameNode> nodes_;
  std::vector<Edge> edges_;
  std::map<int, std::vector<int>> adjacency_;
  int next_id_ = 0;
};

}  // namespace pgslam
