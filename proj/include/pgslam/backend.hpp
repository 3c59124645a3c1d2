#pragma once

#include <pgslam/config.hpp>
#include <pgslam/graph.hpp>

#include <map>
#include <utility>
#include <vector>

namespace pgslam {

using Cell = std::pair<long, long>;

/* Spatial hash from world position to integer grid cell. */
class GridIndex {
 public:
  explicit GridIndex(double cell_size = 1.0);

  double cell_size() const { return cell_size_; }
  Cell cell_of(double x, double y) const;

  /* Indexes every non-pruned node of the graph by its current pose. */
  void build(const PoseGraph& graph);

  const std::map<Cell, std::vector<int>>& cells() const { return cells_; }

  /* Non-pruned occupants of the node's cell and the 8 adjacent cells,
   * excluding the node itself; ascending id. */
  std::vector<int> neighbor_nodes(const PoseGraph& graph, int id) const;

  /* Average live nodes per occupied cell (freshly indexed). */
  static double npc(const PoseGraph& graph, double cell_size);

 private:
  double cell_size_;
  std::map<Cell, std::vector<int>> cells_;
  std::map<int, Cell> cell_by_node_;
};

struct PruneReport {
  long nodes_before = 0;
  long nodes_after = 0;
  long edges_before = 0;
  long edges_after = 0;
  std::vector<int> eliminated;
  double npc = 0;
  double elapsed_ms = 0;
};

/* Promotes the first unregistered node of the sliding window to a temporal
 * node: mean composed from the last registered node, covariance from
 * first-order compounding. Returns the promoted id. */
int make_temporal_node(PoseGraph& graph, int window, const Pose2d& delta,
                       const Mat3& delta_cov);
/* Variant deriving the step covariance from the connecting edge. */
int make_temporal_node(PoseGraph& graph, int window, const Pose2d& delta);

/* Total node weight: s-scaled information term plus (1-s)-scaled sum of
 * squared distances to grid neighbors. node_info reads the node's clamped
 * marginal information, edge_info sums incident edge information traces. */
double node_weight(const PoseGraph& graph, const GridIndex& grid, int id,
                   double s, WeightMode mode);

/* Recomputes node covariances by compounding along the strongest available
 * odometry chain from the smallest live node. */
void refresh_covariances(PoseGraph& graph);

/* Keeps the heaviest node of every multi-occupant cell, eliminates the rest,
 * reconnecting their neighbors with composed edges. */
PruneReport prune_cells(PoseGraph& graph, GridIndex& grid, double s, WeightMode mode);

/* Kruskal maximum-mutual-information spanning structure over the removable
 * (non-odometry) edges; returns the number of edges removed. */
int chow_liu_sparsify(PoseGraph& graph);

/* Mean relative position displacement, percent, over ids present in both
 * maps; reference positions shorter than 1e-6 m are excluded. */
double metric_arps(const std::map<int, Pose2d>& original,
                   const std::map<int, Pose2d>& pruned);

/* RMS translational error between two equal-length trajectories. */
double metric_t_rel(const std::vector<Pose2d>& estimate,
                    const std::vector<Pose2d>& truth);

}  // namespace pgslam
