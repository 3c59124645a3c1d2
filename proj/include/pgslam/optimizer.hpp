#pragma once

#include <pgslam/graph.hpp>

namespace pgslam {

struct OptimizeConfig {
  int max_iter = 100;
  double tol = 1e-9;
  double huber_delta = 1.0;
  int gauge = -1;  // -1 selects the smallest non-pruned id
};

struct OptimizeResult {
  int iterations = 0;
  double initial_cost = 0;
  double final_cost = 0;
};

/* Robust sparse pose-graph optimization. Plain edges contribute quadratic
 * residual cost, huber edges an IRLS-reweighted Huber loss, and max_mixture
 * edges pick their best component every evaluation. The gauge node is held
 * fixed; accepted steps never increase the objective. */
OptimizeResult optimize(PoseGraph& graph, const OptimizeConfig& config = {});

/* Objective value at the graph's current poses (with component selection). */
double graph_cost(const PoseGraph& graph, const OptimizeConfig& config = {});

/* Residual of one edge at given endpoint poses, in the measurement frame. */
Vec3 edge_residual(const Pose2d& xi, const Pose2d& xj, const Pose2d& z);

/* Analytic Jacobians of edge_residual wrt xi and xj. */
void edge_jacobians(const Pose2d& xi, const Pose2d& xj, const Pose2d& z,
                    Mat3& ji, Mat3& jj);

/* Index of the max_mixture component the edge would select at the current
 * poses; -1 for non-mixture edges. */
int selected_component(const PoseGraph& graph, int edge_index);

}  // namespace pgslam
