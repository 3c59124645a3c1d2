#pragma once

#include <pgslam/graph.hpp>

#include <array>
#include <string>
#include <vector>

namespace pgslam {

struct DatasetVertex {
  int id;
  double x, y, theta;
};

struct DatasetEdge {
  int from, to;
  double dx, dy, dtheta;
  /* row-major upper triangle: i11 i12 i13 i22 i23 i33 */
  std::array<double, 6> info;
};

struct DatasetRecord {
  std::vector<DatasetVertex> vertices;
  std::vector<DatasetEdge> edges;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

DatasetRecord parse_g2o(const std::string& text);
DatasetRecord load_g2o_file(const std::string& path);

Mat3 information_matrix(const DatasetEdge& e);

/* Builds a pose graph from a record: consecutive-id edges become odometry,
 * everything else loop closures. Marginally indefinite information matrices
 * are repaired by eigenvalue clamping (warned on stderr). */
PoseGraph build_graph(const DatasetRecord& record,
                      EdgeKind loop_kind = EdgeKind::loop_lidar);

std::string write_g2o(const PoseGraph& graph);
void write_g2o_file(const PoseGraph& graph, const std::string& path);

std::string write_g2o(const DatasetRecord& record);
void write_g2o_file(const DatasetRecord& record, const std::string& path);

}  // namespace pgslam
