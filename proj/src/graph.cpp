#include <pgslam/graph.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pgslam {

double mutual_information(const Mat3& cov) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  if (es.eigenvalues().minCoeff() > kSigmaEps) {
    return cov.inverse().norm();
  }
  const double det = cov.determinant();
  if (det == 0.0) return kWMax;
  return std::min(std::abs(1.0 / det), kWMax);
}

double edge_mutual_information(const Mat3& information) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(information);
  if (es.eigenvalues().maxCoeff() < 1.0 / kSigmaEps) {
    return information.norm();
  }
  return std::min(std::abs(information.determinant()), kWMax);
}

Mat3 information_from_covariance(const Mat3& cov) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  Vec3 inv;
  for (int i = 0; i < 3; ++i) {
    const double ev = es.eigenvalues()[i];
    inv[i] = (ev > 1.0 / kWMax) ? 1.0 / ev : kWMax;
  }
  Mat3 out = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return ((out + out.transpose()) / 2).eval();
}

Mat3 covariance_from_information(const Mat3& information) {
  return information_from_covariance(information);
}

int PoseGraph::add_node(const Pose2d& pose, const Mat3& cov, NodeSource source) {
  const int id = next_id_++;
  nodes_[id] = FrameNode{id, pose, cov, source, NodeStatus::unregistered};
  adjacency_[id];
  return id;
}

int PoseGraph::add_node_with_id(int id, const Pose2d& pose, const Mat3& cov,
                                NodeSource source) {
  if (nodes_.count(id))
    throw std::invalid_argument("duplicate node id " + std::to_string(id));
  nodes_[id] = FrameNode{id, pose, cov, source, NodeStatus::unregistered};
  adjacency_[id];
  next_id_ = std::max(next_id_, id + 1);
  return id;
}

int PoseGraph::add_edge(Edge edge) {
  for (int endpoint : {edge.from, edge.to}) {
    auto it = nodes_.find(endpoint);
    if (it == nodes_.end())
      throw std::invalid_argument("unknown node " + std::to_string(endpoint));
    if (it->second.status == NodeStatus::pruned)
      throw std::invalid_argument("pruned node " + std::to_string(endpoint));
  }
  if (edge.from == edge.to)
    throw std::invalid_argument("self edge on node " + std::to_string(edge.from));
  const int index = static_cast<int>(edges_.size());
  edges_.push_back(std::move(edge));
  adjacency_[edges_.back().from].push_back(index);
  adjacency_[edges_.back().to].push_back(index);
  return index;
}

int PoseGraph::add_zero_constraint(int a, int b) {
  Edge e;
  e.from = a;
  e.to = b;
  e.kind = EdgeKind::zero_constraint;
  e.measurement = Pose2d();
  e.information = kWMax * Mat3::Identity();
  return add_edge(std::move(e));
}

std::vector<int> PoseGraph::submap_nodes(const Pose2d& center, double side) const {
  if (side <= 0) throw std::invalid_argument("submap side must be positive");
  const double h = side / 2;
  std::vector<int> out;
  for (const auto& [id, n] : nodes_) {
    if (n.status == NodeStatus::pruned) continue;
    if (std::abs(n.pose.x - center.x) <= h && std::abs(n.pose.y - center.y) <= h)
      out.push_back(id);
  }
  return out;
}

const FrameNode& PoseGraph::node(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw std::invalid_argument("unknown node " + std::to_string(id));
  return it->second;
}

FrameNode& PoseGraph::node(int id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw std::invalid_argument("unknown node " + std::to_string(id));
  return it->second;
}

std::vector<int> PoseGraph::incident_edges(int id) const {
  std::vector<int> out;
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) return out;
  for (int e : it->second)
    if (edges_[e].alive) out.push_back(e);
  return out;
}

int PoseGraph::degree(int id) const {
  return static_cast<int>(incident_edges(id).size());
}

void PoseGraph::remove_edge(int index) {
  edges_.at(index).alive = false;
}

void PoseGraph::mark_pruned(int id) {
  FrameNode& n = node(id);
  for (int e : incident_edges(id)) edges_[e].alive = false;
  n.status = NodeStatus::pruned;
}

std::size_t PoseGraph::num_nodes() const {
  std::size_t n = 0;
  for (const auto& [id, node] : nodes_)
    if (node.status != NodeStatus::pruned) ++n;
  return n;
}

std::size_t PoseGraph::num_edges() const {
  std::size_t n = 0;
  for (const Edge& e : edges_)
    if (e.alive) ++n;
  return n;
}

std::vector<int> PoseGraph::node_ids() const {
  std::vector<int> out;
  for (const auto& [id, node] : nodes_)
    if (node.status != NodeStatus::pruned) out.push_back(id);
  return out;
}

std::vector<int> PoseGraph::live_edge_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i].alive) out.push_back(static_cast<int>(i));
  return out;
}

std::map<int, std::vector<int>> PoseGraph::recompute_adjacency() const {
  std::map<int, std::vector<int>> adj;
  for (const auto& [id, n] : nodes_) adj[id];
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    adj[edges_[i].from].push_back(static_cast<int>(i));
    adj[edges_[i].to].push_back(static_cast<int>(i));
  }
  return adj;
}

}  // namespace pgslam
