#include <pgslam/backend.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

namespace pgslam {

namespace {

/* Measurement of the edge oriented so it runs from `tail`, with its
 * covariance transported accordingly. */
struct OrientedStep {
  Pose2d z;
  Mat3 cov;
};

OrientedStep oriented(const Edge& e, int tail) {
  OrientedStep s;
  const Mat3 cov = covariance_from_information(e.information);
  if (e.from == tail) {
    s.z = e.measurement;
    s.cov = cov;
  } else {
    s.z = inverse(e.measurement);
    s.cov = inverse_covariance(e.measurement, cov);
  }
  return s;
}

EdgeKind composite_kind(EdgeKind a, EdgeKind b) {
  auto chainlike = [](EdgeKind k) {
    return k == EdgeKind::odometry || k == EdgeKind::zero_constraint;
  };
  if (a == EdgeKind::zero_constraint && b == EdgeKind::zero_constraint)
    return EdgeKind::zero_constraint;
  if (chainlike(a) && chainlike(b)) return EdgeKind::odometry;
  return a == EdgeKind::odometry || a == EdgeKind::zero_constraint ? b : a;
}

}  // namespace

GridIndex::GridIndex(double cell_size) : cell_size_(cell_size) {
  if (cell_size <= 0) throw std::invalid_argument("cell size must be positive");
}

Cell GridIndex::cell_of(double x, double y) const {
  return {static_cast<long>(std::floor(x / cell_size_)),
          static_cast<long>(std::floor(y / cell_size_))};
}

void GridIndex::build(const PoseGraph& graph) {
  cells_.clear();
  cell_by_node_.clear();
  for (int id : graph.node_ids()) {
    const FrameNode& n = graph.node(id);
    Cell c = cell_of(n.pose.x, n.pose.y);
    cells_[c].push_back(id);
    cell_by_node_[id] = c;
  }
}

std::vector<int> GridIndex::neighbor_nodes(const PoseGraph& graph, int id) const {
  std::vector<int> out;
  auto it = cell_by_node_.find(id);
  if (it == cell_by_node_.end()) return out;
  const Cell c = it->second;
  for (long dx = -1; dx <= 1; ++dx)
    for (long dy = -1; dy <= 1; ++dy) {
      auto cit = cells_.find({c.first + dx, c.second + dy});
      if (cit == cells_.end()) continue;
      for (int other : cit->second) {
        if (other == id) continue;
        if (graph.node(other).status == NodeStatus::pruned) continue;
        out.push_back(other);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

double GridIndex::npc(const PoseGraph& graph, double cell_size) {
  GridIndex g(cell_size);
  g.build(graph);
  if (g.cells_.empty()) return 0;
  std::size_t total = 0;
  for (const auto& [cell, nodes] : g.cells_) total += nodes.size();
  return static_cast<double>(total) / static_cast<double>(g.cells_.size());
}

int make_temporal_node(PoseGraph& graph, int window, const Pose2d& delta,
                       const Mat3& delta_cov) {
  std::vector<int> unregistered;
  for (int id : graph.node_ids())
    if (graph.node(id).status == NodeStatus::unregistered) unregistered.push_back(id);
  if (static_cast<int>(unregistered.size()) < window)
    throw std::runtime_error("insufficient window: need " + std::to_string(window) +
                             " unregistered nodes, have " +
                             std::to_string(unregistered.size()));
  const int f = unregistered.front();

  int base = -1;
  for (int id : graph.node_ids()) {
    if (id >= f) break;
    const NodeStatus st = graph.node(id).status;
    if (st == NodeStatus::optimized || st == NodeStatus::temporal) base = id;
  }
  if (base < 0)
    throw std::runtime_error("no registered node precedes node " + std::to_string(f));

  const FrameNode& b = graph.node(base);
  FrameNode& node = graph.node(f);
  node.pose = compose(b.pose, delta);
  node.cov = compound_covariance(b.pose, b.cov, delta, delta_cov);
  node.status = NodeStatus::temporal;
  return f;
}

int make_temporal_node(PoseGraph& graph, int window, const Pose2d& delta) {
  std::vector<int> unregistered;
  for (int id : graph.node_ids())
    if (graph.node(id).status == NodeStatus::unregistered) unregistered.push_back(id);
  if (static_cast<int>(unregistered.size()) < window)
    throw std::runtime_error("insufficient window: need " + std::to_string(window) +
                             " unregistered nodes, have " +
                             std::to_string(unregistered.size()));
  const int f = unregistered.front();

  Mat3 delta_cov = Mat3::Zero();
  double best_trace = -1;
  for (int ei : graph.incident_edges(f)) {
    const Edge& e = graph.edge(ei);
    if (e.kind != EdgeKind::odometry) continue;
    const int other = e.from == f ? e.to : e.from;
    if (other >= f) continue;
    const double tr = e.information.trace();
    if (tr > best_trace) {
      best_trace = tr;
      delta_cov = oriented(e, other).cov;
    }
  }
  return make_temporal_node(graph, window, delta, delta_cov);
}

double node_weight(const PoseGraph& graph, const GridIndex& grid, int id,
                   double s, WeightMode mode) {
  const FrameNode& n = graph.node(id);
  double geometric = 0;
  for (int other : grid.neighbor_nodes(graph, id)) {
    const FrameNode& m = graph.node(other);
    const double dx = m.pose.x - n.pose.x, dy = m.pose.y - n.pose.y;
    geometric += dx * dx + dy * dy;
  }

  double informational = 0;
  if (mode == WeightMode::node_info) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(n.cov);
    informational = es.eigenvalues().minCoeff() > kSigmaEps
                        ? n.cov.inverse().trace()
                        : kWMax;
  } else {
    for (int ei : graph.incident_edges(id))
      informational += graph.edge(ei).information.trace();
  }
  return s * informational + (1 - s) * geometric;
}

void refresh_covariances(PoseGraph& graph) {
  const std::vector<int> ids = graph.node_ids();
  if (ids.empty()) return;
  const int root = ids.front();

  /* Prim-style growth along the strongest odometry links. */
  std::set<int> visited{root};
  /* (-trace, edge index, discovered endpoint) */
  std::set<std::tuple<double, int, int>> frontier;
  auto push_edges = [&](int id) {
    for (int ei : graph.incident_edges(id)) {
      const Edge& e = graph.edge(ei);
      if (e.kind != EdgeKind::odometry && e.kind != EdgeKind::zero_constraint)
        continue;
      const int other = e.from == id ? e.to : e.from;
      if (!visited.count(other))
        frontier.insert({-e.information.trace(), ei, other});
    }
  };
  push_edges(root);
  while (!frontier.empty()) {
    auto [negtrace, ei, child] = *frontier.begin();
    frontier.erase(frontier.begin());
    if (visited.count(child)) continue;
    const Edge& e = graph.edge(ei);
    const int parent = e.from == child ? e.to : e.from;
    const OrientedStep step = oriented(e, parent);
    const FrameNode& p = graph.node(parent);
    graph.node(child).cov = compound_covariance(p.pose, p.cov, step.z, step.cov);
    visited.insert(child);
    push_edges(child);
  }
}

namespace {

void eliminate_node(PoseGraph& graph, int victim) {
  const std::vector<int> incident = graph.incident_edges(victim);
  struct Composite {
    int a, b;
    Pose2d z;
    Mat3 cov;
    EdgeKind kind;
  };
  std::map<std::pair<int, int>, std::vector<Composite>> grouped;
  for (std::size_t i = 0; i < incident.size(); ++i) {
    const Edge& ei = graph.edge(incident[i]);
    const int a = ei.from == victim ? ei.to : ei.from;
    for (std::size_t j = i + 1; j < incident.size(); ++j) {
      const Edge& ej = graph.edge(incident[j]);
      const int b = ej.from == victim ? ej.to : ej.from;
      if (a == b) continue;

      const OrientedStep in = oriented(ei, a);    // a -> victim
      const OrientedStep out = oriented(ej, victim);  // victim -> b
      Composite c;
      c.z = compose(in.z, out.z);
      c.cov = compound_covariance(in.z, in.cov, out.z, out.cov);
      c.kind = composite_kind(ei.kind, ej.kind);
      c.a = a;
      c.b = b;
      if (a > b) {
        c.cov = inverse_covariance(c.z, c.cov);
        c.z = inverse(c.z);
        std::swap(c.a, c.b);
      }
      grouped[{c.a, c.b}].push_back(c);
    }
  }

  for (auto& [pair, composites] : grouped) {
    /* Parallel composites of the same kind fuse by summed information. */
    std::vector<Composite> merged;
    for (const Composite& c : composites) {
      bool fused = false;
      for (Composite& m : merged) {
        if (m.kind != c.kind) continue;
        const Mat3 la = information_from_covariance(m.cov);
        const Mat3 lb = information_from_covariance(c.cov);
        Vec3 vb = c.z.vec();
        vb[2] = m.z.theta + wrap_angle(vb[2] - m.z.theta);
        const Mat3 lsum = la + lb;
        const Vec3 blend = lsum.ldlt().solve(la * m.z.vec() + lb * vb);
        m.z = Pose2d(blend[0], blend[1], blend[2]);
        m.cov = covariance_from_information(lsum);
        fused = true;
        break;
      }
      if (!fused) merged.push_back(c);
    }
    for (const Composite& c : merged) {
      Edge e;
      e.from = c.a;
      e.to = c.b;
      e.kind = c.kind;
      e.measurement = c.kind == EdgeKind::zero_constraint ? Pose2d() : c.z;
      e.information = c.kind == EdgeKind::zero_constraint
                          ? kWMax * Mat3::Identity()
                          : information_from_covariance(c.cov);
      if (c.kind == EdgeKind::loop_visual || c.kind == EdgeKind::loop_lidar) {
        e.kernel = KernelType::huber;
        e.huber_delta = 0;  // defer to the optimizer config
      }
      graph.add_edge(std::move(e));
    }
  }
  graph.mark_pruned(victim);
}

}  // namespace

PruneReport prune_cells(PoseGraph& graph, GridIndex& grid, double s, WeightMode mode) {
  const auto start = std::chrono::steady_clock::now();
  PruneReport report;
  report.nodes_before = static_cast<long>(graph.num_nodes());
  report.edges_before = static_cast<long>(graph.num_edges());

  grid.build(graph);
  bool covariances_stale = false;
  /* snapshot: cells_ iteration order is already deterministic */
  for (const auto& [cell, occupants] : grid.cells()) {
    std::vector<int> live;
    for (int id : occupants)
      if (graph.node(id).status != NodeStatus::pruned) live.push_back(id);
    if (live.size() < 2) continue;

    if (mode == WeightMode::node_info && covariances_stale) {
      refresh_covariances(graph);
      covariances_stale = false;
    }
    int keep = live.front();
    double best = -1;
    for (int id : live) {
      const double w = node_weight(graph, grid, id, s, mode);
      if (w > best) {
        best = w;
        keep = id;
      }
    }
    for (int id : live) {
      if (id == keep) continue;
      eliminate_node(graph, id);
      report.eliminated.push_back(id);
      covariances_stale = true;
    }
  }
  refresh_covariances(graph);

  report.nodes_after = static_cast<long>(graph.num_nodes());
  report.edges_after = static_cast<long>(graph.num_edges());
  report.npc = GridIndex::npc(graph, grid.cell_size());
  report.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return report;
}

int chow_liu_sparsify(PoseGraph& graph) {
  struct Removable {
    double mi;
    int index;
  };
  std::vector<Removable> removable;
  for (int ei : graph.live_edge_indices()) {
    const Edge& e = graph.edge(ei);
    if (e.kind == EdgeKind::odometry) continue;
    removable.push_back({edge_mutual_information(e.information), ei});
  }
  std::sort(removable.begin(), removable.end(), [](const Removable& a, const Removable& b) {
    if (a.mi != b.mi) return a.mi > b.mi;
    return a.index < b.index;
  });

  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  int removed = 0;
  for (const Removable& r : removable) {
    const Edge& e = graph.edge(r.index);
    const int ra = find(e.from), rb = find(e.to);
    if (ra == rb) {
      graph.remove_edge(r.index);
      ++removed;
    } else {
      parent[ra] = rb;
    }
  }
  return removed;
}

double metric_arps(const std::map<int, Pose2d>& original,
                   const std::map<int, Pose2d>& pruned) {
  double sum = 0;
  long count = 0;
  for (const auto& [id, po] : original) {
    auto it = pruned.find(id);
    if (it == pruned.end()) continue;
    const double norm_ori = std::hypot(po.x, po.y);
    if (norm_ori < 1e-6) continue;
    const double shift = std::hypot(po.x - it->second.x, po.y - it->second.y);
    sum += shift / norm_ori;
    ++count;
  }
  if (count == 0) throw std::runtime_error("arps: no comparable nodes");
  return sum / static_cast<double>(count) * 100.0;
}

double metric_t_rel(const std::vector<Pose2d>& estimate,
                    const std::vector<Pose2d>& truth) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("t_rel: trajectory length mismatch (" +
                                std::to_string(estimate.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  if (estimate.empty()) return 0;
  double acc = 0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double dx = truth[i].x - estimate[i].x;
    const double dy = truth[i].y - estimate[i].y;
    acc += dx * dx + dy * dy;
  }
  return std::sqrt(acc / static_cast<double>(estimate.size()));
}

}  // namespace pgslam
