#include <pgslam/optimizer.hpp>

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace pgslam {

namespace {

struct EffectiveFactor {
  Pose2d z;
  Mat3 information;
  double scale = 1.0;  // IRLS weight for huber edges
};

double huber_cost(double u, double delta) {
  return u <= delta ? 0.5 * u * u : delta * (u - 0.5 * delta);
}

double component_score(const MixtureComponent& c, const Vec3& r) {
  return 0.5 * r.dot(c.information * r) - std::log(c.weight) -
         0.5 * std::log(c.information.determinant());
}

/* Picks the edge's active measurement model at the given endpoint poses and
 * returns its cost contribution. */
double edge_cost_and_factor(const Edge& e, const Pose2d& xi, const Pose2d& xj,
                            double default_delta, EffectiveFactor* out) {
  if (e.kernel == KernelType::max_mixture) {
    double best = 0;
    int best_idx = -1;
    for (std::size_t c = 0; c < e.components.size(); ++c) {
      const Vec3 r = edge_residual(xi, xj, e.components[c].measurement);
      const double score = component_score(e.components[c], r);
      if (best_idx < 0 || score < best) {
        best = score;
        best_idx = static_cast<int>(c);
      }
    }
    if (best_idx < 0) throw std::logic_error("max_mixture edge without components");
    if (out) {
      out->z = e.components[best_idx].measurement;
      out->information = e.components[best_idx].information;
      out->scale = 1.0;
    }
    return best;
  }
  const Vec3 r = edge_residual(xi, xj, e.measurement);
  const double q = r.dot(e.information * r);
  if (e.kernel == KernelType::huber) {
    const double delta = e.huber_delta > 0 ? e.huber_delta : default_delta;
    const double u = std::sqrt(std::max(q, 0.0));
    if (out) {
      out->z = e.measurement;
      out->information = e.information;
      out->scale = (u <= delta || u == 0.0) ? 1.0 : delta / u;
    }
    return huber_cost(u, delta);
  }
  if (out) {
    out->z = e.measurement;
    out->information = e.information;
    out->scale = 1.0;
  }
  return 0.5 * q;
}

int resolve_gauge(const PoseGraph& g, const OptimizeConfig& cfg) {
  if (cfg.gauge >= 0) {
    if (!g.has_node(cfg.gauge) || g.node(cfg.gauge).status == NodeStatus::pruned)
      throw std::invalid_argument("gauge node " + std::to_string(cfg.gauge) +
                                  " is not a live node");
    return cfg.gauge;
  }
  for (int id : g.node_ids()) return id;
  throw std::invalid_argument("optimize: empty graph");
}

void check_connected(const PoseGraph& g, int gauge) {
  std::unordered_map<int, bool> seen;
  std::deque<int> queue{gauge};
  seen[gauge] = true;
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    for (int ei : g.incident_edges(id)) {
      const Edge& e = g.edge(ei);
      int other = e.from == id ? e.to : e.from;
      if (!seen[other]) {
        seen[other] = true;
        queue.push_back(other);
      }
    }
  }
  for (int id : g.node_ids())
    if (!seen[id])
      throw std::runtime_error("disconnected gauge: node " + std::to_string(id) +
                               " unreachable from node " + std::to_string(gauge));
}

double total_cost(const PoseGraph& g,
                  const std::unordered_map<int, Pose2d>& poses,
                  const OptimizeConfig& cfg) {
  double cost = 0;
  for (int ei : g.live_edge_indices()) {
    const Edge& e = g.edge(ei);
    cost += edge_cost_and_factor(e, poses.at(e.from), poses.at(e.to),
                                 cfg.huber_delta, nullptr);
  }
  return cost;
}

}  // namespace

Vec3 edge_residual(const Pose2d& xi, const Pose2d& xj, const Pose2d& z) {
  const Pose2d h = inverse_compose(xi, xj);
  return inverse_compose(z, h).vec();
}

void edge_jacobians(const Pose2d& xi, const Pose2d& xj, const Pose2d& z,
                    Mat3& ji, Mat3& jj) {
  const Eigen::Matrix2d ri = xi.rotation();
  const Eigen::Matrix2d rz = z.rotation();
  const Eigen::Vector2d d(xj.x - xi.x, xj.y - xi.y);
  const Eigen::Vector2d ht = ri.transpose() * d;
  Eigen::Matrix2d rot90;
  rot90 << 0, -1, 1, 0;

  ji.setZero();
  ji.topLeftCorner<2, 2>() = -rz.transpose() * ri.transpose();
  ji.topRightCorner<2, 1>() = rz.transpose() * (-rot90 * ht);
  ji(2, 2) = -1;

  jj.setZero();
  jj.topLeftCorner<2, 2>() = rz.transpose() * ri.transpose();
  jj(2, 2) = 1;
}

int selected_component(const PoseGraph& graph, int edge_index) {
  const Edge& e = graph.edge(edge_index);
  if (e.kernel != KernelType::max_mixture) return -1;
  const Pose2d& xi = graph.node(e.from).pose;
  const Pose2d& xj = graph.node(e.to).pose;
  double best = 0;
  int best_idx = -1;
  for (std::size_t c = 0; c < e.components.size(); ++c) {
    const Vec3 r = edge_residual(xi, xj, e.components[c].measurement);
    const double score = component_score(e.components[c], r);
    if (best_idx < 0 || score < best) {
      best = score;
      best_idx = static_cast<int>(c);
    }
  }
  return best_idx;
}

double graph_cost(const PoseGraph& graph, const OptimizeConfig& config) {
  std::unordered_map<int, Pose2d> poses;
  for (int id : graph.node_ids()) poses[id] = graph.node(id).pose;
  return total_cost(graph, poses, config);
}

OptimizeResult optimize(PoseGraph& graph, const OptimizeConfig& config) {
  const int gauge = resolve_gauge(graph, config);
  check_connected(graph, gauge);

  const std::vector<int> ids = graph.node_ids();
  std::unordered_map<int, int> var_of;  // node id -> variable block
  int nvar = 0;
  for (int id : ids)
    if (id != gauge) var_of[id] = nvar++;

  std::unordered_map<int, Pose2d> poses;
  for (int id : ids) poses[id] = graph.node(id).pose;

  OptimizeResult result;
  result.initial_cost = total_cost(graph, poses, config);
  result.final_cost = result.initial_cost;
  if (nvar == 0 || result.initial_cost == 0.0) return result;

  const std::vector<int> live = graph.live_edge_indices();
  Eigen::SparseMatrix<double> h(3 * nvar, 3 * nvar);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  bool analyzed = false;

  double cost = result.initial_cost;
  double lambda = 0.0;
  int iter = 0;
  for (; iter < config.max_iter; ++iter) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(live.size() * 36 + static_cast<std::size_t>(nvar) * 3);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(3 * nvar);

    for (int ei : live) {
      const Edge& e = graph.edge(ei);
      EffectiveFactor f;
      edge_cost_and_factor(e, poses[e.from], poses[e.to], config.huber_delta, &f);
      const Vec3 r = edge_residual(poses[e.from], poses[e.to], f.z);
      Mat3 ji, jj;
      edge_jacobians(poses[e.from], poses[e.to], f.z, ji, jj);
      const Mat3 lam = f.scale * f.information;

      const int vi = (e.from == gauge) ? -1 : var_of[e.from];
      const int vj = (e.to == gauge) ? -1 : var_of[e.to];
      if (vi >= 0) {
        const Mat3 hii = ji.transpose() * lam * ji;
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c)
            trips.emplace_back(3 * vi + a, 3 * vi + c, hii(a, c));
        b.segment<3>(3 * vi) += ji.transpose() * lam * r;
      }
      if (vj >= 0) {
        const Mat3 hjj = jj.transpose() * lam * jj;
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c)
            trips.emplace_back(3 * vj + a, 3 * vj + c, hjj(a, c));
        b.segment<3>(3 * vj) += jj.transpose() * lam * r;
      }
      if (vi >= 0 && vj >= 0) {
        const Mat3 hij = ji.transpose() * lam * jj;
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c) {
            trips.emplace_back(3 * vi + a, 3 * vj + c, hij(a, c));
            trips.emplace_back(3 * vj + c, 3 * vi + a, hij(a, c));
          }
      }
    }
    for (int v = 0; v < 3 * nvar; ++v) trips.emplace_back(v, v, 0.0);

    bool accepted = false;
    double new_cost = cost;
    std::unordered_map<int, Pose2d> candidate;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      std::vector<Eigen::Triplet<double>> damped = trips;
      if (lambda > 0)
        for (int v = 0; v < 3 * nvar; ++v) damped.emplace_back(v, v, lambda);
      h.setFromTriplets(damped.begin(), damped.end());
      if (!analyzed) {
        solver.analyzePattern(h);
        analyzed = true;
      }
      solver.factorize(h);
      if (solver.info() != Eigen::Success) {
        if (lambda == 0) {
          lambda = 1e-8;
          continue;
        }
        throw std::runtime_error("optimize: singular normal equations");
      }
      Eigen::VectorXd step = solver.solve(-b);
      if (!step.allFinite()) {
        lambda = std::max(lambda * 10, 1e-8);
        continue;
      }

      candidate = poses;
      for (int id : ids) {
        if (id == gauge) continue;
        const int v = var_of[id];
        const Pose2d& p = poses[id];
        candidate[id] = Pose2d(p.x + step[3 * v], p.y + step[3 * v + 1],
                               p.theta + step[3 * v + 2]);
      }
      new_cost = total_cost(graph, candidate, config);
      if (new_cost <= cost) {
        accepted = true;
        lambda = lambda > 1e-12 ? lambda / 4 : 0.0;
      } else {
        lambda = std::max(lambda * 10, 1e-8);
      }
    }
    if (!accepted) break;

    poses = std::move(candidate);
    const double drop = cost - new_cost;
    cost = new_cost;
    if (drop <= config.tol * std::max(cost, 1e-12)) {
      ++iter;
      break;
    }
  }

  for (int id : ids) graph.node(id).pose = poses[id];
  result.iterations = iter;
  result.final_cost = cost;
  return result;
}

}  // namespace pgslam
