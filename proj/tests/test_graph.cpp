#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pgslam/graph.hpp>
#include <pgslam/optimizer.hpp>

#include <random>

using namespace pgslam;

namespace {

Edge make_edge(int from, int to, const Pose2d& z, const Mat3& info,
               EdgeKind kind = EdgeKind::odometry) {
  Edge e;
  e.from = from;
  e.to = to;
  e.kind = kind;
  e.measurement = z;
  e.information = info;
  return e;
}

}  // namespace

TEST_CASE("add_node assigns monotonic ids") {
  PoseGraph g;
  CHECK(g.add_node(Pose2d(), Mat3::Zero(), NodeSource::wheel_imu) == 0);
  CHECK(g.num_nodes() == 1);
  CHECK(g.add_node(Pose2d(1, 0, 0), Mat3::Zero(), NodeSource::wheel_imu) == 1);

  g.mark_pruned(0);
  CHECK(g.add_node(Pose2d(), Mat3::Zero(), NodeSource::visual) == 2);
  CHECK(g.num_nodes() == 2);
}

TEST_CASE("add_edge updates degrees and rejects bad endpoints") {
  PoseGraph g;
  g.add_node(Pose2d(), Mat3::Zero(), NodeSource::wheel_imu);
  g.add_node(Pose2d(1, 0, 0), Mat3::Zero(), NodeSource::wheel_imu);
  g.add_edge(make_edge(0, 1, Pose2d(1, 0, 0), Mat3::Identity()));
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);

  CHECK_THROWS_WITH_AS(g.add_edge(make_edge(0, 9, Pose2d(), Mat3::Identity())),
                       "unknown node 9", std::invalid_argument);

  /* parallel edges are allowed */
  g.add_edge(make_edge(0, 1, Pose2d(1, 0, 0), Mat3::Identity()));
  CHECK(g.num_edges() == 2);
  CHECK(g.degree(0) == 2);
}

TEST_CASE("adjacency recompute matches incremental bookkeeping") {
  std::mt19937 rng(3);
  PoseGraph g;
  for (int i = 0; i < 20; ++i)
    g.add_node(Pose2d(i * 0.5, 0, 0), Mat3::Zero(), NodeSource::wheel_imu);
  std::uniform_int_distribution<int> pick(0, 19);
  for (int i = 0; i < 60; ++i) {
    int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    g.add_edge(make_edge(a, b, Pose2d(1, 0, 0), Mat3::Identity(), EdgeKind::loop_lidar));
  }
  g.remove_edge(g.live_edge_indices().front());
  CHECK(g.recompute_adjacency() == g.adjacency());

  std::size_t degree_sum = 0;
  for (int id : g.node_ids()) degree_sum += g.degree(id);
  CHECK(degree_sum == 2 * g.num_edges());
}

TEST_CASE("mutual_information worked values") {
  CHECK(mutual_information(Mat3::Identity()) == doctest::Approx(std::sqrt(3.0)));
  CHECK(mutual_information(0.5 * Mat3::Identity()) == doctest::Approx(2 * std::sqrt(3.0)));
  Mat3 singular = Vec3(1, 1, 0).asDiagonal();
  CHECK(mutual_information(singular) == doctest::Approx(kWMax));
}

TEST_CASE("mutual_information is nondecreasing as covariance shrinks to zero") {
  double prev = 0;
  for (double c = 1.0; c > 1e-12; c /= 4) {
    double v = mutual_information(c * Mat3::Identity());
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(prev == doctest::Approx(kWMax));
}

TEST_CASE("edge_mutual_information mirrors the covariance policy") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.2, 4.0);
  for (int i = 0; i < 100; ++i) {
    Mat3 cov = Vec3(u(rng), u(rng), u(rng)).asDiagonal();
    CHECK(edge_mutual_information(cov.inverse()) ==
          doctest::Approx(mutual_information(cov)).epsilon(1e-9));
  }
  CHECK(edge_mutual_information(kWMax * Mat3::Identity()) == doctest::Approx(kWMax));
}

TEST_CASE("zero-constraint construction") {
  PoseGraph g;
  g.add_node(Pose2d(2, 2, 0.1), Mat3::Zero(), NodeSource::visual);
  g.add_node(Pose2d(2, 2, 0.1), Mat3::Zero(), NodeSource::lidar);
  int idx = g.add_zero_constraint(0, 1);
  const Edge& e = g.edge(idx);
  CHECK(e.kind == EdgeKind::zero_constraint);
  CHECK(e.measurement.vec().norm() == 0.0);
  CHECK((e.information - kWMax * Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("zero-constraint wins against a conflicting relative measurement") {
  /* Gauge node at the origin, second node pulled to (1,0,0) by an odometry
   * edge with unit information and to identity by a zero-constraint. The
   * closed-form blend (L1 + Lz)^-1 L1 z1 is identity to ~1e-12. */
  PoseGraph g;
  g.add_node(Pose2d(), Mat3::Zero(), NodeSource::wheel_imu);
  g.add_node(Pose2d(1, 0, 0), Mat3::Zero(), NodeSource::wheel_imu);
  g.add_edge(make_edge(0, 1, Pose2d(1, 0, 0), Mat3::Identity()));
  g.add_zero_constraint(0, 1);

  OptimizeConfig cfg;
  optimize(g, cfg);

  Vec3 closed_form = (Mat3::Identity() + kWMax * Mat3::Identity()).inverse() *
                     (Mat3::Identity() * Vec3(1, 0, 0));
  Pose2d rel = inverse_compose(g.node(0).pose, g.node(1).pose);
  CHECK(rel.vec().norm() < 1e-6);
  CHECK((rel.vec() - closed_form).norm() < 1e-9);
}

TEST_CASE("submap_nodes") {
  PoseGraph g;
  CHECK(g.submap_nodes(Pose2d(), 4.1).empty());
  g.add_node(Pose2d(0, 0, 0), Mat3::Zero(), NodeSource::wheel_imu);
  g.add_node(Pose2d(3, 0, 0), Mat3::Zero(), NodeSource::wheel_imu);
  g.add_node(Pose2d(1.5, -1.5, 0), Mat3::Zero(), NodeSource::wheel_imu);
  auto in = g.submap_nodes(Pose2d(), 4.1);
  CHECK(in == std::vector<int>({0, 2}));

  g.mark_pruned(2);
  CHECK(g.submap_nodes(Pose2d(), 4.1) == std::vector<int>({0}));
}
