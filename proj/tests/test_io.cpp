#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pgslam/g2o_io.hpp>
#include <pgslam/report.hpp>
#include <pgslam/svg.hpp>

#include <random>

using namespace pgslam;

TEST_CASE("parse_g2o vertex and edge lines") {
  DatasetRecord r = parse_g2o("VERTEX_SE2 0 0 0 0\n");
  REQUIRE(r.vertices.size() == 1);
  CHECK(r.vertices[0].id == 0);
  CHECK(r.vertices[0].x == 0);

  r = parse_g2o("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\n"
                "EDGE_SE2 0 1 1 0 0 1 0 0 1 0 1\n");
  REQUIRE(r.edges.size() == 1);
  CHECK(r.edges[0].from == 0);
  CHECK(r.edges[0].to == 1);
  CHECK(r.edges[0].dx == 1);
  CHECK((information_matrix(r.edges[0]) - Mat3::Identity()).norm() == 0);
}

TEST_CASE("parse_g2o rejects unknown tags with a line number") {
  try {
    parse_g2o("VERTEX_SE2 0 0 0 0\nVERTEX_SE3 1 0 0 0 0 0 0 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unsupported tag") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("parse_g2o rejects malformed lines citing the token") {
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 0 0 zero\n"), ParseError);
  CHECK_THROWS_AS(parse_g2o("EDGE_SE2 0 1 1 0 0 1 0 0 1 0\n"), ParseError);
  try {
    parse_g2o("VERTEX_SE2 0 0 0 bogus\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}

TEST_CASE("parse_g2o ignores comments and blank lines") {
  DatasetRecord r = parse_g2o("\n# a comment\n  \nVERTEX_SE2 0 1 2 0.5\n# end\n");
  CHECK(r.vertices.size() == 1);
}

TEST_CASE("parser survives fuzzed whitespace and comment placement") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> nsp(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    auto pad = [&] { return std::string(static_cast<std::size_t>(nsp(rng)), ' '); };
    text += "# header comment\n";
    for (int i = 0; i < 4; ++i) {
      text += "VERTEX_SE2" + pad() + std::to_string(i) + pad() +
              std::to_string(i * 0.5) + pad() + "0" + pad() + "0.1\n";
      if (i % 2 == trial % 2) text += "\n# interleaved\n";
    }
    text += "EDGE_SE2" + pad() + "0" + pad() + "1" + pad() +
            "0.5 0 0 1 0 0 1 0 1\n";
    DatasetRecord r = parse_g2o(text);
    CHECK(r.vertices.size() == 4);
    CHECK(r.edges.size() == 1);
  }
}

TEST_CASE("write_g2o round-trips to 1e-9 and filters pruned nodes") {
  PoseGraph g;
  g.add_node(Pose2d(1.5, -2.0, M_PI / 3), Mat3::Zero(), NodeSource::wheel_imu);
  g.add_node(Pose2d(2.5, -2.5, -1.1), Mat3::Zero(), NodeSource::wheel_imu);
  g.add_node(Pose2d(9, 9, 0), Mat3::Zero(), NodeSource::wheel_imu);
  Edge e;
  e.from = 0;
  e.to = 1;
  e.measurement = Pose2d(0.731, -0.291, 0.173);
  Mat3 info;
  info << 44.721, 0.5, -0.25, 0.5, 44.721, 0.125, -0.25, 0.125, 30.0;
  e.information = info;
  g.add_edge(e);
  g.mark_pruned(2);

  std::string text = write_g2o(g);
  CHECK(text.find("VERTEX_SE2 2") == std::string::npos);

  DatasetRecord r = parse_g2o(text);
  REQUIRE(r.vertices.size() == 2);
  REQUIRE(r.edges.size() == 1);
  CHECK(std::abs(r.vertices[0].theta - M_PI / 3) < 1e-9);
  CHECK((information_matrix(r.edges[0]) - info).norm() < 1e-9);

  CHECK(write_g2o(build_graph(r)) == write_g2o(build_graph(parse_g2o(write_g2o(build_graph(r))))));
}

TEST_CASE("empty graph writes empty text") {
  CHECK(write_g2o(PoseGraph()).empty());
}

TEST_CASE("random records are a parse/write fixed point") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-30, 30);
  std::uniform_real_distribution<double> ua(-3.1, 3.1);
  PoseGraph g;
  for (int i = 0; i < 50; ++i)
    g.add_node(Pose2d(u(rng), u(rng), ua(rng)), Mat3::Zero(), NodeSource::wheel_imu);
  for (int i = 0; i + 1 < 50; ++i) {
    Edge e;
    e.from = i;
    e.to = i + 1;
    e.measurement = Pose2d(u(rng) / 30, u(rng) / 30, ua(rng) / 10);
    Mat3 a;
    a << u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng);
    e.information = (a * a.transpose() + 10 * Mat3::Identity()).eval();
    g.add_edge(e);
  }
  std::string once = write_g2o(g);
  std::string twice = write_g2o(build_graph(parse_g2o(once)));
  CHECK(once == twice);
}

TEST_CASE("build_graph classifies odometry vs loop edges") {
  DatasetRecord r = parse_g2o(
      "VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\nVERTEX_SE2 2 2 0 0\n"
      "EDGE_SE2 0 1 1 0 0 1 0 0 1 0 1\n"
      "EDGE_SE2 1 2 1 0 0 1 0 0 1 0 1\n"
      "EDGE_SE2 0 2 2 0 0 1 0 0 1 0 1\n");
  PoseGraph g = build_graph(r);
  CHECK(g.edge(0).kind == EdgeKind::odometry);
  CHECK(g.edge(1).kind == EdgeKind::odometry);
  CHECK(g.edge(2).kind == EdgeKind::loop_lidar);
}

TEST_CASE("svg output shape and determinism") {
  std::vector<Trajectory> one = {{"raw", {Pose2d(0, 0, 0), Pose2d(1, 1, 0)}}};
  std::string svg = render_svg(one);
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos)
    ++count;
  CHECK(count == 1);
  CHECK(render_svg(one) == svg);

  std::vector<Trajectory> three = {
      {"a", {Pose2d(0, 0, 0), Pose2d(1, 0, 0)}},
      {"b", {Pose2d(0, 1, 0), Pose2d(1, 1, 0)}},
      {"c", {Pose2d(0, 2, 0), Pose2d(1, 2, 0)}}};
  std::string svg3 = render_svg(three);
  count = 0;
  for (std::size_t pos = 0; (pos = svg3.find("<polyline", pos)) != std::string::npos; ++pos)
    ++count;
  CHECK(count == 3);
  count = 0;
  for (std::size_t pos = 0; (pos = svg3.find("<text", pos)) != std::string::npos; ++pos)
    ++count;
  CHECK(count == 3);

  CHECK_THROWS_AS(render_svg({}), std::invalid_argument);
  CHECK_THROWS_AS(render_svg({{"empty", {}}}), std::invalid_argument);
}

TEST_CASE("stage reports serialize deterministically with nulls") {
  StageReport r;
  r.stage = "prune";
  r.nodes = 327;
  r.edges = 354;
  r.npc = 1.0;
  std::string line = to_json_line(r);
  CHECK(line.find("\"stage\":\"prune\"") != std::string::npos);
  CHECK(line.find("\"nodes\":327") != std::string::npos);
  CHECK(line.find("\"arps_pct\":null") != std::string::npos);
  CHECK(line.find("\"elapsed_ms\":0.0") != std::string::npos);
  CHECK(to_json_line(r) == line);

  RunConfig c;
  std::string cfg = config_json_line(c);
  CHECK(cfg.find("\"stage\":\"config\"") != std::string::npos);
  CHECK(cfg.find("\"weight_mode\":\"edge\"") != std::string::npos);
}
