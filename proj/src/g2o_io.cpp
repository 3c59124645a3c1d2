#include <pgslam/g2o_io.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace pgslam {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError(what + ", line " + std::to_string(line));
}

double to_double(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail(line, "bad number '" + tok + "'");
  }
  if (pos != tok.size()) fail(line, "bad number '" + tok + "'");
  return v;
}

int to_int(const std::string& tok, int line) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    fail(line, "bad id '" + tok + "'");
  }
  if (pos != tok.size()) fail(line, "bad id '" + tok + "'");
  return v;
}

}  // namespace

DatasetRecord parse_g2o(const std::string& text) {
  DatasetRecord rec;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<int> ids;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag[0] == '#') continue;
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (tag == "VERTEX_SE2") {
      if (toks.size() != 4) fail(lineno, "VERTEX_SE2 expects 4 fields, got " +
                                         std::to_string(toks.size()));
      DatasetVertex v;
      v.id = to_int(toks[0], lineno);
      v.x = to_double(toks[1], lineno);
      v.y = to_double(toks[2], lineno);
      v.theta = to_double(toks[3], lineno);
      rec.vertices.push_back(v);
      ids.insert(v.id);
    } else if (tag == "EDGE_SE2") {
      if (toks.size() != 11) fail(lineno, "EDGE_SE2 expects 11 fields, got " +
                                          std::to_string(toks.size()));
      DatasetEdge e;
      e.from = to_int(toks[0], lineno);
      e.to = to_int(toks[1], lineno);
      e.dx = to_double(toks[2], lineno);
      e.dy = to_double(toks[3], lineno);
      e.dtheta = to_double(toks[4], lineno);
      for (int i = 0; i < 6; ++i) e.info[i] = to_double(toks[5 + i], lineno);
      rec.edges.push_back(e);
    } else {
      fail(lineno, "unsupported tag '" + tag + "'");
    }
  }
  for (const DatasetEdge& e : rec.edges)
    if (!ids.count(e.from) || !ids.count(e.to))
      throw ParseError("edge references unknown vertex " +
                       std::to_string(ids.count(e.from) ? e.to : e.from));
  return rec;
}

DatasetRecord load_g2o_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_g2o(ss.str());
}

Mat3 information_matrix(const DatasetEdge& e) {
  Mat3 m;
  m << e.info[0], e.info[1], e.info[2],
       e.info[1], e.info[3], e.info[4],
       e.info[2], e.info[4], e.info[5];
  return m;
}

PoseGraph build_graph(const DatasetRecord& record, EdgeKind loop_kind) {
  PoseGraph g;
  for (const DatasetVertex& v : record.vertices)
    g.add_node_with_id(v.id, Pose2d(v.x, v.y, v.theta), Mat3::Zero(),
                       NodeSource::wheel_imu);
  for (const DatasetEdge& de : record.edges) {
    Edge e;
    e.from = de.from;
    e.to = de.to;
    e.kind = (de.to == de.from + 1) ? EdgeKind::odometry : loop_kind;
    if (e.kind != EdgeKind::odometry) {
      e.kernel = KernelType::huber;
      e.huber_delta = 0;  // defer to the optimizer's configured delta
    }
    e.measurement = Pose2d(de.dx, de.dy, de.dtheta);
    Mat3 info = information_matrix(de);
    Eigen::SelfAdjointEigenSolver<Mat3> es(info);
    if (es.eigenvalues().minCoeff() < kSigmaEps) {
      std::cerr << "warning: repairing indefinite information on edge "
                << de.from << "->" << de.to << "\n";
      Vec3 ev = es.eigenvalues().cwiseMax(kSigmaEps);
      info = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      info = ((info + info.transpose()) / 2).eval();
    }
    e.information = info;
    g.add_edge(std::move(e));
  }
  return g;
}

std::string write_g2o(const PoseGraph& graph) {
  std::string out;
  char buf[256];
  for (int id : graph.node_ids()) {
    const FrameNode& n = graph.node(id);
    std::snprintf(buf, sizeof(buf), "VERTEX_SE2 %d %.12g %.12g %.12g\n", id,
                  n.pose.x, n.pose.y, n.pose.theta);
    out += buf;
  }
  for (int idx : graph.live_edge_indices()) {
    const Edge& e = graph.edge(idx);
    const Mat3& m = e.information;
    std::snprintf(buf, sizeof(buf),
                  "EDGE_SE2 %d %d %.12g %.12g %.12g %.12g %.12g %.12g %.12g %.12g %.12g\n",
                  e.from, e.to, e.measurement.x, e.measurement.y,
                  e.measurement.theta, m(0, 0), m(0, 1), m(0, 2), m(1, 1),
                  m(1, 2), m(2, 2));
    out += buf;
  }
  return out;
}

void write_g2o_file(const PoseGraph& graph, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << write_g2o(graph);
}

std::string write_g2o(const DatasetRecord& record) {
  std::string out;
  char buf[256];
  for (const DatasetVertex& v : record.vertices) {
    std::snprintf(buf, sizeof(buf), "VERTEX_SE2 %d %.12g %.12g %.12g\n", v.id,
                  v.x, v.y, v.theta);
    out += buf;
  }
  for (const DatasetEdge& e : record.edges) {
    std::snprintf(buf, sizeof(buf),
                  "EDGE_SE2 %d %d %.12g %.12g %.12g %.12g %.12g %.12g %.12g %.12g %.12g\n",
                  e.from, e.to, e.dx, e.dy, e.dtheta, e.info[0], e.info[1],
                  e.info[2], e.info[3], e.info[4], e.info[5]);
    out += buf;
  }
  return out;
}

void write_g2o_file(const DatasetRecord& record, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << write_g2o(record);
}

}  // namespace pgslam
