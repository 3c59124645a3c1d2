#include <pgslam/svg.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pgslam {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c; break;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty())
    throw std::invalid_argument("render_svg: need at least one trajectory");
  for (const Trajectory& t : trajectories)
    if (t.second.empty())
      throw std::invalid_argument("render_svg: empty pose list for '" + t.first + "'");

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Trajectory& t : trajectories)
    for (const Pose2d& p : t.second) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  double w = std::max(xmax - xmin, 1e-9), h = std::max(ymax - ymin, 1e-9);
  double mx = 0.05 * w, my = 0.05 * h;

  const double width = 800;
  const double scale = width / (w + 2 * mx);
  const double height = (h + 2 * my) * scale;
  auto tx = [&](double x) { return (x - xmin + mx) * scale; };
  /* SVG y grows downward */
  auto ty = [&](double y) { return height - (y - ymin + my) * scale; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " +
         fmt(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out += "<polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.2\" points=\"";
    for (const Pose2d& p : trajectories[i].second) {
      out += fmt(tx(p.x));
      out += ",";
      out += fmt(ty(p.y));
      out += " ";
    }
    if (out.back() == ' ') out.pop_back();
    out += "\"/>\n";
  }

  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    double ly = 18.0 + 18.0 * static_cast<double>(i);
    out += "<line x1=\"12\" y1=\"" + fmt(ly - 4) + "\" x2=\"34\" y2=\"" +
           fmt(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"40\" y=\"" + fmt(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           xml_escape(trajectories[i].first) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_svg(const std::vector<Trajectory>& trajectories, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << render_svg(trajectories);
}

}  // namespace pgslam
