#pragma once

#include <pgslam/pose2.hpp>

#include <string>
#include <utility>
#include <vector>

namespace pgslam {

using Trajectory = std::pair<std::string, std::vector<Pose2d>>;

/* Standalone SVG with one polyline per trajectory, a legend, and an auto-fit
 * viewBox with 5% margin. Byte-deterministic for identical input. */
std::string render_svg(const std::vector<Trajectory>& trajectories);
void emit_svg(const std::vector<Trajectory>& trajectories, const std::string& path);

}  // namespace pgslam
