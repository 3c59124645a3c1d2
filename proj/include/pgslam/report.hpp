#pragma once

#include <pgslam/config.hpp>

#include <optional>
#include <string>

namespace pgslam {

/* One pipeline stage observation. Unset fields serialize as null. */
struct StageReport {
  std::string stage;
  std::optional<long> nodes;
  std::optional<long> edges;
  std::optional<double> npc;
  std::optional<double> arps_pct;
  std::optional<double> t_rel_m;
  double elapsed_ms = 0.0;
};

std::string to_json_line(const StageReport& r);
std::string config_json_line(const RunConfig& c);

}  // namespace pgslam
