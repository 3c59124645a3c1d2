#include <pgslam/report.hpp>

#include <json.hpp>

namespace pgslam {

std::string to_json_line(const StageReport& r) {
  nlohmann::json j;
  j["stage"] = r.stage;
  j["nodes"] = r.nodes ? nlohmann::json(*r.nodes) : nlohmann::json(nullptr);
  j["edges"] = r.edges ? nlohmann::json(*r.edges) : nlohmann::json(nullptr);
  j["npc"] = r.npc ? nlohmann::json(*r.npc) : nlohmann::json(nullptr);
  j["arps_pct"] = r.arps_pct ? nlohmann::json(*r.arps_pct) : nlohmann::json(nullptr);
  j["t_rel_m"] = r.t_rel_m ? nlohmann::json(*r.t_rel_m) : nlohmann::json(nullptr);
  j["elapsed_ms"] = r.elapsed_ms;
  return j.dump();
}

std::string config_json_line(const RunConfig& c) {
  nlohmann::json j;
  j["stage"] = "config";
  j["cell_size"] = c.cell_size;
  j["s"] = c.s;
  j["weight_mode"] = to_string(c.weight_mode);
  j["submap"] = c.submap_side;
  j["window"] = c.window;
  j["huber"] = c.huber_delta;
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  j["deadline_ms"] = c.deadline_ms;
  j["seed"] = c.seed;
  j["single_thread"] = c.single_thread;
  return j.dump();
}

}  // namespace pgslam
