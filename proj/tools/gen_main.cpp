#include <pgslam/g2o_io.hpp>
#include <pgslam/synth.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace pgslam;

  CLI::App app{"synthetic dataset generator"};
  app.require_subcommand(1);

  unsigned seed = 7;
  std::string out, map_out, gt_out;

  CLI::App* c_serp =
      app.add_subcommand("serpentine", "indoor-scale survey with a return pass");
  c_serp->add_option("--seed", seed, "random seed");
  c_serp->add_option("--out", out, "output g2o path")->required();

  CLI::App* c_circ =
      app.add_subcommand("circuit", "tracker scenario: circuit map plus noisy laps");
  c_circ->add_option("--seed", seed, "random seed");
  c_circ->add_option("--map-out", map_out, "circuit map g2o path")->required();
  c_circ->add_option("--out", out, "replay g2o path")->required();
  c_circ->add_option("--gt-out", gt_out, "replay ground truth g2o path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (c_serp->parsed()) {
      const SynthDataset d = serpentine_survey(seed);
      write_g2o_file(d.record, out);
      std::cerr << "wrote " << d.record.vertices.size() << " vertices, "
                << d.record.edges.size() << " edges to " << out << "\n";
    } else if (c_circ->parsed()) {
      const TrackerScenario t = tracker_circuit(seed);
      write_g2o_file(t.map_record, map_out);
      write_g2o_file(t.replay_record, out);
      if (!gt_out.empty()) {
        DatasetRecord gt;
        for (std::size_t k = 0; k < t.ground_truth.size(); ++k) {
          const Pose2d& p = t.ground_truth[k];
          gt.vertices.push_back({1000 + static_cast<int>(k), p.x, p.y, p.theta});
        }
        write_g2o_file(gt, gt_out);
      }
      std::cerr << "wrote circuit map to " << map_out << ", replay to " << out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
