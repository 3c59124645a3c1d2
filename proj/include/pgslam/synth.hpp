#pragma once

#include <pgslam/g2o_io.hpp>

#include <map>
#include <vector>

namespace pgslam {

struct SynthDataset {
  DatasetRecord record;
  std::map<int, Pose2d> ground_truth;
};

/* Serpentine indoor-scale survey: 989 poses sweeping a 40x18 m area with a
 * partial return pass over the top rows, 988 odometry edges and 229 loop
 * closures onto the first pass (1,217 edges total), about 720 occupied
 * 1 m grid cells. Vertices are dead-reckoned from the noisy odometry. */
SynthDataset serpentine_survey(unsigned seed);

struct TrackerScenario {
  DatasetRecord map_record;          // rigid square circuit for the snapshot
  DatasetRecord replay_record;       // noisy laps, loop closure every 50 steps
  std::vector<Pose2d> ground_truth;  // replay ground truth, step order
};

/* Five noisy laps around a 100-pose square circuit: 500 odometry steps with
 * sigma 0.02 m / 0.5 deg noise and a loop closure into the circuit map every
 * 50 steps. Replay vertex ids start at 1000 to stay clear of the map ids. */
TrackerScenario tracker_circuit(unsigned seed);

}  // namespace pgslam
