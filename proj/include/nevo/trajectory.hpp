#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nevo {

struct TrajectoryStep {
    std::vector<double> observation;
    int action = 0;
    bool operator==(const TrajectoryStep&) const = default;
};

/// Fixed-length sequence of (observation, action) pairs: the data point
/// exchanged in adversarial matches.
struct Trajectory {
    std::vector<TrajectoryStep> steps;
    bool operator==(const Trajectory&) const = default;
};

struct TrajectoryDataset {
    std::string obs_shape; // "4" or "1x8x8"
    int n_actions = 0;
    int length = 0; // T, shared by every trajectory
    std::vector<Trajectory> trajectories;
    bool operator==(const TrajectoryDataset&) const = default;
};

// NEVO-TRAJ v1 text format; write-then-read is the identity.
void write_trajectories(std::ostream& os, const TrajectoryDataset& ds);
TrajectoryDataset read_trajectories(std::istream& is);
void write_trajectories_file(const std::string& path, const TrajectoryDataset& ds);
TrajectoryDataset read_trajectories_file(const std::string& path);

} // namespace nevo
