#include "nevo/trajectory.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "nevo/errors.hpp"
#include "nevo/io_util.hpp"

namespace nevo {

void write_trajectories(std::ostream& os, const TrajectoryDataset& ds) {
    os << "NEVO-TRAJ v1\n";
    os << "obs=" << ds.obs_shape << ",act=" << ds.n_actions << ",T=" << ds.length
       << ",n=" << ds.trajectories.size() << "\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
        if (i > 0) os << "\n";
        for (const auto& step : ds.trajectories[i].steps) {
            for (double v : step.observation) os << v << ',';
            os << step.action << "\n";
        }
    }
}

TrajectoryDataset read_trajectories(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "NEVO-TRAJ v1")
        throw ConfigError("trajectory file: bad or missing header");
    if (!std::getline(is, line)) throw ConfigError("trajectory file: missing meta line");

    TrajectoryDataset ds;
    {
        std::istringstream meta(line);
        std::string field;
        while (std::getline(meta, field, ',')) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw ConfigError("trajectory file: bad meta field");
            const std::string key = field.substr(0, eq);
            const std::string val = field.substr(eq + 1);
            if (key == "obs") ds.obs_shape = val;
            else if (key == "act") ds.n_actions = std::stoi(val);
            else if (key == "T") ds.length = std::stoi(val);
            else if (key != "n") throw ConfigError("trajectory file: unknown meta key " + key);
        }
    }
    if (ds.obs_shape.empty() || ds.n_actions < 1 || ds.length < 1)
        throw ConfigError("trajectory file: incomplete meta line");

    Trajectory current;
    auto flush = [&]() {
        if (current.steps.empty()) return;
        if (int(current.steps.size()) != ds.length)
            throw ConfigError("trajectory file: trajectory length mismatch");
        ds.trajectories.push_back(std::move(current));
        current = {};
    };
    while (std::getline(is, line)) {
        if (line.empty()) {
            flush();
            continue;
        }
        TrajectoryStep step;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() < 2) throw ConfigError("trajectory file: short step line");
        for (std::size_t i = 0; i + 1 < cells.size(); ++i)
            step.observation.push_back(std::stod(cells[i]));
        step.action = std::stoi(cells.back());
        current.steps.push_back(std::move(step));
    }
    flush();
    return ds;
}

void write_trajectories_file(const std::string& path, const TrajectoryDataset& ds) {
    std::ostringstream os;
    write_trajectories(os, ds);
    write_file_atomic(path, os.str());
}

TrajectoryDataset read_trajectories_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("trajectory file: cannot open '" + path + "'");
    return read_trajectories(is);
}

} // namespace nevo
