#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spin7/integrator.hpp"
#include "spin7/metric_recon.hpp"

namespace spin7 {

/// 17 significant digits: round-trips any double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr const char* kTrajectoryHeader =
    "eta,X1,X2,X3,X4,Z1,Z2,Z3,Z4,res_cons,res_trace,res_s1,res_s2,res_s3,res_s4";

/// Trajectory CSV: one row per sample, events appended as comment lines.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << kTrajectoryHeader << "\n";
    for (const auto& s : traj.samples) {
        os << fmt17(s.eta);
        for (int i = 0; i < 8; ++i) os << ',' << fmt17(s.point[i]);
        os << ',' << fmt17(s.residuals.conservation) << ',' << fmt17(s.residuals.trace);
        for (double d : s.residuals.spin7) os << ',' << fmt17(d);
        os << "\n";
    }
    for (const auto& ev : traj.events)
        os << "# event," << ev.describe() << ',' << fmt17(ev.eta) << "\n";
}

/// Metric profile CSV; infinite components print as `inf`.
inline void write_profile_csv(std::ostream& os, const MetricProfile& prof) {
    os << "t,a,b,c,f,trL\n";
    for (const auto& r : prof.rows)
        os << fmt17(r.t) << ',' << fmt17(r.a) << ',' << fmt17(r.b) << ',' << fmt17(r.c)
           << ',' << fmt17(r.f) << ',' << fmt17(r.trL) << "\n";
}

struct CsvParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Parse a trajectory CSV back into samples (events are not reconstructed;
/// comment lines are skipped).  Throws CsvParseError on malformed input.
inline Trajectory read_trajectory_csv(std::istream& is) {
    Trajectory traj;
    std::string line;
    if (!std::getline(is, line) || line != kTrajectoryHeader)
        throw CsvParseError("trajectory CSV: bad or missing header");
    size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        double v[15];
        std::string cell;
        for (int i = 0; i < 15; ++i) {
            if (!std::getline(row, cell, ','))
                throw CsvParseError("trajectory CSV: line " + std::to_string(lineno) +
                                    " has fewer than 15 fields");
            try {
                v[i] = std::stod(cell);
            } catch (const std::exception&) {
                throw CsvParseError("trajectory CSV: line " + std::to_string(lineno) +
                                    " field " + std::to_string(i + 1) + " is not a number");
            }
        }
        Sample s;
        s.eta = v[0];
        for (int i = 0; i < 8; ++i) s.point[i] = v[1 + i];
        s.residuals.conservation = v[9];
        s.residuals.trace = v[10];
        for (int i = 0; i < 4; ++i) s.residuals.spin7[i] = v[11 + i];
        traj.samples.push_back(s);
    }
    if (traj.samples.empty()) throw CsvParseError("trajectory CSV: no samples");
    return traj;
}

/// Run manifests are plain `key value` lines in insertion order.
class Manifest {
  public:
    void add(const std::string& key, const std::string& value) {
        lines_.emplace_back(key, value);
    }
    void add(const std::string& key, double value) { add(key, fmt17(value)); }
    void add(const std::string& key, long value) { add(key, std::to_string(value)); }

    void write(std::ostream& os) const {
        for (const auto& [k, v] : lines_) os << k << ' ' << v << "\n";
    }

  private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

}  // namespace spin7
