#pragma once

#include "hk/trajectory.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hk {

// Header comments carry the shape, weights and info scalars; columns are t,x1_1,...,xN_n.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

// One event per line: time, pairs (1-based "i-j" list), classes, action; tab separated.
void write_events(std::ostream& out, const Trajectory& traj);
void read_events(std::istream& in, Trajectory& traj);

CrossingClass parse_crossing_class(const std::string& s);

using Summary = std::vector<std::pair<std::string, std::string>>;
void write_summary(std::ostream& out, const Summary& s);

std::string format_number(double v);
std::string format_pair(Pair p);
Pair parse_pair(const std::string& s);

}  // namespace hk
