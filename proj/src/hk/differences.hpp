#pragma once

#include "hk/trajectory.hpp"

#include <vector>

namespace hk {

// One-sided and centered velocity estimates at trajectory samples. Samples at event times split the
// trajectory into smooth pieces; stencils never cross a piece boundary.
struct VelocityEstimates {
    // For each sample, zero to two estimates (left/right at breakpoints, one elsewhere).
    std::vector<std::vector<std::vector<double>>> at;
    std::vector<char> breakpoint;
};

// Weights of the first derivative at z for nodes xs (Fornberg).
std::vector<double> fd_weights(double z, const std::vector<double>& xs);

// Breakpoints come from the event log; with no events, kinks are detected from jumps between
// one-sided estimates. Piecewise-linear trajectories use forward secants.
VelocityEstimates estimate_velocities(const Trajectory& traj, int stencil = 5);

}  // namespace hk
