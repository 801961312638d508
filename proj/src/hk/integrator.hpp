#pragma once

#include "hk/trajectory.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hk {

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double event_time_tol = 1e-12;
    // An event function counts as crossed once it exceeds this value.
    double trigger = 1e-12;
    double sample_dt = 0.01;
    double max_step = 0.05;
    std::size_t max_steps = 20000000;
    int interior_checks = 3;
    // |theta - 1| band that counts as "on the discontinuity set" at decision points.
    double boundary_tol = 1e-9;
};

using VectorField = std::function<void(std::span<const double>, std::span<double>)>;
using EventFunction = std::function<void(std::span<const double>, std::vector<double>&)>;
using StepHook = std::function<void(double, std::span<const double>)>;

struct SegmentOutcome {
    double t = 0.0;
    std::vector<double> x;
    bool event = false;
    std::vector<std::size_t> fired;
};

// Dormand-Prince 5(4) with dense output. Samples on the global grid k*sample_dt strictly inside
// (t0, end) plus the end point are appended to `out`.
SegmentOutcome integrate_segment(const VectorField& f, const EventFunction* events, double t0,
                                 std::vector<double> x0, double t_stop, const IntegratorOptions& opt,
                                 Trajectory* out, const StepHook* hook = nullptr);

}  // namespace hk
