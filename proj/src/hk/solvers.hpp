#pragma once

#include "hk/integrator.hpp"
#include "hk/trajectory.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hk {

class InteractionGraph {
public:
    InteractionGraph() = default;
    InteractionGraph(std::size_t agents, std::vector<Pair> edges);
    static InteractionGraph complete(std::size_t agents);
    static InteractionGraph empty(std::size_t agents) { return InteractionGraph(agents, {}); }

    std::size_t agents() const { return N_; }
    const std::vector<Pair>& edges() const { return edges_; }
    bool contains(Pair p) const;
    std::string describe() const;

private:
    std::size_t N_ = 0;
    std::vector<Pair> edges_;
};

enum class ExitReason { Horizon, Event };

struct SmoothResult {
    Trajectory trajectory;
    ExitReason reason = ExitReason::Horizon;
    double exit_time = 0.0;
    std::vector<Pair> event_pairs;
};

SmoothResult integrate_smooth(const Configuration& config, const InteractionGraph& graph,
                              const InteractionKernel& kernel, double horizon, const IntegratorOptions& opts = {});

// Edge-by-edge construction at a point of M: interior pairs first, then each boundary pair in
// `ordering` (all boundary pairs in index order when empty) joins iff its drift difference
// alpha_ij computed with the current edges is at most phi_ij(1).
InteractionGraph resolve_graph_at_M(const Configuration& config, const InteractionKernel& kernel, Variant variant,
                                    const std::vector<Pair>& ordering = {}, double tol = 1e-9);

constexpr double kNever = std::numeric_limits<double>::infinity();

struct BranchRule {
    std::vector<Pair> pairs;
    // Pairs on M at time 0 that no other rule names.
    bool initial_all = false;
    // Delay between the pair's arrival on M and its activation; kNever keeps it off.
    double wait = 0.0;
};

struct BranchSpec {
    std::vector<BranchRule> rules;
    // Boundary pairs without a rule stay off at their first arrival instead of using the default resolution.
    bool others_never = false;
    std::vector<Pair> ordering;

    // Grammar: tokens separated by ';' or whitespace, each `wait=<t|inf>:<pairs>` where <pairs> is
    // `all`/`both` or a comma list of `i-j` (1-based); the token `others=never` sets others_never.
    static BranchSpec parse(const std::string& text);
    std::string describe() const;
};

Trajectory solve_caratheodory(const Scenario& scenario, const BranchSpec& branch, double horizon,
                              const IntegratorOptions& opts = {});

// Largest total rate any agent can feel, max_i sum_j w_j max phi_ij.
double rate_bound(const Scenario& scenario);
// Sample spacing fine enough for finite-difference velocities on stiff kernels (0.003 / rate),
// capped at 0.01 and at a million samples over the horizon.
double resolved_sample_dt(const Scenario& scenario, double horizon);

struct PinWindow {
    Pair pair;
    double start = 0.0;
    double end = kNever;
};

// Holds pinned pairs on |x_i - x_j| = 1 inside their windows using boundary coefficients in [0,1];
// outside the windows the run follows `branch` as in solve_caratheodory. Sliding coefficients are
// stored in trajectory info as alpha samples are not part of the state; see sliding_alpha.
Trajectory solve_filippov_sliding(const Scenario& scenario, const std::vector<PinWindow>& pins, double horizon,
                                  const BranchSpec& branch = {}, const IntegratorOptions& opts = {});

// Boundary coefficients that keep `pinned` on M at state x with the given active edges.
std::vector<double> sliding_alpha(const Configuration& config, const InteractionKernel& kernel,
                                  const std::vector<Pair>& edges, const std::vector<Pair>& pinned);

class StepSchedule {
public:
    StepSchedule() = default;
    explicit StepSchedule(std::vector<double> steps, std::optional<double> horizon = std::nullopt);
    static StepSchedule uniform(double horizon, std::size_t count);

    const std::vector<double>& steps() const { return steps_; }
    double horizon() const { return horizon_; }
    std::size_t size() const { return steps_.size(); }

private:
    std::vector<double> steps_;
    double horizon_ = 0.0;
};

struct ClssOptions {
    // Every node is stored up to dense_until, every stride-th node afterwards (the last one always).
    std::size_t stride = 1;
    double dense_until = std::numeric_limits<double>::infinity();
    // Pairs that never interact (restricted schemes).
    std::vector<Pair> blocked;
    // Called at every node, including the initial one.
    std::function<void(std::size_t, double, const std::vector<double>&)> observer;
};

Trajectory solve_clss(const Scenario& scenario, const StepSchedule& schedule, const ClssOptions& opts = {});

struct JumpSchedule {
    StepSchedule schedule;
    std::size_t jump_index = 0;   // index of the long step (0-based)
    std::size_t end_index = 0;    // number of steps reaching (r+1)T/r
    double dt = 0.0;
};

// Uniform steps dt = T/K until (K - sqrt K) dt, one step of 4 sqrt(K) dt, then uniform dt steps
// until max((r+1)K/r, K + 3 sqrt K) steps' worth of time and optionally on to `extend_to`.
JumpSchedule clss_jump_schedule(std::size_t K, std::size_t r, double T, double extend_to = 0.0);

Trajectory solve_clss_jump_schedule(const Scenario& scenario, std::size_t K, std::size_t r, double T,
                                    double extend_to = 0.0, const ClssOptions& opts = {});

// ---- stratifications ----

enum class CellType { TypeI, TypeII };

struct Cell {
    int id = 0;
    int dimension = 0;
    CellType type = CellType::TypeI;
    std::string label;
    // Active pairs of the restricted dynamics on the cell (type I cells).
    std::vector<Pair> active;
    std::function<bool(const Configuration&, double)> contains;
    // Representative point, used for exclusivity checks.
    std::vector<double> sample;
};

class Stratification {
public:
    std::vector<Cell> cells;
    std::map<int, int> sigma;
    std::string name;

    const Cell& cell(int id) const;
    // Unique cell containing the configuration; stratification error otherwise.
    int locate(const Configuration& config, double tol = 1e-9) const;
    void validate() const;
};

Stratification toy_stratification(bool boundary_type_two);
Stratification builtin_stratification_3agents();

// Reduced coordinates (x1, x2) with x3 = -x1 - x2 of a barycenter-zero 3-agent line configuration.
Configuration three_agents_from_reduced(double u, double v);

Trajectory solve_stratified(const Scenario& scenario, const Stratification& strat, double horizon,
                            const IntegratorOptions& opts = {});

struct ClassicalReport {
    bool classical = false;
    double max_residual = 0.0;
    double worst_time = 0.0;
    std::size_t samples = 0;
};

ClassicalReport check_classical(const Trajectory& traj, const Scenario& scenario, double tol = 1e-3);

}  // namespace hk
