#pragma once

#include "hk/trajectory.hpp"

#include <map>
#include <utility>
#include <vector>

namespace hk {

// Max over samples of the sup-norm drift of the weighted barycenter.
double barycenter_drift(const Trajectory& traj);

// Max distance of a point of x(t2) outside hull(x(t1)) over strided sample pairs (t1 < t2):
// consecutive strided samples and every strided sample against the first one.
double hull_contractivity_report(const Trajectory& traj, std::size_t stride = 1);

// V = sum over ordered pairs i != j of w_i w_j Phi_ij(|x_i - x_j|).
double lyapunov_V(const Configuration& config, const InteractionKernel& kernel);

// Largest increase of V between consecutive samples (0 when V never increases).
double lyapunov_monotone_check(const Trajectory& traj, const InteractionKernel& kernel);

struct ClusterReport {
    Partition clusters;
    std::vector<std::vector<double>> positions;
    // separations[a][b] for clusters a < b.
    std::vector<std::vector<double>> separations;
    std::vector<std::pair<std::size_t, std::size_t>> violations;
    double terminal_speed = 0.0;

    bool clean() const { return violations.empty(); }
    std::size_t count() const { return clusters.size(); }
};

// Largest agent speed between consecutive samples.
double peak_speed(const Trajectory& traj);

struct ClusterOptions {
    double cluster_tol = 1e-6;
    double sep_tol = 1e-6;
    double speed_tol = 1e-8;
};

// Not-converged error when agents still move faster than speed_tol over the last tenth of the run.
ClusterReport cluster_report(const Trajectory& traj, Variant variant, const ClusterOptions& opts = {});

struct InclusionReport {
    double max_residual = 0.0;
    double worst_time = 0.0;
    std::size_t samples = 0;
    // Best-fit boundary coefficients in [0,1] per boundary pair: (time, coefficient).
    std::map<Pair, std::vector<std::pair<double, double>>> alpha;
};

// Distance of the estimated velocity to the Filippov set at each sample; pairs with
// | |x_i - x_j| - 1 | <= band contribute a free coefficient in [0,1].
InclusionReport filippov_inclusion_residual(const Trajectory& traj, const InteractionKernel& kernel,
                                            Variant variant, double band = 1e-8);

// min over c in [0,1]^k of |b - G c|; G is column-major with `rows` rows.
double box_least_squares(const std::vector<double>& G, std::size_t rows, const std::vector<double>& b,
                         std::vector<double>& c);

// Componentwise Aitken extrapolation from samples at T - 2h, T - h, T with h a tenth of the run.
std::vector<double> aitken_limit(const Trajectory& traj);

// Slope of -log max_i |x_i(t) - x_i(T)| fitted over the middle of the run; 0 when the run is constant.
double fitted_rate(const Trajectory& traj);

struct CompareResult {
    double max_distance = 0.0;
    double max_time = 0.0;
    // First grid time where the sup over agents exceeds the threshold; negative when it never does.
    double divergence_time = -1.0;
    double final_distance = 0.0;
};

// Sup over agents of the Euclidean gap on the merged time grid of the overlapping range.
CompareResult compare_trajectories(const Trajectory& a, const Trajectory& b, double threshold);

}  // namespace hk
