#include "hk/differences.hpp"
#include "hk/errors.hpp"
#include "hk/solvers.hpp"

#include <cmath>

namespace hk {

ClassicalReport check_classical(const Trajectory& traj, const Scenario& scenario, double tol) {
    if (traj.agents() != scenario.initial.agents() || traj.dim() != scenario.initial.dim())
        fail(ErrorKind::Configuration, "trajectory does not match the scenario");
    auto est = estimate_velocities(traj);
    ClassicalReport rep;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (est.at[k].empty()) continue;
        auto f = rhs(traj.config(k), scenario.kernel, scenario.variant);
        for (const auto& d : est.at[k]) {
            double s = 0.0;
            for (std::size_t c = 0; c < d.size(); ++c) s += (d[c] - f[c]) * (d[c] - f[c]);
            double r = std::sqrt(s);
            if (r > rep.max_residual) {
                rep.max_residual = r;
                rep.worst_time = traj.times()[k];
            }
        }
        ++rep.samples;
    }
    rep.classical = rep.max_residual <= tol;
    return rep;
}

}  // namespace hk
