#include "hk/errors.hpp"
#include "hk/solvers.hpp"

#include <cmath>
#include <sstream>

namespace hk {

StepSchedule::StepSchedule(std::vector<double> steps, std::optional<double> horizon) : steps_(std::move(steps)) {
    // Neumaier summation: long uniform schedules would otherwise drift past the tolerance.
    double sum = 0.0, comp = 0.0;
    for (double h : steps_) {
        if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::Schedule, "schedule steps must be positive");
        double t = sum + h;
        comp += std::abs(sum) >= h ? (sum - t) + h : (h - t) + sum;
        sum = t;
    }
    sum += comp;
    if (horizon && std::abs(sum - *horizon) > 1e-12 * std::max(1.0, std::abs(*horizon)))
        fail(ErrorKind::Schedule, "schedule steps do not add up to the horizon");
    horizon_ = horizon ? *horizon : sum;
}

StepSchedule StepSchedule::uniform(double horizon, std::size_t count) {
    if (count == 0 || !(horizon > 0.0)) fail(ErrorKind::Schedule, "uniform schedule needs positive horizon and steps");
    return StepSchedule(std::vector<double>(count, horizon / static_cast<double>(count)), horizon);
}

namespace {

// Agent-major accumulation: v_i = sum_j w_j a_ij (x_j - x_i), j in index order.
void clss_rhs(const std::vector<double>& x, const Configuration& shape, const InteractionKernel& kernel,
              Variant variant, const std::vector<char>& blocked, std::vector<double>& v) {
    const std::size_t N = shape.agents(), n = shape.dim();
    auto c = kernel.uniform_constant();
    v.assign(N * n, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            if (j == i || (!blocked.empty() && blocked[i * N + j])) continue;
            double th = squared_distance(x, n, i, j);
            bool on = variant == Variant::OpenAtOne ? th < 1.0 : th <= 1.0;
            if (!on) continue;
            double a = (c ? *c : kernel.phi(i, j, std::sqrt(th))) * shape.weight(j);
            for (std::size_t d = 0; d < n; ++d) v[i * n + d] += a * (x[j * n + d] - x[i * n + d]);
        }
    }
}

}  // namespace

Trajectory solve_clss(const Scenario& scenario, const StepSchedule& schedule, const ClssOptions& opts) {
    check_kernel(scenario.initial, scenario.kernel);
    if (opts.stride == 0) fail(ErrorKind::Argument, "stride must be positive");
    const auto& shape = scenario.initial;
    const std::size_t N = shape.agents();
    std::vector<char> blocked;
    if (!opts.blocked.empty()) {
        blocked.assign(N * N, 0);
        for (const auto& p : opts.blocked) {
            if (p.j >= N) fail(ErrorKind::Index, "blocked pair out of range");
            blocked[p.i * N + p.j] = blocked[p.j * N + p.i] = 1;
        }
    }
    Trajectory tr(N, shape.dim(), shape.weights());
    std::vector<double> x = shape.positions(), v;
    double t = 0.0;
    tr.append(t, x);
    if (opts.observer) opts.observer(0, t, x);
    // Node times are accumulated with compensated summation so uniform grids stay on k*dt.
    double comp = 0.0;
    const auto& steps = schedule.steps();
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const double h = steps[k];
        clss_rhs(x, shape, scenario.kernel, scenario.variant, blocked, v);
        for (std::size_t d = 0; d < x.size(); ++d) x[d] += h * v[d];
        double y = h - comp;
        double s = t + y;
        comp = (s - t) - y;
        t = s;
        if (opts.observer) opts.observer(k + 1, t, x);
        if (t <= opts.dense_until || (k + 1) % opts.stride == 0 || k + 1 == steps.size()) tr.append(t, x);
    }
    tr.info["piecewise_linear"] = 1.0;
    return tr;
}

JumpSchedule clss_jump_schedule(std::size_t K, std::size_t r, double T, double extend_to) {
    if (r == 0 || K == 0) fail(ErrorKind::Schedule, "K and r must be positive");
    auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(K))));
    std::ostringstream why;
    if (s * s != K) why << "K=" << K << " is not a perfect square";
    else if (s % r != 0) why << "sqrt(K)=" << s << " is not a multiple of r=" << r;
    else if (K <= 3 * r * r) why << "K must exceed 3 r^2";
    if (!why.str().empty()) fail(ErrorKind::Schedule, why.str());
    if (!(T > 0.0)) fail(ErrorKind::Schedule, "T must be positive");

    JumpSchedule js;
    js.dt = T / static_cast<double>(K);
    std::vector<double> steps(K - s, js.dt);
    js.jump_index = steps.size();
    steps.push_back(4.0 * static_cast<double>(s) * js.dt);
    std::size_t units = K + 3 * s;
    std::size_t end_units = std::max((r + 1) * K / r, K + 3 * s);
    for (; units < end_units; ++units) steps.push_back(js.dt);
    js.end_index = steps.size();
    if (extend_to > 0.0) {
        double reach = static_cast<double>(units) * js.dt;
        while (reach < extend_to - 1e-12) {
            steps.push_back(js.dt);
            ++units;
            reach = static_cast<double>(units) * js.dt;
        }
    }
    js.schedule = StepSchedule(std::move(steps));
    return js;
}

Trajectory solve_clss_jump_schedule(const Scenario& scenario, std::size_t K, std::size_t r, double T,
                                    double extend_to, const ClssOptions& opts) {
    auto js = clss_jump_schedule(K, r, T, extend_to);
    Trajectory tr = solve_clss(scenario, js.schedule, opts);
    tr.info["jump_index"] = static_cast<double>(js.jump_index);
    tr.info["end_index"] = static_cast<double>(js.end_index);
    tr.info["dt"] = js.dt;
    return tr;
}

}  // namespace hk
