#include "hk/trajectory.hpp"

#include "hk/errors.hpp"

#include <algorithm>

namespace hk {

void Trajectory::append(double t, const std::vector<double>& x) {
    if (x.size() != N_ * n_) fail(ErrorKind::Configuration, "trajectory sample has wrong size");
    if (!t_.empty()) {
        if (t == t_.back()) {
            x_.back() = x;
            return;
        }
        if (t < t_.back()) return;
    }
    t_.push_back(t);
    x_.push_back(x);
}

std::vector<double> Trajectory::event_times() const {
    std::vector<double> out;
    for (const auto& e : events_)
        if (out.empty() || out.back() != e.time) out.push_back(e.time);
    return out;
}

std::vector<double> Trajectory::at(double t) const {
    if (t_.empty()) fail(ErrorKind::Argument, "empty trajectory");
    if (t <= t_.front()) return x_.front();
    if (t >= t_.back()) return x_.back();
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - t_.begin());
    double u = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
    std::vector<double> out(x_[k].size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = x_[k - 1][d] + u * (x_[k][d] - x_[k - 1][d]);
    return out;
}

Trajectory Trajectory::rescaled_time(double factor) const {
    Trajectory r(N_, n_, w_);
    for (std::size_t k = 0; k < t_.size(); ++k) r.append(t_[k] * factor, x_[k]);
    for (auto e : events_) {
        e.time *= factor;
        r.add_event(e);
    }
    r.info = info;
    r.series = series;
    return r;
}

}  // namespace hk
