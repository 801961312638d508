#pragma once

#include "hk/geometry.hpp"
#include "hk/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hk {

struct EventRecord {
    double time = 0.0;
    std::vector<Pair> pairs;
    std::vector<CrossingClass> classes;
    std::string action;
};

class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::size_t agents, std::size_t dim, std::vector<double> weights = {})
        : N_(agents), n_(dim), w_(std::move(weights)) {}

    std::size_t agents() const { return N_; }
    std::size_t dim() const { return n_; }
    std::size_t size() const { return t_.size(); }
    bool empty() const { return t_.empty(); }
    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& state(std::size_t k) const { return x_[k]; }
    const std::vector<double>& weights() const { return w_; }
    Configuration config(std::size_t k) const { return Configuration(N_, n_, x_[k], w_); }
    const std::vector<double>& final_state() const { return x_.back(); }
    double final_time() const { return t_.back(); }

    // Appends a sample; a time not after the last sample replaces it when equal and is ignored otherwise.
    void append(double t, const std::vector<double>& x);
    void add_event(EventRecord e) { events_.push_back(std::move(e)); }
    const std::vector<EventRecord>& events() const { return events_; }
    std::vector<EventRecord>& events() { return events_; }
    std::vector<double> event_times() const;

    // Linear interpolation in time, clamped to the sampled range.
    std::vector<double> at(double t) const;

    // Same states, sample times multiplied by `factor`.
    Trajectory rescaled_time(double factor) const;

    // Free-form scalars (e.g. fitted rates) and per-sample series aligned with times().
    std::map<std::string, double> info;
    std::map<std::string, std::vector<double>> series;

private:
    std::size_t N_ = 0, n_ = 0;
    std::vector<double> w_;
    std::vector<double> t_;
    std::vector<std::vector<double>> x_;
    std::vector<EventRecord> events_;
};

struct Scenario {
    std::string name;
    std::string label;
    InteractionKernel kernel;
    Variant variant = Variant::OpenAtOne;
    Configuration initial;
    std::map<std::string, double> expected;
};

}  // namespace hk
