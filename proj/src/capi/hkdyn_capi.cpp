#include "hkdyn/hkdyn.h"

#include "hk/analysis.hpp"
#include "hk/enumeration.hpp"
#include "hk/errors.hpp"
#include "hk/io.hpp"
#include "hk/scenarios.hpp"
#include "hk/solvers.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

struct hk_scenario {
    hk::Scenario sc;
};

struct hk_trajectory {
    hk::Trajectory tr;
    std::vector<std::string> pairs, classes;
};

struct hk_clusters {
    hk::ClusterReport rep;
    std::size_t agents = 0;
};

namespace {

thread_local std::string g_error;

hk_status status_of(hk::ErrorKind k) {
    using hk::ErrorKind;
    switch (k) {
    case ErrorKind::Argument: return HK_E_ARGUMENT;
    case ErrorKind::Configuration: return HK_E_CONFIGURATION;
    case ErrorKind::Index: return HK_E_INDEX;
    case ErrorKind::Selection: return HK_E_SELECTION;
    case ErrorKind::Classification: return HK_E_CLASSIFICATION;
    case ErrorKind::Branch: return HK_E_BRANCH;
    case ErrorKind::Schedule: return HK_E_SCHEDULE;
    case ErrorKind::Integrator: return HK_E_INTEGRATOR;
    case ErrorKind::Stratification: return HK_E_STRATIFICATION;
    case ErrorKind::SlidingInfeasible: return HK_E_SLIDING;
    case ErrorKind::NotConverged: return HK_E_NOT_CONVERGED;
    case ErrorKind::Sampling: return HK_E_SAMPLING;
    case ErrorKind::Parse: return HK_E_PARSE;
    case ErrorKind::Io: return HK_E_IO;
    }
    return HK_E_INTERNAL;
}

template <class F>
hk_status guard(F&& f) {
    try {
        f();
        g_error.clear();
        return HK_OK;
    } catch (const hk::Error& e) {
        g_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return HK_E_INTERNAL;
    } catch (const std::exception& e) {
        g_error = e.what();
        return HK_E_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) hk::fail(hk::ErrorKind::Argument, std::string(what) + " must not be null");
}

hk::Variant variant_of(hk_variant v) {
    if (v != HK_OPEN && v != HK_CLOSED) hk::fail(hk::ErrorKind::Argument, "unknown variant");
    return v == HK_OPEN ? hk::Variant::OpenAtOne : hk::Variant::ClosedAtOne;
}

hk_status put_scenario(hk_scenario** out, const std::function<hk::Scenario()>& make) {
    return guard([&] {
        need(out, "out");
        *out = new hk_scenario{make()};
    });
}

hk_status put_trajectory(hk_trajectory** out, const std::function<hk::Trajectory()>& make) {
    return guard([&] {
        need(out, "out");
        *out = new hk_trajectory{make(), {}, {}};
    });
}

std::ofstream open_out(const char* path) {
    need(path, "path");
    std::ofstream f(path);
    if (!f) hk::fail(hk::ErrorKind::Io, std::string("cannot write ") + path);
    return f;
}

std::ifstream open_in(const char* path) {
    need(path, "path");
    std::ifstream f(path);
    if (!f) hk::fail(hk::ErrorKind::Io, std::string("cannot read ") + path);
    return f;
}

hk::Scenario analysis_scenario(const hk_trajectory* tr, const hk_scenario* sc) {
    if (sc) {
        if (sc->sc.initial.agents() != tr->tr.agents())
            hk::fail(hk::ErrorKind::Configuration, "scenario and trajectory disagree on the number of agents");
        return sc->sc;
    }
    hk::Scenario s;
    s.kernel = hk::InteractionKernel::constant(tr->tr.agents());
    return s;
}

double parse_time(const std::string& s) {
    if (s == "inf") return hk::kNever;
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) hk::fail(hk::ErrorKind::Parse, "bad time '" + s + "'");
    return v;
}

std::vector<hk::PinWindow> parse_pins(const std::string& text) {
    std::vector<hk::PinWindow> pins;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        hk::PinWindow w;
        auto at = item.find('@');
        w.pair = hk::parse_pair(item.substr(0, at));
        if (at != std::string::npos) {
            auto rest = item.substr(at + 1);
            auto colon = rest.find(':');
            if (colon == std::string::npos) hk::fail(hk::ErrorKind::Parse, "pin window needs start:end");
            try {
                w.start = parse_time(rest.substr(0, colon));
                w.end = parse_time(rest.substr(colon + 1));
            } catch (const std::invalid_argument&) {
                hk::fail(hk::ErrorKind::Parse, "bad pin window '" + rest + "'");
            }
        }
        pins.push_back(w);
    }
    if (pins.empty()) hk::fail(hk::ErrorKind::Argument, "sliding needs at least one pinned pair");
    return pins;
}

}  // namespace

extern "C" {

const char* hk_last_error(void) { return g_error.c_str(); }

const char* hk_status_name(hk_status s) {
    switch (s) {
    case HK_OK: return "ok";
    case HK_E_ARGUMENT: return "argument";
    case HK_E_CONFIGURATION: return "configuration";
    case HK_E_INDEX: return "index";
    case HK_E_SELECTION: return "selection";
    case HK_E_CLASSIFICATION: return "classification";
    case HK_E_BRANCH: return "branch";
    case HK_E_SCHEDULE: return "schedule";
    case HK_E_INTEGRATOR: return "integrator";
    case HK_E_STRATIFICATION: return "stratification";
    case HK_E_SLIDING: return "sliding-infeasible";
    case HK_E_NOT_CONVERGED: return "not-converged";
    case HK_E_SAMPLING: return "sampling";
    case HK_E_PARSE: return "parse";
    case HK_E_IO: return "io";
    case HK_E_INTERNAL: return "internal";
    }
    return "unknown";
}

size_t hk_builtin_count(void) { return hk::builtin_scenario_names().size(); }

const char* hk_builtin_name(size_t index) {
    static const std::vector<std::string> names = hk::builtin_scenario_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

hk_status hk_scenario_builtin(const char* name, hk_scenario** out) {
    return put_scenario(out, [&] {
        need(name, "name");
        return hk::builtin_scenario(name);
    });
}

hk_status hk_scenario_load(const char* path, hk_scenario** out) {
    return put_scenario(out, [&] {
        auto f = open_in(path);
        return hk::read_scenario(f);
    });
}

hk_status hk_scenario_save(const hk_scenario* sc, const char* path) {
    return guard([&] {
        need(sc, "scenario");
        auto f = open_out(path);
        hk::write_scenario(f, sc->sc);
    });
}

hk_status hk_scenario_create(size_t agents, size_t dim, const double* positions, const double* weights, double phi,
                             hk_variant variant, hk_scenario** out) {
    return put_scenario(out, [&] {
        need(positions, "positions");
        if (agents == 0 || dim == 0) hk::fail(hk::ErrorKind::Argument, "need at least one agent and dimension");
        hk::Scenario s;
        s.name = "custom";
        s.kernel = hk::InteractionKernel::constant(agents, phi);
        s.variant = variant_of(variant);
        std::vector<double> w;
        if (weights) w.assign(weights, weights + agents);
        s.initial = hk::Configuration(agents, dim, std::vector<double>(positions, positions + agents * dim), w);
        hk::check_kernel(s.initial, s.kernel);
        return s;
    });
}

hk_status hk_scenario_toy(double x1, double x2, hk_variant variant, hk_scenario** out) {
    return put_scenario(out, [&] { return hk::toy_two_agents(x1, x2, variant_of(variant)); });
}

hk_status hk_scenario_three_agents(const char* ic, const double* params, size_t count, hk_variant variant,
                                   hk_scenario** out) {
    return put_scenario(out, [&] {
        need(ic, "ic");
        std::vector<double> p;
        if (params) p.assign(params, params + count);
        return hk::three_agents(hk::parse_ic_case(ic), p, variant_of(variant));
    });
}

hk_status hk_scenario_square4(hk_variant variant, hk_scenario** out) {
    return put_scenario(out, [&] { return hk::square4(variant_of(variant)); });
}

hk_status hk_scenario_distancing(int levels, const size_t* sizes, size_t count, const double* eps, size_t eps_count,
                                 int lumped, hk_scenario** out) {
    return put_scenario(out, [&] {
        std::vector<std::size_t> g;
        if (sizes) g.assign(sizes, sizes + count);
        std::vector<double> e;
        if (eps) e.assign(eps, eps + eps_count);
        return hk::distancing(levels, g, e, lumped != 0);
    });
}

hk_status hk_scenario_remark71(double eps, hk_scenario** out) {
    return put_scenario(out, [&] { return hk::remark71_scenario(eps); });
}

hk_status hk_scenario_clss10(hk_scenario** out) {
    return put_scenario(out, [&] { return hk::clss_ten_agents(); });
}

void hk_scenario_free(hk_scenario* sc) { delete sc; }

size_t hk_scenario_agents(const hk_scenario* sc) { return sc ? sc->sc.initial.agents() : 0; }
size_t hk_scenario_dim(const hk_scenario* sc) { return sc ? sc->sc.initial.dim() : 0; }
hk_variant hk_scenario_variant(const hk_scenario* sc) {
    return sc && sc->sc.variant == hk::Variant::ClosedAtOne ? HK_CLOSED : HK_OPEN;
}
const char* hk_scenario_name(const hk_scenario* sc) { return sc ? sc->sc.name.c_str() : ""; }
const char* hk_scenario_label(const hk_scenario* sc) { return sc ? sc->sc.label.c_str() : ""; }

hk_status hk_scenario_positions(const hk_scenario* sc, double* out) {
    return guard([&] {
        need(sc, "scenario");
        need(out, "out");
        const auto& p = sc->sc.initial.positions();
        std::copy(p.begin(), p.end(), out);
    });
}

hk_status hk_scenario_expected(const hk_scenario* sc, const char* key, double* value) {
    return guard([&] {
        need(sc, "scenario");
        need(key, "key");
        need(value, "value");
        auto it = sc->sc.expected.find(key);
        if (it == sc->sc.expected.end()) hk::fail(hk::ErrorKind::Argument, std::string("no expected value ") + key);
        *value = it->second;
    });
}

hk_status hk_classify_crossing(const hk_scenario* sc, size_t i, size_t j, hk_crossing* out) {
    return guard([&] {
        need(sc, "scenario");
        need(out, "out");
        if (i == 0 || j == 0) hk::fail(hk::ErrorKind::Index, "agent indices are 1-based");
        auto c = hk::classify_crossing(sc->sc.initial, i - 1, j - 1, sc->sc.kernel, sc->sc.variant);
        *out = static_cast<hk_crossing>(static_cast<int>(c));
    });
}

const char* hk_crossing_name(hk_crossing c) {
    if (c < HK_SEPARATING || c > HK_BIDIRECTIONAL) return "unknown";
    return hk::crossing_class_name(static_cast<hk::CrossingClass>(static_cast<int>(c)));
}

static hk::IntegratorOptions sampling(const hk::Scenario& sc, double horizon) {
    hk::IntegratorOptions o;
    o.sample_dt = hk::resolved_sample_dt(sc, horizon);
    return o;
}

hk_status hk_rate_bound(const hk_scenario* sc, double* out) {
    return guard([&] {
        need(sc, "scenario");
        need(out, "out");
        *out = hk::rate_bound(sc->sc);
    });
}

hk_status hk_solve_caratheodory(const hk_scenario* sc, const char* branch, double horizon, hk_trajectory** out) {
    return put_trajectory(out, [&] {
        need(sc, "scenario");
        return hk::solve_caratheodory(sc->sc, hk::BranchSpec::parse(branch ? branch : ""), horizon,
                                      sampling(sc->sc, horizon));
    });
}

hk_status hk_solve_sliding(const hk_scenario* sc, const char* pins, double horizon, const char* branch,
                           hk_trajectory** out) {
    return put_trajectory(out, [&] {
        need(sc, "scenario");
        need(pins, "pins");
        return hk::solve_filippov_sliding(sc->sc, parse_pins(pins), horizon, hk::BranchSpec::parse(branch ? branch : ""),
                                          sampling(sc->sc, horizon));
    });
}

hk_status hk_solve_clss_uniform(const hk_scenario* sc, double horizon, size_t steps, hk_trajectory** out) {
    return put_trajectory(out, [&] {
        need(sc, "scenario");
        return hk::solve_clss(sc->sc, hk::StepSchedule::uniform(horizon, steps));
    });
}

hk_status hk_solve_clss_jump(const hk_scenario* sc, size_t K, size_t r, double T, double extend_to, size_t stride,
                             double dense_until, hk_trajectory** out) {
    return put_trajectory(out, [&] {
        need(sc, "scenario");
        hk::ClssOptions o;
        o.stride = stride ? stride : 1;
        o.dense_until = dense_until;
        return hk::solve_clss_jump_schedule(sc->sc, K, r, T, extend_to, o);
    });
}

hk_status hk_solve_stratified(const hk_scenario* sc, const char* strat, double horizon, hk_trajectory** out) {
    return put_trajectory(out, [&] {
        need(sc, "scenario");
        need(strat, "stratification");
        std::string s = strat;
        hk::Stratification st;
        if (s == "toy1")
            st = hk::toy_stratification(false);
        else if (s == "toy2")
            st = hk::toy_stratification(true);
        else if (s == "three")
            st = hk::builtin_stratification_3agents();
        else
            hk::fail(hk::ErrorKind::Argument, "unknown stratification '" + s + "'");
        return hk::solve_stratified(sc->sc, st, horizon, sampling(sc->sc, horizon));
    });
}

hk_status hk_check_classical(const hk_trajectory* tr, const hk_scenario* sc, double tol, int* classical,
                             double* residual) {
    return guard([&] {
        need(tr, "trajectory");
        need(sc, "scenario");
        auto rep = hk::check_classical(tr->tr, sc->sc, tol);
        if (classical) *classical = rep.classical ? 1 : 0;
        if (residual) *residual = rep.max_residual;
    });
}

size_t hk_trajectory_size(const hk_trajectory* tr) { return tr ? tr->tr.size() : 0; }
size_t hk_trajectory_agents(const hk_trajectory* tr) { return tr ? tr->tr.agents() : 0; }
size_t hk_trajectory_dim(const hk_trajectory* tr) { return tr ? tr->tr.dim() : 0; }
double hk_trajectory_time(const hk_trajectory* tr, size_t k) {
    return tr && k < tr->tr.size() ? tr->tr.times()[k] : std::nan("");
}

hk_status hk_trajectory_state(const hk_trajectory* tr, size_t k, double* out) {
    return guard([&] {
        need(tr, "trajectory");
        need(out, "out");
        if (k >= tr->tr.size()) hk::fail(hk::ErrorKind::Index, "sample index out of range");
        const auto& x = tr->tr.state(k);
        std::copy(x.begin(), x.end(), out);
    });
}

hk_status hk_trajectory_at(const hk_trajectory* tr, double t, double* out) {
    return guard([&] {
        need(tr, "trajectory");
        need(out, "out");
        auto x = tr->tr.at(t);
        std::copy(x.begin(), x.end(), out);
    });
}

size_t hk_trajectory_event_count(const hk_trajectory* tr) { return tr ? tr->tr.events().size() : 0; }

hk_status hk_trajectory_event(const hk_trajectory* tr, size_t index, double* time, const char** pairs,
                              const char** classes, const char** action) {
    return guard([&] {
        need(tr, "trajectory");
        const auto& ev = tr->tr.events();
        if (index >= ev.size()) hk::fail(hk::ErrorKind::Index, "event index out of range");
        auto* self = const_cast<hk_trajectory*>(tr);
        if (self->pairs.size() != ev.size()) {
            self->pairs.clear();
            self->classes.clear();
            for (const auto& e : ev) {
                std::string p, c;
                for (std::size_t k = 0; k < e.pairs.size(); ++k) p += (k ? "," : "") + hk::format_pair(e.pairs[k]);
                for (std::size_t k = 0; k < e.classes.size(); ++k)
                    c += std::string(k ? "," : "") + hk::crossing_class_name(e.classes[k]);
                self->pairs.push_back(p);
                self->classes.push_back(c);
            }
        }
        if (time) *time = ev[index].time;
        if (pairs) *pairs = self->pairs[index].c_str();
        if (classes) *classes = self->classes[index].c_str();
        if (action) *action = ev[index].action.c_str();
    });
}

hk_status hk_trajectory_info(const hk_trajectory* tr, const char* key, double* value) {
    return guard([&] {
        need(tr, "trajectory");
        need(key, "key");
        need(value, "value");
        auto it = tr->tr.info.find(key);
        if (it == tr->tr.info.end()) hk::fail(hk::ErrorKind::Argument, std::string("no info value ") + key);
        *value = it->second;
    });
}

hk_status hk_trajectory_save_csv(const hk_trajectory* tr, const char* path) {
    return guard([&] {
        need(tr, "trajectory");
        auto f = open_out(path);
        hk::write_trajectory_csv(f, tr->tr);
    });
}

hk_status hk_trajectory_save_events(const hk_trajectory* tr, const char* path) {
    return guard([&] {
        need(tr, "trajectory");
        auto f = open_out(path);
        hk::write_events(f, tr->tr);
    });
}

hk_status hk_trajectory_load_csv(const char* path, hk_trajectory** out) {
    return put_trajectory(out, [&] {
        auto f = open_in(path);
        return hk::read_trajectory_csv(f);
    });
}

hk_status hk_trajectory_load_events(hk_trajectory* tr, const char* path) {
    return guard([&] {
        need(tr, "trajectory");
        auto f = open_in(path);
        hk::read_events(f, tr->tr);
        tr->pairs.clear();
        tr->classes.clear();
    });
}

void hk_trajectory_free(hk_trajectory* tr) { delete tr; }

hk_status hk_barycenter_drift(const hk_trajectory* tr, double* out) {
    return guard([&] {
        need(tr, "trajectory");
        need(out, "out");
        *out = hk::barycenter_drift(tr->tr);
    });
}

hk_status hk_hull_violation(const hk_trajectory* tr, size_t stride, double* out) {
    return guard([&] {
        need(tr, "trajectory");
        need(out, "out");
        *out = hk::hull_contractivity_report(tr->tr, stride);
    });
}

hk_status hk_lyapunov_increase(const hk_trajectory* tr, const hk_scenario* sc, double* out) {
    return guard([&] {
        need(tr, "trajectory");
        need(out, "out");
        *out = hk::lyapunov_monotone_check(tr->tr, analysis_scenario(tr, sc).kernel);
    });
}

hk_status hk_peak_speed(const hk_trajectory* tr, double* out) {
    return guard([&] {
        need(tr, "trajectory");
        need(out, "out");
        *out = hk::peak_speed(tr->tr);
    });
}

hk_status hk_inclusion_residual(const hk_trajectory* tr, const hk_scenario* sc, double* residual,
                                double* worst_time) {
    return guard([&] {
        need(tr, "trajectory");
        auto s = analysis_scenario(tr, sc);
        auto rep = hk::filippov_inclusion_residual(tr->tr, s.kernel, s.variant);
        if (residual) *residual = rep.max_residual;
        if (worst_time) *worst_time = rep.worst_time;
    });
}

hk_status hk_inclusion_alpha(const hk_trajectory* tr, const hk_scenario* sc, size_t i, size_t j, double t,
                             double* alpha) {
    return guard([&] {
        need(tr, "trajectory");
        need(alpha, "alpha");
        if (i == 0 || j == 0) hk::fail(hk::ErrorKind::Index, "agent indices are 1-based");
        auto s = analysis_scenario(tr, sc);
        auto rep = hk::filippov_inclusion_residual(tr->tr, s.kernel, s.variant);
        auto it = rep.alpha.find(hk::make_pair_checked(i - 1, j - 1));
        if (it == rep.alpha.end() || it->second.empty())
            hk::fail(hk::ErrorKind::Argument, "pair never sits on the boundary");
        double best = INFINITY, sum = 0.0;
        int count = 0;
        for (const auto& [ts, a] : it->second) {
            double d = std::abs(ts - t);
            if (d < best - 1e-15) {
                best = d;
                sum = a;
                count = 1;
            } else if (std::abs(d - best) <= 1e-15) {
                sum += a;
                ++count;
            }
        }
        *alpha = sum / count;
    });
}

hk_status hk_cluster_report(const hk_trajectory* tr, hk_variant variant, double cluster_tol, double sep_tol,
                            hk_clusters** out) {
    return guard([&] {
        need(tr, "trajectory");
        need(out, "out");
        hk::ClusterOptions o;
        if (cluster_tol > 0.0) o.cluster_tol = cluster_tol;
        if (sep_tol > 0.0) o.sep_tol = sep_tol;
        // Terminal-speed test is relative to how fast the run ever moved.
        o.speed_tol *= std::max(1.0, hk::peak_speed(tr->tr));
        *out = new hk_clusters{hk::cluster_report(tr->tr, variant_of(variant), o), tr->tr.agents()};
    });
}

size_t hk_clusters_count(const hk_clusters* c) { return c ? c->rep.count() : 0; }
size_t hk_clusters_violations(const hk_clusters* c) { return c ? c->rep.violations.size() : 0; }

hk_status hk_clusters_position(const hk_clusters* c, size_t k, double* out) {
    return guard([&] {
        need(c, "clusters");
        need(out, "out");
        if (k >= c->rep.positions.size()) hk::fail(hk::ErrorKind::Index, "cluster index out of range");
        std::copy(c->rep.positions[k].begin(), c->rep.positions[k].end(), out);
    });
}

hk_status hk_clusters_labels(const hk_clusters* c, size_t* out) {
    return guard([&] {
        need(c, "clusters");
        need(out, "out");
        for (std::size_t b = 0; b < c->rep.clusters.blocks.size(); ++b)
            for (auto i : c->rep.clusters.blocks[b]) out[i] = b;
    });
}

void hk_clusters_free(hk_clusters* c) { delete c; }

hk_status hk_compare(const hk_trajectory* a, const hk_trajectory* b, double threshold, double* max_distance,
                     double* divergence_time, double* final_distance) {
    return guard([&] {
        need(a, "trajectory");
        need(b, "trajectory");
        auto r = hk::compare_trajectories(a->tr, b->tr, threshold);
        if (max_distance) *max_distance = r.max_distance;
        if (divergence_time) *divergence_time = r.divergence_time;
        if (final_distance) *final_distance = r.final_distance;
    });
}

hk_status hk_composition_count(size_t N, hk_variant variant, size_t* count) {
    return guard([&] {
        need(count, "count");
        *count = variant_of(variant) == hk::Variant::OpenAtOne ? hk::delta1(N).size() : hk::delta2(N).size();
    });
}

hk_status hk_enumerate_write(size_t N, hk_variant variant, const char* path) {
    return guard([&] {
        if (N < 1 || N > 20) hk::fail(hk::ErrorKind::Argument, "N must lie in 1..20");
        auto v = variant_of(variant);
        if (path && std::string(path) != "-") {
            auto f = open_out(path);
            hk::write_composition_catalogue(f, N, v);
        } else {
            std::ostringstream os;
            hk::write_composition_catalogue(os, N, v);
            std::fputs(os.str().c_str(), stdout);
        }
    });
}

hk_status hk_explore_zero_wait(size_t N, hk_variant variant, size_t* valid, int* matches) {
    return guard([&] {
        auto v = variant_of(variant);
        auto res = hk::explore_zero_wait(N, v);
        std::set<hk::Partition> got, want;
        std::size_t ok = 0;
        for (const auto& r : res)
            if (r.valid) {
                ++ok;
                got.insert(r.terminal);
            }
        for (const auto& c : v == hk::Variant::OpenAtOne ? hk::delta1(N) : hk::delta2(N))
            want.insert(hk::composition_partition(c));
        if (valid) *valid = ok;
        if (matches) *matches = got == want ? 1 : 0;
    });
}

hk_status hk_square_catalogue(hk_variant variant, double horizon, const char* path, size_t histogram[5]) {
    return guard([&] {
        auto out = hk::simulate_square_catalogue(variant_of(variant), horizon);
        if (path) {
            if (std::string(path) == "-") {
                std::ostringstream os;
                hk::write_square_catalogue(os, out);
                std::fputs(os.str().c_str(), stdout);
            } else {
                auto f = open_out(path);
                hk::write_square_catalogue(f, out);
            }
        }
        if (histogram) {
            for (int k = 0; k < 5; ++k) histogram[k] = 0;
            for (auto [k, c] : hk::square_histogram(out))
                if (k < 5) histogram[k] = c;
        }
    });
}

}  // extern "C"
