// hkdyn command-line front end; talks to the library only through hkdyn.h.
#include "hkdyn/hkdyn.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

struct Failure {
    int code;
    std::string message;
};

void check(hk_status s, const std::string& what) {
    if (s == HK_OK) return;
    int code = (s == HK_E_PARSE || s == HK_E_IO || s == HK_E_ARGUMENT) ? kExitUsage : kExitSolver;
    throw Failure{code, what + ": " + hk_status_name(s) + ": " + hk_last_error()};
}

using ScenarioPtr = std::unique_ptr<hk_scenario, decltype(&hk_scenario_free)>;
using TrajectoryPtr = std::unique_ptr<hk_trajectory, decltype(&hk_trajectory_free)>;
using ClustersPtr = std::unique_ptr<hk_clusters, decltype(&hk_clusters_free)>;

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_time(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Failure{kExitUsage, "bad number '" + s + "'"};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

ScenarioPtr load_scenario(const std::string& ref) {
    hk_scenario* sc = nullptr;
    if (std::filesystem::is_regular_file(ref))
        check(hk_scenario_load(ref.c_str(), &sc), "loading scenario " + ref);
    else
        check(hk_scenario_builtin(ref.c_str(), &sc), "scenario " + ref);
    return ScenarioPtr(sc, hk_scenario_free);
}

hk_variant parse_variant(const std::string& s) {
    if (s == "open") return HK_OPEN;
    if (s == "closed") return HK_CLOSED;
    throw Failure{kExitUsage, "variant must be open or closed"};
}

std::string state_text(const hk_trajectory* tr, std::size_t k) {
    std::size_t N = hk_trajectory_agents(tr), n = hk_trajectory_dim(tr);
    std::vector<double> x(N * n);
    check(hk_trajectory_state(tr, k, x.data()), "state");
    std::string s;
    for (std::size_t i = 0; i < N; ++i) {
        if (i) s += ";";
        for (std::size_t d = 0; d < n; ++d) s += (d ? "," : "") + num(x[i * n + d]);
    }
    return s;
}

// Outcome of the property checks shared by run and check.
struct CheckLine {
    std::string name;
    std::string value;
    std::string verdict;  // pass, fail, report, skipped
};

struct CheckSet {
    bool p1 = true, hull = true, lyapunov = true, inclusion = true, cluster = true;
};

CheckSet parse_checks(const std::string& text) {
    CheckSet c{false, false, false, false, false};
    for (const auto& item : split(text, ',')) {
        if (item == "p1") c.p1 = true;
        else if (item == "hull") c.hull = true;
        else if (item == "lyapunov") c.lyapunov = true;
        else if (item == "inclusion") c.inclusion = true;
        else if (item == "cluster") c.cluster = true;
        else if (item == "all") c = CheckSet{};
        else throw Failure{kExitUsage, "unknown check '" + item + "'"};
    }
    return c;
}

std::vector<CheckLine> run_checks(const hk_trajectory* tr, const hk_scenario* sc, hk_variant variant,
                                  const CheckSet& which) {
    std::vector<CheckLine> out;
    const std::size_t size = hk_trajectory_size(tr);
    const double horizon = size ? hk_trajectory_time(tr, size - 1) - hk_trajectory_time(tr, 0) : 0.0;
    double flag = 0.0;
    const bool discrete = hk_trajectory_info(tr, "piecewise_linear", &flag) == HK_OK && flag != 0.0;

    if (which.p1) {
        double d = 0.0;
        check(hk_barycenter_drift(tr, &d), "barycenter drift");
        out.push_back({"p1", num(d), d <= 1e-9 * (1.0 + horizon) ? "pass" : "fail"});
    }
    if (which.hull) {
        double h = 0.0;
        std::size_t stride = std::max<std::size_t>(1, size / 2000);
        check(hk_hull_violation(tr, stride, &h), "hull");
        out.push_back({"hull", num(h), h <= 1e-8 ? "pass" : "fail"});
    }
    if (which.lyapunov) {
        double inc = 0.0;
        check(hk_lyapunov_increase(tr, sc, &inc), "lyapunov");
        // Explicit Euler may raise V transiently; reported only.
        out.push_back({"lyapunov", num(inc), discrete ? "report" : (inc <= 1e-9 ? "pass" : "fail")});
    }
    if (which.inclusion) {
        if (discrete) {
            out.push_back({"inclusion", "-", "skipped"});
        } else {
            // Finite-difference velocities are only trusted when sampling resolves the fastest rate.
            double rate = 0.0;
            const double spacing = size > 1 ? hk_trajectory_time(tr, 1) - hk_trajectory_time(tr, 0) : 0.0;
            if (sc) check(hk_rate_bound(sc, &rate), "rate bound");
            if (rate * spacing > 0.003 * (1.0 + 1e-9) && spacing < 0.01 * (1.0 - 1e-9)) {
                out.push_back({"inclusion", "coarse-sampling", "skipped"});
            } else {
                double res = 0.0, worst = 0.0, peak = 0.0;
                hk_status s = hk_inclusion_residual(tr, sc, &res, &worst);
                if (s == HK_E_SAMPLING) {
                    out.push_back({"inclusion", "-", "skipped"});
                } else {
                    check(s, "inclusion");
                    check(hk_peak_speed(tr, &peak), "peak speed");
                    const double tol = 1e-6 * std::max(1.0, peak);
                    out.push_back({"inclusion", num(res) + "@" + num(worst), res <= tol ? "pass" : "fail"});
                }
            }
        }
    }
    if (which.cluster) {
        hk_clusters* raw = nullptr;
        hk_status s = hk_cluster_report(tr, variant, 0.0, 0.0, &raw);
        if (s == HK_E_NOT_CONVERGED) {
            out.push_back({"cluster", "not-converged", "skipped"});
        } else {
            check(s, "cluster report");
            ClustersPtr cl(raw, hk_clusters_free);
            std::size_t bad = hk_clusters_violations(cl.get());
            out.push_back({"cluster",
                           std::to_string(hk_clusters_count(cl.get())) + " clusters, " + std::to_string(bad) +
                               " violations",
                           bad == 0 ? "pass" : "fail"});
        }
    }
    return out;
}

bool all_passed(const std::vector<CheckLine>& lines) {
    for (const auto& l : lines)
        if (l.verdict == "fail") return false;
    return true;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Failure{kExitUsage, "cannot write " + path};
    return f;
}

// ---- run ----

struct RunArgs {
    std::string scenario;
    std::string solution = "caratheodory";
    std::string branch;
    std::vector<std::string> pins;
    std::vector<std::string> windows;
    double horizon = 30.0;
    std::string schedule = "uniform";
    std::size_t steps = 0;
    std::size_t K = 40000, r = 100;
    double T = 0.0, extend_to = 0.0;
    std::size_t stride = 1;
    std::string stratification;
    double tol = 1e-3;
    std::string out = "run";
};

int cmd_run(const RunArgs& a) {
    auto sc = load_scenario(a.scenario);
    const hk_variant variant = hk_scenario_variant(sc.get());
    hk_trajectory* raw = nullptr;
    std::vector<std::pair<std::string, std::string>> extra;

    if (a.solution == "caratheodory" || a.solution == "classical-check") {
        check(hk_solve_caratheodory(sc.get(), a.branch.c_str(), a.horizon, &raw), "solver");
    } else if (a.solution == "filippov-sliding") {
        if (a.pins.empty()) throw Failure{kExitUsage, "filippov-sliding needs at least one --pin"};
        if (!a.windows.empty() && a.windows.size() != a.pins.size())
            throw Failure{kExitUsage, "give one --window per --pin or none"};
        std::string spec;
        for (std::size_t k = 0; k < a.pins.size(); ++k) {
            auto ij = split(a.pins[k], ',');
            if (ij.size() != 2) throw Failure{kExitUsage, "--pin expects i,j"};
            spec += (k ? ";" : "") + ij[0] + "-" + ij[1];
            if (!a.windows.empty()) {
                auto w = split(a.windows[k], ',');
                if (w.size() != 2) throw Failure{kExitUsage, "--window expects start,end"};
                parse_time(w[0]);
                parse_time(w[1]);
                spec += "@" + w[0] + ":" + w[1];
            }
        }
        check(hk_solve_sliding(sc.get(), spec.c_str(), a.horizon, a.branch.c_str(), &raw), "solver");
    } else if (a.solution == "clss") {
        if (a.schedule == "uniform") {
            std::size_t steps = a.steps ? a.steps : static_cast<std::size_t>(std::ceil(a.horizon * 1000.0));
            check(hk_solve_clss_uniform(sc.get(), a.horizon, steps, &raw), "solver");
        } else if (a.schedule == "jump") {
            double T = a.T;
            if (!(T > 0.0) && hk_scenario_expected(sc.get(), "T", &T) != HK_OK)
                throw Failure{kExitUsage, "jump schedule needs --T"};
            check(hk_solve_clss_jump(sc.get(), a.K, a.r, T, a.extend_to, a.stride, T, &raw), "solver");
        } else {
            throw Failure{kExitUsage, "schedule must be uniform or jump"};
        }
    } else if (a.solution == "stratified") {
        if (a.stratification.empty()) throw Failure{kExitUsage, "stratified needs --stratification"};
        check(hk_solve_stratified(sc.get(), a.stratification.c_str(), a.horizon, &raw), "solver");
    } else {
        throw Failure{kExitUsage, "unknown concept '" + a.solution + "'"};
    }
    TrajectoryPtr tr(raw, hk_trajectory_free);

    bool classical_ok = true;
    if (a.solution == "classical-check") {
        int classical = 0;
        double residual = 0.0;
        check(hk_check_classical(tr.get(), sc.get(), a.tol, &classical, &residual), "classical check");
        classical_ok = classical != 0;
        extra.emplace_back("classical", classical ? "yes" : "no");
        extra.emplace_back("classical_residual", num(residual));
    }

    check(hk_trajectory_save_csv(tr.get(), (a.out + ".csv").c_str()), "writing trajectory");
    check(hk_trajectory_save_events(tr.get(), (a.out + ".csv.events").c_str()), "writing events");

    auto lines = run_checks(tr.get(), sc.get(), variant, CheckSet{});
    const std::size_t size = hk_trajectory_size(tr.get());
    auto f = open_out(a.out + ".summary");
    f << "scenario=" << hk_scenario_name(sc.get()) << "\n";
    f << "label=" << hk_scenario_label(sc.get()) << "\n";
    f << "variant=" << (variant == HK_OPEN ? "open" : "closed") << "\n";
    f << "concept=" << a.solution << "\n";
    if (!a.branch.empty()) f << "branch=" << a.branch << "\n";
    f << "samples=" << size << "\n";
    f << "events=" << hk_trajectory_event_count(tr.get()) << "\n";
    f << "t_final=" << num(hk_trajectory_time(tr.get(), size - 1)) << "\n";
    f << "x_final=" << state_text(tr.get(), size - 1) << "\n";
    for (const auto& [k, v] : extra) f << k << "=" << v << "\n";
    for (const auto& l : lines) f << "check." << l.name << "=" << l.verdict << " " << l.value << "\n";

    bool ok = all_passed(lines) && classical_ok;
    std::cout << a.out << ".csv: " << size << " samples, " << hk_trajectory_event_count(tr.get()) << " events, "
              << (ok ? "checks pass" : "checks FAIL") << "\n";
    return ok ? kExitOk : kExitCheckFailed;
}

// ---- enumerate ----

int cmd_enumerate(std::size_t N, const std::string& variant_text, bool square, double horizon,
                  const std::string& out) {
    hk_variant v = parse_variant(variant_text);
    const char* path = out.empty() ? "-" : out.c_str();
    if (square) {
        std::size_t hist[5];
        check(hk_square_catalogue(v, horizon, path, hist), "square catalogue");
        std::cerr << "histogram";
        for (int k = 4; k >= 1; --k) std::cerr << " " << k << ":" << hist[k];
        std::cerr << "\n";
        return kExitOk;
    }
    if (N < 1 || N > 20) throw Failure{kExitUsage, "N must lie in 1..20"};
    check(hk_enumerate_write(N, v, path), "enumerate");
    std::size_t count = 0;
    check(hk_composition_count(N, v, &count), "enumerate");
    std::cerr << count << " compositions\n";
    return kExitOk;
}

// ---- check ----

int cmd_check(const std::string& csv, const std::string& checks, const std::string& scenario,
              const std::string& variant_text) {
    CheckSet which = parse_checks(checks);
    hk_trajectory* raw = nullptr;
    check(hk_trajectory_load_csv(csv.c_str(), &raw), "reading " + csv);
    TrajectoryPtr tr(raw, hk_trajectory_free);
    if (std::filesystem::is_regular_file(csv + ".events"))
        check(hk_trajectory_load_events(tr.get(), (csv + ".events").c_str()), "reading events");
    ScenarioPtr sc(nullptr, hk_scenario_free);
    hk_variant variant = HK_OPEN;
    if (!scenario.empty()) {
        sc = load_scenario(scenario);
        variant = hk_scenario_variant(sc.get());
    }
    if (!variant_text.empty()) variant = parse_variant(variant_text);
    auto lines = run_checks(tr.get(), sc.get(), variant, which);
    for (const auto& l : lines) std::cout << l.name << "\t" << l.verdict << "\t" << l.value << "\n";
    bool ok = all_passed(lines);
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitCheckFailed;
}

// ---- compare ----

int cmd_compare(const std::string& a, const std::string& b, double threshold) {
    hk_trajectory *ra = nullptr, *rb = nullptr;
    check(hk_trajectory_load_csv(a.c_str(), &ra), "reading " + a);
    TrajectoryPtr ta(ra, hk_trajectory_free);
    check(hk_trajectory_load_csv(b.c_str(), &rb), "reading " + b);
    TrajectoryPtr tb(rb, hk_trajectory_free);
    double maxd = 0.0, div = 0.0, fin = 0.0;
    check(hk_compare(ta.get(), tb.get(), threshold, &maxd, &div, &fin), "compare");
    std::cout << "max_distance=" << num(maxd) << "\n";
    std::cout << "divergence_time=" << (div < 0.0 ? std::string("never") : num(div)) << "\n";
    std::cout << "final_distance=" << num(fin) << "\n";
    return kExitOk;
}

// ---- scenario-list ----

int cmd_scenario_list(const std::vector<std::string>& write) {
    if (!write.empty()) {
        auto sc = load_scenario(write[0]);
        check(hk_scenario_save(sc.get(), write[1].c_str()), "writing scenario");
        return kExitOk;
    }
    for (std::size_t k = 0; k < hk_builtin_count(); ++k) {
        const char* name = hk_builtin_name(k);
        auto sc = load_scenario(name);
        std::cout << name << "\t" << hk_scenario_agents(sc.get()) << "x" << hk_scenario_dim(sc.get()) << "\t"
                  << (hk_scenario_variant(sc.get()) == HK_OPEN ? "open" : "closed") << "\t"
                  << hk_scenario_label(sc.get()) << "\n";
    }
    return kExitOk;
}

const char* kBranchHelp = R"(Branch grammar (--branch):
  tokens separated by ';' or spaces
  wait=<t|inf>:<targets>   pairs in <targets> switch on t time units after reaching distance 1
                           (inf: never); targets are 'all', 'both' or a list like 1-2,2-3
  others=never             pairs not named by any rule stay off
  order=1-2,2-3            resolution order for simultaneous arrivals
  empty                    default resolution at every arrival
Pins (--pin i,j with --window start,end) hold a pair on distance 1 for filippov-sliding.)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounded-confidence dynamics: solution concepts, branches and property checks"};
    app.require_subcommand(1);
    app.footer(kBranchHelp);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Solve a scenario and write <out>.csv, <out>.csv.events, <out>.summary");
    run_cmd->add_option("--scenario", run.scenario, "Built-in name or scenario file")->required();
    run_cmd->add_option("--concept", run.solution, "caratheodory|filippov-sliding|clss|stratified|classical-check")
        ->check(CLI::IsMember({"caratheodory", "filippov-sliding", "clss", "stratified", "classical-check"}));
    run_cmd->add_option("--branch", run.branch, "Branch specification (see grammar below)");
    run_cmd->add_option("--pin", run.pins, "Pinned pair i,j (repeatable)");
    run_cmd->add_option("--window", run.windows, "Pin window start,end (repeatable; end may be inf)");
    run_cmd->add_option("--horizon", run.horizon, "Final time")->capture_default_str();
    run_cmd->add_option("--schedule", run.schedule, "CLSS schedule: uniform|jump")->capture_default_str();
    run_cmd->add_option("--steps", run.steps, "Uniform CLSS steps (default 1000 per unit time)");
    run_cmd->add_option("--K", run.K, "Jump schedule K")->capture_default_str();
    run_cmd->add_option("--r", run.r, "Jump schedule r")->capture_default_str();
    run_cmd->add_option("--T", run.T, "Jump schedule T (default: scenario value)");
    run_cmd->add_option("--extend-to", run.extend_to, "Continue the jump schedule with uniform steps up to this time");
    run_cmd->add_option("--stride", run.stride, "Keep every stride-th jump-schedule node after T")->capture_default_str();
    run_cmd->add_option("--stratification", run.stratification, "toy1|toy2|three");
    run_cmd->add_option("--tol", run.tol, "Residual tolerance for classical-check")->capture_default_str();
    run_cmd->add_option("--out", run.out, "Output prefix")->capture_default_str();

    std::size_t N = 0;
    std::string variant = "open", enum_out;
    bool square = false;
    double square_horizon = 30.0;
    auto* en = app.add_subcommand("enumerate", "Write the composition catalogue (or the square catalogue)");
    en->add_option("--N", N, "Number of agents (1..20)");
    en->add_option("--variant", variant, "open|closed")->capture_default_str();
    en->add_flag("--square", square, "Simulate the four-agent square catalogue instead");
    en->add_option("--horizon", square_horizon, "Horizon for --square")->capture_default_str();
    en->add_option("--out", enum_out, "Catalogue file (default stdout)");

    std::string csv, checks = "all", check_scenario, check_variant;
    auto* ch = app.add_subcommand("check", "Run property checks on a trajectory CSV");
    ch->add_option("csv", csv, "Trajectory CSV (events are read from <csv>.events when present)")->required();
    ch->add_option("--checks", checks, "Comma list of p1,hull,lyapunov,inclusion,cluster or all")
        ->capture_default_str();
    ch->add_option("--scenario", check_scenario, "Scenario supplying kernel and variant (default phi=1, open)");
    ch->add_option("--variant", check_variant, "Override the variant: open|closed");

    std::string ca, cb;
    double threshold = 1e-6;
    auto* cmp = app.add_subcommand("compare", "Pointwise distance between two trajectory CSV files");
    cmp->add_option("a", ca, "First trajectory")->required();
    cmp->add_option("b", cb, "Second trajectory")->required();
    cmp->add_option("--threshold", threshold, "Divergence threshold")->capture_default_str();

    std::vector<std::string> write;
    auto* sl = app.add_subcommand("scenario-list", "List built-in scenarios or write one to a file");
    sl->add_option("--write", write, "NAME FILE")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run);
        if (en->parsed()) {
            if (!square && N == 0) throw Failure{kExitUsage, "enumerate needs --N"};
            return cmd_enumerate(N, variant, square, square_horizon, enum_out);
        }
        if (ch->parsed()) return cmd_check(csv, checks, check_scenario, check_variant);
        if (cmp->parsed()) return cmd_compare(ca, cb, threshold);
        if (sl->parsed()) return cmd_scenario_list(write);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    }
    return kExitUsage;
}
