#include "hk/errors.hpp"
#include "hk/geometry.hpp"
#include "hk/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace hk {

// ---- InteractionGraph ----

InteractionGraph::InteractionGraph(std::size_t agents, std::vector<Pair> edges) : N_(agents) {
    for (auto& e : edges) {
        if (e.i == e.j) fail(ErrorKind::Argument, "interaction graph cannot contain self-loops");
        if (e.i >= agents || e.j >= agents) fail(ErrorKind::Index, "interaction graph edge out of range");
        e = make_pair_checked(e.i, e.j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
}

InteractionGraph InteractionGraph::complete(std::size_t agents) {
    std::vector<Pair> e;
    for (std::size_t i = 0; i < agents; ++i)
        for (std::size_t j = i + 1; j < agents; ++j) e.push_back({i, j});
    return InteractionGraph(agents, std::move(e));
}

bool InteractionGraph::contains(Pair p) const { return std::binary_search(edges_.begin(), edges_.end(), p); }

namespace {

std::string pair_text(Pair p) { return std::to_string(p.i + 1) + "-" + std::to_string(p.j + 1); }

std::string pairs_text(const std::vector<Pair>& ps) {
    std::string s;
    for (const auto& p : ps) {
        if (!s.empty()) s += ',';
        s += pair_text(p);
    }
    return s;
}

}  // namespace

std::string InteractionGraph::describe() const { return "{" + pairs_text(edges_) + "}"; }

// ---- velocity with sliding pairs ----

namespace {

struct HybridField {
    const Configuration* shape = nullptr;
    const InteractionKernel* kernel = nullptr;
    std::vector<Pair> edges;
    std::vector<Pair> pinned;
    double stabilization = 1.0;

    // Returns false when the sliding system is singular.
    bool eval(std::span<const double> x, std::span<double> out, std::vector<double>* alpha = nullptr) const {
        graph_velocity(x, *shape, *kernel, edges, out);
        const std::size_t k = pinned.size();
        if (k == 0) {
            if (alpha) alpha->clear();
            return true;
        }
        const std::size_t n = shape->dim();
        // U_q lives on agents q.i, q.j only.
        auto contrib = [&](const Pair& q, std::size_t agent, std::size_t d) {
            double phi = kernel->phi(q.i, q.j, 1.0);
            double diff = x[q.j * n + d] - x[q.i * n + d];
            if (agent == q.i) return shape->weight(q.j) * phi * diff;
            if (agent == q.j) return -shape->weight(q.i) * phi * diff;
            return 0.0;
        };
        Eigen::MatrixXd M(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        Eigen::VectorXd r(static_cast<Eigen::Index>(k));
        for (std::size_t p = 0; p < k; ++p) {
            const Pair& P = pinned[p];
            double th = squared_distance(x, n, P.i, P.j);
            r(static_cast<Eigen::Index>(p)) = -stabilization * (th - 1.0) / 2.0 - normal_rate(x, out, n, P.i, P.j);
            for (std::size_t q = 0; q < k; ++q) {
                double s = 0.0;
                for (std::size_t d = 0; d < n; ++d)
                    s += (x[P.i * n + d] - x[P.j * n + d]) *
                         (contrib(pinned[q], P.i, d) - contrib(pinned[q], P.j, d));
                M(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = s;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (!lu.isInvertible()) return false;
        Eigen::VectorXd a = lu.solve(r);
        for (std::size_t q = 0; q < k; ++q) {
            const Pair& Q = pinned[q];
            double aq = a(static_cast<Eigen::Index>(q));
            for (std::size_t d = 0; d < n; ++d) {
                out[Q.i * n + d] += aq * contrib(Q, Q.i, d);
                out[Q.j * n + d] += aq * contrib(Q, Q.j, d);
            }
        }
        if (alpha) alpha->assign(a.data(), a.data() + k);
        return true;
    }
};

}  // namespace

std::vector<double> sliding_alpha(const Configuration& config, const InteractionKernel& kernel,
                                  const std::vector<Pair>& edges, const std::vector<Pair>& pinned) {
    HybridField f;
    f.shape = &config;
    f.kernel = &kernel;
    f.edges = edges;
    f.pinned = pinned;
    std::vector<double> v(config.positions().size()), a;
    if (!f.eval(config.positions(), v, &a)) fail(ErrorKind::SlidingInfeasible, "sliding system is singular");
    return a;
}

// ---- integrate_smooth ----

SmoothResult integrate_smooth(const Configuration& config, const InteractionGraph& graph,
                              const InteractionKernel& kernel, double horizon, const IntegratorOptions& opts) {
    check_kernel(config, kernel);
    if (graph.agents() != config.agents()) fail(ErrorKind::Configuration, "graph size does not match configuration");
    if (!(horizon >= 0.0)) fail(ErrorKind::Argument, "horizon must be nonnegative");
    const std::size_t N = config.agents(), n = config.dim();
    std::vector<Pair> pairs;
    std::vector<char> is_edge;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            pairs.push_back({i, j});
            is_edge.push_back(graph.contains({i, j}) ? 1 : 0);
        }
    const auto& edges = graph.edges();
    VectorField f = [&](std::span<const double> x, std::span<double> out) {
        graph_velocity(x, config, kernel, edges, out);
    };
    EventFunction ev = [&](std::span<const double> x, std::vector<double>& g) {
        g.resize(pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            double th = squared_distance(x, n, pairs[k].i, pairs[k].j);
            g[k] = is_edge[k] ? th - 1.0 : 1.0 - th;
        }
    };
    SmoothResult res;
    res.trajectory = Trajectory(N, n, config.weights());
    res.trajectory.append(0.0, config.positions());
    auto seg = integrate_segment(f, &ev, 0.0, config.positions(), horizon, opts, &res.trajectory);
    res.exit_time = seg.t;
    if (seg.event) {
        res.reason = ExitReason::Event;
        for (auto k : seg.fired) res.event_pairs.push_back(pairs[k]);
        EventRecord rec;
        rec.time = seg.t;
        rec.pairs = res.event_pairs;
        rec.action = "stop";
        res.trajectory.add_event(rec);
    }
    return res;
}

// ---- resolve_graph_at_M ----

InteractionGraph resolve_graph_at_M(const Configuration& config, const InteractionKernel& kernel, Variant variant,
                                    const std::vector<Pair>& ordering, double tol) {
    check_kernel(config, kernel);
    (void)variant;
    const std::size_t N = config.agents(), n = config.dim();
    std::span<const double> x(config.positions());
    std::vector<Pair> edges, boundary;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            double th = squared_distance(x, n, i, j);
            if (std::abs(th - 1.0) <= tol)
                boundary.push_back({i, j});
            else if (th < 1.0)
                edges.push_back({i, j});
        }
    std::vector<Pair> order;
    for (const auto& p0 : ordering) {
        Pair p = make_pair_checked(p0.i, p0.j);
        if (std::binary_search(boundary.begin(), boundary.end(), p) &&
            std::find(order.begin(), order.end(), p) == order.end())
            order.push_back(p);
    }
    for (const auto& p : boundary)
        if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
    std::vector<double> v(N * n);
    for (const auto& p : order) {
        graph_velocity(x, config, kernel, edges, v);
        double a = normal_rate(x, v, n, p.i, p.j);
        if (a <= 0.5 * activation_jump(config, kernel, p.i, p.j)) edges.push_back(p);
    }
    return InteractionGraph(N, std::move(edges));
}

// ---- BranchSpec ----

namespace {

std::vector<std::string> split(const std::string& s, const std::string& seps) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (seps.find(c) != std::string::npos) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_time(const std::string& s) {
    if (s == "inf" || s == "never" || s == "Never") return kNever;
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || !(v >= 0.0)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::Parse, "bad wait value '" + s + "'");
    }
}

Pair parse_pair(const std::string& s) {
    auto parts = split(s, "-");
    if (parts.size() != 2) fail(ErrorKind::Parse, "bad pair '" + s + "' (expected i-j)");
    try {
        long a = std::stol(parts[0]), b = std::stol(parts[1]);
        if (a < 1 || b < 1) throw std::invalid_argument(s);
        return make_pair_checked(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail(ErrorKind::Parse, "bad pair '" + s + "'");
    }
}

}  // namespace

BranchSpec BranchSpec::parse(const std::string& text) {
    BranchSpec b;
    for (const auto& tok : split(text, "; \t\n")) {
        if (tok == "others=never") {
            b.others_never = true;
            continue;
        }
        if (tok.rfind("order=", 0) == 0) {
            for (const auto& p : split(tok.substr(6), ",")) b.ordering.push_back(parse_pair(p));
            continue;
        }
        if (tok.rfind("wait=", 0) != 0) fail(ErrorKind::Parse, "bad branch token '" + tok + "'");
        auto colon = tok.find(':');
        if (colon == std::string::npos) fail(ErrorKind::Parse, "branch token '" + tok + "' lacks ':<pairs>'");
        BranchRule r;
        r.wait = parse_time(tok.substr(5, colon - 5));
        std::string what = tok.substr(colon + 1);
        if (what == "all" || what == "both") {
            r.initial_all = true;
        } else {
            for (const auto& p : split(what, ",")) r.pairs.push_back(parse_pair(p));
            if (r.pairs.empty()) fail(ErrorKind::Parse, "branch token '" + tok + "' names no pairs");
        }
        b.rules.push_back(std::move(r));
    }
    return b;
}

std::string BranchSpec::describe() const {
    std::ostringstream os;
    os << std::setprecision(17);
    bool first = true;
    for (const auto& r : rules) {
        if (!first) os << ';';
        first = false;
        os << "wait=";
        if (std::isinf(r.wait))
            os << "inf";
        else
            os << r.wait;
        os << ':' << (r.initial_all ? "all" : pairs_text(r.pairs));
    }
    if (others_never) os << (first ? "" : ";") << "others=never";
    if (!ordering.empty()) os << ";order=" << pairs_text(ordering);
    return os.str();
}

// ---- the hybrid engine ----

namespace {

enum class Sticky { Active, Never, Held };

struct PairMemo {
    Sticky kind = Sticky::Active;
    double until = 0.0;
    bool strict = true;  // inconsistencies at later decisions are errors (holds) or silent flips
};

struct PinState {
    PinWindow w;
    bool started = false;
    bool ended = false;
};

class Engine {
public:
    Engine(const Scenario& sc, const BranchSpec& br, std::vector<PinWindow> pins, double horizon,
           const IntegratorOptions& opt)
        : sc_(sc), br_(br), horizon_(horizon), opt_(opt), shape_(sc.initial) {
        check_kernel(sc.initial, sc.kernel);
        if (!(horizon >= 0.0) || !std::isfinite(horizon)) fail(ErrorKind::Argument, "horizon must be finite and nonnegative");
        N_ = shape_.agents();
        n_ = shape_.dim();
        for (std::size_t i = 0; i < N_; ++i)
            for (std::size_t j = i + 1; j < N_; ++j) all_pairs_.push_back({i, j});
        for (std::size_t r = 0; r < br.rules.size(); ++r) {
            const auto& rule = br.rules[r];
            if (!(rule.wait >= 0.0)) fail(ErrorKind::Branch, "wait durations must be nonnegative");
            if (rule.initial_all) {
                if (all_rule_ >= 0) fail(ErrorKind::Branch, "two rules address all initial pairs");
                all_rule_ = static_cast<int>(r);
            }
            for (const auto& p : rule.pairs) {
                if (p.j >= N_) fail(ErrorKind::Branch, "rule names agent beyond N");
                if (rule_of_.count(p)) fail(ErrorKind::Branch, "pair " + pair_text(p) + " named by two rules");
                rule_of_[p] = r;
            }
        }
        for (auto& w : pins) {
            if (w.pair.j >= N_) fail(ErrorKind::Argument, "pinned pair beyond N");
            w.pair = make_pair_checked(w.pair.i, w.pair.j);
            if (!(w.start >= 0.0) || !(w.end >= w.start)) fail(ErrorKind::Argument, "bad pin window");
            pins_.push_back({w, false, w.end <= w.start});
        }
        field_.shape = &shape_;
        field_.kernel = &sc_.kernel;
    }

    Trajectory run() {
        traj_ = Trajectory(N_, n_, shape_.weights());
        x_ = shape_.positions();
        t_ = 0.0;
        traj_.append(0.0, x_);
        decide(true, {});
        int stalls = 0;
        double last_decision = 0.0;
        while (t_ < horizon_) {
            double stop = next_stop();
            std::vector<Pair> watch;
            for (const auto& p : all_pairs_)
                if (!is_pinned(p)) watch.push_back(p);
            std::vector<char> edge(watch.size());
            for (std::size_t k = 0; k < watch.size(); ++k) edge[k] = is_edge(watch[k]) ? 1 : 0;
            const std::size_t npin = field_.pinned.size();
            bool singular = false;
            VectorField f = [&](std::span<const double> x, std::span<double> out) {
                if (!field_.eval(x, out)) singular = true;
            };
            std::vector<double> vbuf(N_ * n_), abuf;
            EventFunction ev = [&](std::span<const double> x, std::vector<double>& g) {
                g.resize(watch.size() + 2 * npin);
                for (std::size_t k = 0; k < watch.size(); ++k) {
                    double th = squared_distance(x, n_, watch[k].i, watch[k].j);
                    g[k] = edge[k] ? th - 1.0 : 1.0 - th;
                }
                if (npin) {
                    field_.eval(x, vbuf, &abuf);
                    for (std::size_t q = 0; q < npin; ++q) {
                        double a = q < abuf.size() ? abuf[q] : 0.5;
                        g[watch.size() + 2 * q] = -a;
                        g[watch.size() + 2 * q + 1] = a - 1.0;
                    }
                }
            };
            StepHook hook = [&](double, std::span<const double> x) { forget_departed(x); };
            auto seg = integrate_segment(f, &ev, t_, x_, stop, opt_, &traj_, &hook);
            if (singular) fail(ErrorKind::SlidingInfeasible, "sliding system became singular");
            t_ = seg.t;
            x_ = seg.x;
            std::vector<std::pair<Pair, bool>> slide_exits;
            for (auto k : seg.fired)
                if (k >= watch.size()) {
                    std::size_t q = (k - watch.size()) / 2;
                    bool above = (k - watch.size()) % 2 == 1;
                    slide_exits.push_back({field_.pinned[q], above});
                }
            if (!seg.event && t_ >= horizon_) break;
            if (t_ - last_decision < 1e-12) {
                if (++stalls > 50) fail(ErrorKind::Integrator, "events accumulate without time advancing");
            } else {
                stalls = 0;
            }
            last_decision = t_;
            decide(false, slide_exits);
        }
        for (const auto& [p, r] : rule_of_)
            if (!applied_.count(p))
                fail(ErrorKind::Branch, "rule for " + pair_text(p) + " never applied: the pair did not reach M");
        for (const auto& ps : pins_)
            if (!ps.started && !ps.ended && ps.w.start < horizon_)
                fail(ErrorKind::Argument, "pin window never started");
        record_alphas();
        return std::move(traj_);
    }

    void record_alphas() {
        std::set<Pair> ever;
        for (const auto& ph : phases_)
            for (const auto& p : ph.pinned) ever.insert(p);
        if (ever.empty()) return;
        const auto& ts = traj_.times();
        std::map<Pair, std::vector<double>> cols;
        for (const auto& p : ever) cols[p].assign(ts.size(), std::nan(""));
        std::size_t ph = 0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            while (ph + 1 < phases_.size() && phases_[ph + 1].start <= ts[k]) ++ph;
            const auto& P = phases_[ph];
            if (P.pinned.empty()) continue;
            HybridField f = field_;
            f.edges = P.edges;
            f.pinned = P.pinned;
            std::vector<double> v(N_ * n_), a;
            if (!f.eval(traj_.state(k), v, &a)) continue;
            for (std::size_t q = 0; q < P.pinned.size(); ++q) cols[P.pinned[q]][k] = a[q];
        }
        for (auto& [p, c] : cols) traj_.series["alpha " + pair_text(p)] = std::move(c);
    }

private:
    bool is_pinned(const Pair& p) const {
        return std::find(field_.pinned.begin(), field_.pinned.end(), p) != field_.pinned.end();
    }
    bool is_edge(const Pair& p) const {
        return std::find(field_.edges.begin(), field_.edges.end(), p) != field_.edges.end();
    }
    double theta_of(std::span<const double> x, const Pair& p) const { return squared_distance(x, n_, p.i, p.j); }

    void forget_departed(std::span<const double> x) {
        for (auto it = memo_.begin(); it != memo_.end();) {
            if (std::abs(theta_of(x, it->first) - 1.0) > opt_.boundary_tol)
                it = memo_.erase(it);
            else
                ++it;
        }
    }

    double next_stop() const {
        double s = horizon_;
        for (const auto& [p, m] : memo_)
            if (m.kind == Sticky::Held && m.until > t_) s = std::min(s, m.until);
        for (const auto& ps : pins_) {
            if (!ps.started && !ps.ended && ps.w.start > t_) s = std::min(s, ps.w.start);
            if (ps.started && !ps.ended && ps.w.end > t_) s = std::min(s, ps.w.end);
        }
        return s;
    }

    std::vector<double> velocity(const std::vector<Pair>& edges) {
        HybridField f = field_;
        f.edges = edges;
        std::vector<double> v(N_ * n_);
        if (!f.eval(x_, v)) fail(ErrorKind::SlidingInfeasible, "sliding system is singular");
        return v;
    }

    double rate_tol() const {
        double scale = 1.0;
        for (double c : x_) scale = std::max(scale, std::abs(c));
        return 1e-9 * scale * scale;
    }

    // Short look-ahead with the candidate graph: +1 leaves M outward, -1 enters, 0 stays on M.
    int lookahead(const std::vector<Pair>& edges, const Pair& p) {
        HybridField f = field_;
        f.edges = edges;
        VectorField vf = [&](std::span<const double> x, std::span<double> out) { f.eval(x, out); };
        IntegratorOptions o = opt_;
        o.max_step = 1e-4;
        auto seg = integrate_segment(vf, nullptr, t_, x_, t_ + 1e-3, o, nullptr);
        double d = theta_of(seg.x, p) - theta_of(x_, p);
        if (d > 1e-13) return 1;
        if (d < -1e-13) return -1;
        return 0;
    }

    struct Request {
        bool on = false;
        enum Origin { Default, Fresh, Sticky, Hold } origin = Default;
    };

    void decide(bool initial, const std::vector<std::pair<Pair, bool>>& slide_exits) {
        const double eps = 1e-12;
        std::vector<std::string> notes;
        // Pins.
        for (auto& [p, above] : slide_exits) {
            for (auto& ps : pins_)
                if (ps.started && !ps.ended && ps.w.pair == p) ps.ended = true;
            field_.pinned.erase(std::remove(field_.pinned.begin(), field_.pinned.end(), p), field_.pinned.end());
            memo_[p] = PairMemo{above ? Sticky::Never : Sticky::Active, 0.0, false};
            notes.push_back("sliding " + pair_text(p) + (above ? " ends (coefficient reached 1)" : " ends (coefficient reached 0)"));
        }
        for (auto& ps : pins_) {
            if (ps.started && !ps.ended && ps.w.end <= t_ + eps) {
                ps.ended = true;
                field_.pinned.erase(std::remove(field_.pinned.begin(), field_.pinned.end(), ps.w.pair),
                                    field_.pinned.end());
                memo_.erase(ps.w.pair);
                released_.insert(ps.w.pair);
                notes.push_back("release " + pair_text(ps.w.pair));
            }
            if (!ps.started && !ps.ended && ps.w.start <= t_ + eps) {
                if (std::abs(theta_of(x_, ps.w.pair) - 1.0) > opt_.boundary_tol)
                    fail(ErrorKind::SlidingInfeasible, "pinned pair " + pair_text(ps.w.pair) + " is not at distance 1");
                ps.started = true;
                field_.pinned.push_back(ps.w.pair);
                memo_.erase(ps.w.pair);
                notes.push_back("pin " + pair_text(ps.w.pair));
            }
        }

        std::vector<Pair> boundary, edges;
        for (const auto& p : all_pairs_) {
            if (is_pinned(p)) continue;
            double th = theta_of(x_, p);
            if (std::abs(th - 1.0) <= opt_.boundary_tol)
                boundary.push_back(p);
            else if (th < 1.0)
                edges.push_back(p);
        }
        for (auto it = memo_.begin(); it != memo_.end();) {
            if (!std::binary_search(boundary.begin(), boundary.end(), it->first)) {
                if (it->second.kind == Sticky::Held) notes.push_back("hold on " + pair_text(it->first) + " dropped (left M)");
                it = memo_.erase(it);
            } else {
                ++it;
            }
        }

        std::map<Pair, Request> req;
        std::vector<Pair> defaults;
        for (const auto& p : boundary) {
            Request r;
            auto m = memo_.find(p);
            bool fresh = seen_.insert(p).second || released_.erase(p) > 0;
            if (m != memo_.end()) {
                r.origin = m->second.strict ? Request::Sticky : Request::Default;
                if (m->second.kind == Sticky::Held) {
                    if (m->second.until <= t_ + eps) {
                        r.on = true;
                        r.origin = Request::Fresh;
                        m->second.kind = Sticky::Active;
                        notes.push_back("activate " + pair_text(p) + " after wait");
                    } else {
                        r.on = false;
                        r.origin = Request::Hold;
                    }
                } else {
                    r.on = m->second.kind == Sticky::Active;
                }
                if (!m->second.strict) {
                    r.origin = Request::Sticky;
                    memo_.erase(m);
                }
                req[p] = r;
                continue;
            }
            int rule = -1;
            if (fresh) {
                auto it = rule_of_.find(p);
                if (it != rule_of_.end() && !applied_.count(p))
                    rule = static_cast<int>(it->second);
                else if (initial && all_rule_ >= 0 && it == rule_of_.end())
                    rule = all_rule_;
            }
            if (rule >= 0) {
                if (!br_.rules[static_cast<std::size_t>(rule)].initial_all) applied_.insert(p);
                double w = br_.rules[static_cast<std::size_t>(rule)].wait;
                if (w == 0.0) {
                    r.on = true;
                    memo_[p] = {Sticky::Active, 0.0, true};
                    r.origin = Request::Fresh;
                } else if (std::isinf(w)) {
                    r.on = false;
                    memo_[p] = {Sticky::Never, 0.0, true};
                    r.origin = Request::Fresh;
                } else {
                    if (sc_.variant == Variant::ClosedAtOne)
                        fail(ErrorKind::Branch, "positive wait on " + pair_text(p) +
                                                    " is not a solution of the closed variant");
                    r.on = false;
                    memo_[p] = {Sticky::Held, t_ + w, true};
                    r.origin = Request::Hold;
                    std::ostringstream os;
                    os << std::setprecision(17) << "hold " << pair_text(p) << " until " << t_ + w;
                    notes.push_back(os.str());
                }
                req[p] = r;
                continue;
            }
            if (fresh && br_.others_never) {
                memo_[p] = {Sticky::Never, 0.0, true};
                req[p] = Request{false, Request::Fresh};
                continue;
            }
            req[p] = Request{false, Request::Default};
            defaults.push_back(p);
        }
        for (const auto& [p, r] : req)
            if (r.on) edges.push_back(p);

        // Default pairs: recursive construction in the branch ordering.
        std::vector<Pair> order;
        for (const auto& p : br_.ordering)
            if (std::find(defaults.begin(), defaults.end(), p) != defaults.end() &&
                std::find(order.begin(), order.end(), p) == order.end())
                order.push_back(p);
        for (const auto& p : defaults)
            if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
        for (const auto& p : order) {
            auto v = velocity(edges);
            double a = normal_rate(x_, v, n_, p.i, p.j);
            if (a <= 0.5 * activation_jump(shape_, sc_.kernel, p.i, p.j)) {
                edges.push_back(p);
                req[p].on = true;
            }
        }

        // Consistency of the chosen continuation.
        const double tol = rate_tol();
        bool settled = false;
        for (std::size_t pass = 0; pass < 4 * boundary.size() + 4 && !settled; ++pass) {
            settled = true;
            auto v = velocity(edges);
            for (const auto& p : boundary) {
                Request& r = req[p];
                double s = normal_rate(x_, v, n_, p.i, p.j);
                auto flip = [&](bool on, const std::string& why) {
                    r.on = on;
                    if (on)
                        edges.push_back(p);
                    else
                        edges.erase(std::remove(edges.begin(), edges.end(), p), edges.end());
                    settled = false;
                    notes.push_back(pair_text(p) + (on ? " on: " : " off: ") + why);
                };
                if (r.on && s > tol) {
                    if (r.origin == Request::Fresh)
                        fail(ErrorKind::Branch, "activating " + pair_text(p) + " is inconsistent: the pair separates");
                    flip(false, "separates");
                    memo_.erase(p);
                    break;
                }
                if (!r.on && s < -tol) {
                    if (r.origin == Request::Fresh || r.origin == Request::Hold)
                        fail(ErrorKind::Branch, "keeping " + pair_text(p) + " inactive is inconsistent: the pair merges");
                    flip(true, "merges");
                    memo_.erase(p);
                    break;
                }
                if (std::abs(s) <= tol) {
                    bool bad_open = sc_.variant == Variant::OpenAtOne && r.on;
                    bool bad_closed = sc_.variant == Variant::ClosedAtOne && !r.on;
                    if (bad_open || bad_closed) {
                        if (lookahead(edges, p) == 0) {
                            if (r.origin != Request::Default)
                                fail(ErrorKind::Branch, std::string("pair ") + pair_text(p) + " would stay at distance 1 while " +
                                                            (r.on ? "active under the open variant" : "inactive under the closed variant"));
                            flip(!r.on, "stays on M");
                            break;
                        }
                    }
                }
            }
        }
        if (!settled) fail(ErrorKind::Integrator, "no consistent continuation found at a point of M");

        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        field_.edges = edges;
        if (!field_.pinned.empty()) {
            std::vector<double> v(N_ * n_), a;
            if (!field_.eval(x_, v, &a)) fail(ErrorKind::SlidingInfeasible, "sliding system is singular");
            for (double c : a)
                if (c < -1e-9 || c > 1.0 + 1e-9)
                    fail(ErrorKind::SlidingInfeasible, "sliding needs a boundary coefficient outside [0,1]");
        }
        phases_.push_back({t_, field_.edges, field_.pinned});

        if (!boundary.empty() || !notes.empty()) {
            EventRecord rec;
            rec.time = t_;
            Configuration c = shape_.with_positions(x_);
            for (const auto& p : boundary) {
                rec.pairs.push_back(p);
                CrossingClass cls = CrossingClass::Degenerate;
                try {
                    cls = classify_crossing(c, p.i, p.j, sc_.kernel, sc_.variant, std::max(1e-9, opt_.boundary_tol));
                } catch (const Error&) {
                }
                rec.classes.push_back(cls);
            }
            std::string action;
            std::vector<Pair> on, off;
            for (const auto& p : boundary) (std::binary_search(edges.begin(), edges.end(), p) ? on : off).push_back(p);
            action = "on{" + pairs_text(on) + "} off{" + pairs_text(off) + "}";
            if (!field_.pinned.empty()) action += " pinned{" + pairs_text(field_.pinned) + "}";
            for (const auto& s : notes) action += "; " + s;
            rec.action = action;
            traj_.add_event(rec);
        }
    }

    const Scenario& sc_;
    const BranchSpec& br_;
    double horizon_;
    IntegratorOptions opt_;
    Configuration shape_;
    std::size_t N_ = 0, n_ = 0;
    std::vector<Pair> all_pairs_;
    std::set<Pair> applied_;
    std::map<Pair, std::size_t> rule_of_;
    int all_rule_ = -1;
    std::vector<PinState> pins_;
    std::map<Pair, PairMemo> memo_;
    std::set<Pair> seen_, released_;
    HybridField field_;
    struct Phase {
        double start;
        std::vector<Pair> edges, pinned;
    };
    std::vector<Phase> phases_;
    Trajectory traj_;
    std::vector<double> x_;
    double t_ = 0.0;
};

}  // namespace

Trajectory solve_caratheodory(const Scenario& scenario, const BranchSpec& branch, double horizon,
                              const IntegratorOptions& opts) {
    Engine e(scenario, branch, {}, horizon, opts);
    return e.run();
}

Trajectory solve_filippov_sliding(const Scenario& scenario, const std::vector<PinWindow>& pins, double horizon,
                                  const BranchSpec& branch, const IntegratorOptions& opts) {
    for (const auto& p : pins)
        if (p.start == 0.0 && p.end > 0.0) {
            const auto& x = scenario.initial;
            if (p.pair.i >= x.agents() || p.pair.j >= x.agents()) fail(ErrorKind::Argument, "pinned pair beyond N");
            if (std::abs(theta(x, p.pair.i, p.pair.j) - 1.0) > opts.boundary_tol)
                fail(ErrorKind::SlidingInfeasible, "pinned pairs must start at distance 1");
        }
    Engine e(scenario, branch, pins, horizon, opts);
    return e.run();
}

double rate_bound(const Scenario& scenario) {
    const std::size_t N = scenario.initial.agents();
    double L = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            double m = 0.0;
            for (int q = 0; q <= 20; ++q) m = std::max(m, scenario.kernel.phi(i, j, q / 20.0));
            row += scenario.initial.weight(j) * m;
        }
        L = std::max(L, row);
    }
    return L;
}

double resolved_sample_dt(const Scenario& scenario, double horizon) {
    const double L = rate_bound(scenario);
    double dt = L > 0.0 ? std::min(0.01, 0.003 / L) : 0.01;
    if (std::isfinite(horizon) && horizon > 0.0) dt = std::max(dt, horizon / 1e6);
    return dt;
}

}  // namespace hk
