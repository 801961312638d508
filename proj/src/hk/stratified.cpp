#include "hk/errors.hpp"
#include "hk/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

namespace hk {

const Cell& Stratification::cell(int id) const {
    for (const auto& c : cells)
        if (c.id == id) return c;
    fail(ErrorKind::Stratification, "unknown cell id " + std::to_string(id));
}

int Stratification::locate(const Configuration& config, double tol) const {
    int found = -1;
    for (const auto& c : cells) {
        if (!c.contains(config, tol)) continue;
        if (found >= 0)
            fail(ErrorKind::Stratification, "configuration lies in cells " + std::to_string(found) + " and " + std::to_string(c.id));
        found = c.id;
    }
    if (found < 0) fail(ErrorKind::Stratification, "configuration lies in no cell");
    return found;
}

void Stratification::validate() const {
    std::set<int> ids;
    for (const auto& c : cells)
        if (!ids.insert(c.id).second) fail(ErrorKind::Stratification, "duplicate cell id");
    for (const auto& c : cells) {
        bool has = sigma.count(c.id) > 0;
        if ((c.type == CellType::TypeII) != has)
            fail(ErrorKind::Stratification, "sigma must be defined exactly on type II cells");
        if (has && !ids.count(sigma.at(c.id))) fail(ErrorKind::Stratification, "sigma target does not exist");
    }
}

// ---- two-agent toy ----

Stratification toy_stratification(bool boundary_type_two) {
    Stratification s;
    s.name = boundary_type_two ? "toy-s2" : "toy-s1";
    auto th = [](const Configuration& c) { return squared_distance(c.positions(), c.dim(), 0, 1); };
    Cell near{0, 2, CellType::TypeI, "near", {{0, 1}},
              [th](const Configuration& c, double tol) { return th(c) < 1.0 - tol; }, {0.0, 0.5}};
    Cell contact{1, 1, boundary_type_two ? CellType::TypeII : CellType::TypeI, "contact", {},
                 [th](const Configuration& c, double tol) { return std::abs(th(c) - 1.0) <= tol; }, {0.0, 1.0}};
    Cell far{2, 2, CellType::TypeI, "far", {},
             [th](const Configuration& c, double tol) { return th(c) > 1.0 + tol; }, {0.0, 2.0}};
    s.cells = {near, contact, far};
    if (boundary_type_two) s.sigma[1] = 0;
    s.validate();
    return s;
}

// ---- three agents on a line ----

Configuration three_agents_from_reduced(double u, double v) { return Configuration::line({u, v, -u - v}); }

namespace {

using Signs = std::array<int, 3>;

// Pair order (1,2), (1,3), (2,3); d_ij = x_i - x_j.
std::array<double, 3> diffs(const Configuration& c) {
    return {c.coord(0, 0) - c.coord(1, 0), c.coord(0, 0) - c.coord(2, 0), c.coord(1, 0) - c.coord(2, 0)};
}

int sign_of(double d, double tol) {
    if (d < -1.0 - tol) return -2;
    if (std::abs(d + 1.0) <= tol) return -1;
    if (d < 1.0 - tol) return 0;
    if (std::abs(d - 1.0) <= tol) return 1;
    return 2;
}

Signs signs_of(const Configuration& c, double tol) {
    auto d = diffs(c);
    return {sign_of(d[0], tol), sign_of(d[1], tol), sign_of(d[2], tol)};
}

// In reduced coordinates: d12 = u - v, d13 = 2u + v, d23 = u + 2v.
constexpr double kLine[3][2] = {{1.0, -1.0}, {2.0, 1.0}, {1.0, 2.0}};

std::array<double, 3> reduced_diffs(double u, double v) { return {u - v, 2 * u + v, u + 2 * v}; }

Signs reduced_signs(double u, double v) {
    auto d = reduced_diffs(u, v);
    return {sign_of(d[0], 1e-12), sign_of(d[1], 1e-12), sign_of(d[2], 1e-12)};
}

bool in_closure(const Signs& s, double u, double v) {
    auto d = reduced_diffs(u, v);
    const double tol = 1e-12;
    for (int p = 0; p < 3; ++p) {
        switch (s[static_cast<std::size_t>(p)]) {
        case -2: if (d[static_cast<std::size_t>(p)] > -1.0 + tol) return false; break;
        case -1: if (std::abs(d[static_cast<std::size_t>(p)] + 1.0) > tol) return false; break;
        case 0: if (std::abs(d[static_cast<std::size_t>(p)]) > 1.0 + tol) return false; break;
        case 1: if (std::abs(d[static_cast<std::size_t>(p)] - 1.0) > tol) return false; break;
        default: if (d[static_cast<std::size_t>(p)] < 1.0 - tol) return false; break;
        }
    }
    return true;
}

std::string region_letter(const Signs& s) {
    int active = 0;
    for (int v : s) active += v == 0;
    if (active == 0) return "A";
    if (active == 1) return "B";
    if (active == 3) return "E";
    return s[0] != 0 ? "D" : "C";
}

}  // namespace

Stratification builtin_stratification_3agents() {
    std::vector<std::array<double, 2>> verts;
    for (int p = 0; p < 3; ++p)
        for (int q = p + 1; q < 3; ++q)
            for (double c : {-1.0, 1.0})
                for (double e : {-1.0, 1.0}) {
                    double a1 = kLine[p][0], b1 = kLine[p][1], a2 = kLine[q][0], b2 = kLine[q][1];
                    double det = a1 * b2 - a2 * b1;
                    verts.push_back({(c * b2 - e * b1) / det, (a1 * e - a2 * c) / det});
                }
    std::map<Signs, std::array<double, 2>> found;
    for (const auto& vx : verts) found.emplace(reduced_signs(vx[0], vx[1]), vx);
    for (int p = 0; p < 3; ++p)
        for (double c : {-1.0, 1.0}) {
            double a = kLine[p][0], b = kLine[p][1];
            double nn = std::hypot(a, b);
            std::array<double, 2> dir{-b / nn, a / nn}, nrm{a / nn, b / nn};
            std::array<double, 2> base{c * a / (a * a + b * b), c * b / (a * a + b * b)};
            std::vector<double> ts;
            for (const auto& vx : verts)
                if (std::abs(a * vx[0] + b * vx[1] - c) < 1e-9)
                    ts.push_back((vx[0] - base[0]) * dir[0] + (vx[1] - base[1]) * dir[1]);
            std::sort(ts.begin(), ts.end());
            std::vector<double> mids{ts.front() - 1.0};
            for (std::size_t k = 0; k + 1 < ts.size(); ++k) mids.push_back(0.5 * (ts[k] + ts[k + 1]));
            mids.push_back(ts.back() + 1.0);
            for (double m : mids) {
                std::array<double, 2> P{base[0] + m * dir[0], base[1] + m * dir[1]};
                found.emplace(reduced_signs(P[0], P[1]), P);
                for (double off : {-1e-3, 1e-3})
                    found.emplace(reduced_signs(P[0] + off * nrm[0], P[1] + off * nrm[1]),
                                  std::array<double, 2>{P[0] + off * nrm[0], P[1] + off * nrm[1]});
            }
        }

    Stratification s;
    s.name = "three-agents";
    std::map<Signs, int> id_of;
    std::vector<std::pair<int, Signs>> order;
    for (const auto& [sg, pt] : found) {
        int dim = 2;
        for (int v : sg) dim -= (v == 1 || v == -1);
        order.push_back({dim, sg});
    }
    std::sort(order.begin(), order.end());
    int next = 0;
    for (const auto& [dim, sg] : order) {
        Cell c;
        c.id = next++;
        c.dimension = dim;
        c.type = dim == 2 ? CellType::TypeI : CellType::TypeII;
        const Pair pairs[3] = {{0, 1}, {0, 2}, {1, 2}};
        for (int p = 0; p < 3; ++p)
            if (sg[static_cast<std::size_t>(p)] == 0) c.active.push_back(pairs[p]);
        std::ostringstream lab;
        lab << (dim == 2 ? region_letter(sg) : dim == 1 ? "edge" : "vertex") << '[' << sg[0] << ',' << sg[1] << ','
            << sg[2] << ']';
        c.label = lab.str();
        Signs key = sg;
        c.contains = [key](const Configuration& cfg, double tol) {
            if (cfg.agents() != 3 || cfg.dim() != 1) fail(ErrorKind::Stratification, "three-agent stratification needs 3 agents on a line");
            return signs_of(cfg, tol) == key;
        };
        const auto& pt = found.at(sg);
        c.sample = {pt[0], pt[1], -pt[0] - pt[1]};
        id_of[sg] = c.id;
        s.cells.push_back(std::move(c));
    }

    // Sigma: adjacent 2-cell whose closure holds the point of least norm.
    std::vector<std::array<double, 2>> cands{{0.0, 0.0}};
    for (const auto& vx : verts) cands.push_back(vx);
    for (const auto& L : kLine)
        for (double c : {-1.0, 1.0})
            cands.push_back({c * L[0] / (L[0] * L[0] + L[1] * L[1]), c * L[1] / (L[0] * L[0] + L[1] * L[1])});
    auto min_norm = [&](const Signs& f) {
        double best = INFINITY;
        for (const auto& q : cands)
            if (in_closure(f, q[0], q[1])) best = std::min(best, std::hypot(q[0], q[1]));
        return best;
    };
    for (const auto& c : s.cells) {
        if (c.dimension == 2) continue;
        Signs sg{};
        for (const auto& [k, id] : id_of)
            if (id == c.id) sg = k;
        std::vector<std::array<int, 2>> opts;
        for (int v : sg) {
            if (v == 1) opts.push_back({0, 2});
            else if (v == -1) opts.push_back({-2, 0});
            else opts.push_back({v, v});
        }
        double best = INFINITY;
        int target = -1;
        for (int a : opts[0])
            for (int b : opts[1])
                for (int d : opts[2]) {
                    Signs f{a, b, d};
                    auto it = id_of.find(f);
                    if (it == id_of.end() || s.cell(it->second).dimension != 2) continue;
                    double m = min_norm(f);
                    if (m < best - 1e-12) {
                        best = m;
                        target = it->second;
                    }
                }
        if (target < 0) fail(ErrorKind::Stratification, "cell without adjacent region");
        s.sigma[c.id] = target;
    }
    s.validate();
    return s;
}

// ---- solver ----

Trajectory solve_stratified(const Scenario& scenario, const Stratification& strat, double horizon,
                            const IntegratorOptions& opts) {
    check_kernel(scenario.initial, scenario.kernel);
    const auto& shape = scenario.initial;
    const std::size_t N = shape.agents(), n = shape.dim();
    Trajectory tr(N, n, shape.weights());
    std::vector<double> x = shape.positions();
    double t = 0.0;
    tr.append(t, x);
    int cell = strat.locate(shape, opts.boundary_tol);
    int stalls = 0;
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) pairs.push_back({i, j});
    while (true) {
        int dyn = cell;
        const Cell& c = strat.cell(cell);
        EventRecord rec;
        rec.time = t;
        if (c.type == CellType::TypeII) {
            dyn = strat.sigma.at(cell);
            rec.action = "cell " + c.label + " -> " + strat.cell(dyn).label;
        } else {
            rec.action = "cell " + c.label;
        }
        for (const auto& p : pairs)
            if (std::abs(squared_distance(x, n, p.i, p.j) - 1.0) <= opts.boundary_tol) rec.pairs.push_back(p);
        tr.add_event(rec);
        if (t >= horizon) break;
        const auto& active = strat.cell(dyn).active;
        std::vector<char> on(pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k)
            on[k] = std::find(active.begin(), active.end(), pairs[k]) != active.end();
        VectorField f = [&](std::span<const double> xs, std::span<double> out) {
            graph_velocity(xs, shape, scenario.kernel, active, out);
        };
        EventFunction ev = [&](std::span<const double> xs, std::vector<double>& g) {
            g.resize(pairs.size());
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                double th = squared_distance(xs, n, pairs[k].i, pairs[k].j);
                g[k] = on[k] ? th - 1.0 : 1.0 - th;
            }
        };
        double t0 = t;
        auto seg = integrate_segment(f, &ev, t, x, horizon, opts, &tr);
        t = seg.t;
        x = seg.x;
        if (!seg.event) break;
        if (t - t0 < 1e-12) {
            if (++stalls > 50) fail(ErrorKind::Stratification, "cell transitions accumulate without time advancing");
        } else {
            stalls = 0;
        }
        cell = strat.locate(shape.with_positions(x), opts.boundary_tol);
    }
    return tr;
}

}  // namespace hk
