#include "hk/enumeration.hpp"

#include "hk/analysis.hpp"
#include "hk/errors.hpp"
#include "hk/scenarios.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hk {

std::size_t Composition::total() const {
    std::size_t s = 0;
    for (auto p : parts) s += p;
    return s;
}

bool Composition::adjacency_ok() const {
    for (std::size_t k = 0; k + 1 < parts.size(); ++k)
        if (parts[k] + parts[k + 1] < 3) return false;
    return true;
}

std::string Composition::describe() const {
    std::string s = "(";
    for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? "," : "") + std::to_string(parts[k]);
    return s + ")";
}

namespace {

void compositions(std::size_t left, std::vector<std::size_t>& cur, std::vector<Composition>& out) {
    if (left == 0) {
        out.push_back({cur});
        return;
    }
    for (std::size_t p = left; p >= 1; --p) {
        cur.push_back(p);
        compositions(left - p, cur, out);
        cur.pop_back();
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::vector<Composition> delta1(std::size_t N) {
    if (N < 1) fail(ErrorKind::Argument, "N must be at least 1");
    std::vector<Composition> out;
    std::vector<std::size_t> cur;
    compositions(N, cur, out);
    return out;
}

std::vector<Composition> delta2(std::size_t N) {
    std::vector<Composition> out;
    for (auto& c : delta1(N))
        if (c.adjacency_ok()) out.push_back(std::move(c));
    return out;
}

Partition composition_partition(const Composition& comp) {
    std::vector<std::vector<std::size_t>> blocks;
    std::size_t a = 0;
    for (auto p : comp.parts) {
        std::vector<std::size_t> b;
        for (std::size_t q = 0; q < p; ++q) b.push_back(a++);
        blocks.push_back(std::move(b));
    }
    return canonical_partition(std::move(blocks));
}

BlockLimit limit_state(const Configuration& initial, const Composition& comp) {
    const std::size_t N = initial.agents();
    if (initial.dim() != 1) fail(ErrorKind::Argument, "limit_state needs agents on a line");
    if (comp.total() != N) fail(ErrorKind::Argument, "composition " + comp.describe() + " does not sum to N");
    for (const auto p : comp.parts)
        if (p == 0) fail(ErrorKind::Argument, "composition parts must be positive");
    for (std::size_t i = 0; i + 1 < N; ++i)
        if (std::abs(initial.coord(i + 1, 0) - initial.coord(i, 0) - 1.0) > 1e-12)
            fail(ErrorKind::Argument, "initial data must be unit spaced");
    BlockLimit bl{comp, {}, std::vector<double>(N)};
    std::size_t a = 0;
    for (auto p : comp.parts) {
        double s = 0.0, W = 0.0;
        for (std::size_t q = a; q < a + p; ++q) {
            s += initial.weight(q) * initial.coord(q, 0);
            W += initial.weight(q);
        }
        bl.block_positions.push_back(s / W);
        for (std::size_t q = a; q < a + p; ++q) bl.agent_limits[q] = s / W;
        a += p;
    }
    return bl;
}

BranchSpec branch_specs_from_composition(const Composition& comp, const std::vector<double>& waits) {
    std::size_t blocks = comp.parts.size(), big = 0;
    for (auto p : comp.parts) big += p >= 2;
    const bool per_block = waits.size() == blocks;
    if (!per_block && waits.size() != big)
        fail(ErrorKind::Argument, "expected " + std::to_string(blocks) + " or " + std::to_string(big) +
                                      " waits, got " + std::to_string(waits.size()));
    BranchSpec spec;
    std::size_t a = 0, w = 0;
    BranchRule never{{}, false, kNever};
    for (std::size_t k = 0; k < blocks; ++k) {
        const std::size_t p = comp.parts[k];
        double wait = 0.0;
        if (per_block)
            wait = waits[k];
        else if (p >= 2)
            wait = waits[w++];
        if (p >= 2) {
            if (wait < 0.0) fail(ErrorKind::Argument, "waits must be nonnegative");
            BranchRule r{{}, false, wait};
            for (std::size_t q = a; q + 1 < a + p; ++q) r.pairs.push_back({q, q + 1});
            spec.rules.push_back(std::move(r));
        }
        if (k + 1 < blocks) never.pairs.push_back({a + p - 1, a + p});
        a += p;
    }
    if (!never.pairs.empty()) spec.rules.push_back(std::move(never));
    return spec;
}

std::vector<ExplorationResult> explore_zero_wait(std::size_t N, Variant variant, double horizon) {
    std::vector<double> xs(N);
    for (std::size_t i = 0; i < N; ++i) xs[i] = static_cast<double>(i);
    Scenario sc{"unit-line", "unit-spaced line", InteractionKernel::constant(N), variant, Configuration::line(xs), {}};
    std::vector<ExplorationResult> out;
    for (const auto& comp : delta1(N)) {
        ExplorationResult r;
        r.composition = comp;
        try {
            std::vector<double> waits;
            for (auto p : comp.parts)
                if (p >= 2) waits.push_back(0.0);
            auto tr = solve_caratheodory(sc, branch_specs_from_composition(comp, waits), horizon);
            r.valid = true;
            r.final_state = tr.final_state();
            r.terminal = coincidence_partition(tr.config(tr.size() - 1), 1e-6);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Branch) throw;
            r.error = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SquareFamily> square4_catalogue() {
    // Agents 1..4 at (0,0), (1,0), (1,1), (0,1); sides 1-2, 2-3, 3-4, 1-4.
    const std::vector<std::string> sides{"1-2", "2-3", "3-4", "1-4"};
    auto rest = [&](std::vector<std::string> on) {
        std::string s;
        for (const auto& x : sides) {
            bool used = false;
            for (const auto& o : on) used |= o == x;
            if (!used) s += (s.empty() ? "" : ",") + x;
        }
        return s;
    };
    auto one = [&](std::vector<std::string> on, double w) {
        std::string s = "wait=" + fmt(w) + ":";
        for (std::size_t k = 0; k < on.size(); ++k) s += (k ? "," : "") + on[k];
        auto r = rest(on);
        if (!r.empty()) s += ";wait=inf:" + r;
        return s;
    };
    std::vector<SquareFamily> cat;
    cat.push_back({1, "constant", 0, false, {{"", "wait=inf:all", "wait=inf:all", 4, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}}}});
    const std::vector<std::vector<double>> side_mid{{0.5, 0}, {1, 0.5}, {0.5, 1}, {0, 0.5}};
    const std::vector<std::vector<std::vector<double>>> side_rest{
        {{1, 1}, {0, 1}}, {{0, 0}, {0, 1}}, {{0, 0}, {1, 0}}, {{1, 0}, {1, 1}}};
    for (int s = 0; s < 4; ++s) {
        std::vector<std::vector<double>> lim{side_mid[s]};
        for (const auto& p : side_rest[s]) lim.push_back(p);
        cat.push_back({2 + s, "side " + sides[s], 1, false, {{"", one({sides[s]}, 0.5), one({sides[s]}, 0.0), 3, lim}}});
    }
    cat.push_back({6, "sides 1-2 and 3-4", 2, false,
                   {{"A1", "wait=0.3:1-2;wait=0.7:3-4;wait=inf:2-3,1-4", "wait=0:1-2,3-4;wait=inf:2-3,1-4", 2,
                     {{0.5, 0}, {0.5, 1}}},
                    {"A2", "wait=0.3:1-2,3-4;wait=1:2-3,1-4", "wait=0:1-2,3-4;wait=0:2-3,1-4", 1, {{0.5, 0.5}}}}});
    cat.push_back({7, "sides 1-4 and 2-3", 2, false,
                   {{"A1", "wait=0.3:1-4;wait=0.7:2-3;wait=inf:1-2,3-4", "wait=0:1-4,2-3;wait=inf:1-2,3-4", 2,
                     {{0, 0.5}, {1, 0.5}}},
                    {"A2", "wait=0.3:1-4,2-3;wait=1:1-2,3-4", "wait=0:1-4,2-3;wait=0:1-2,3-4", 1, {{0.5, 0.5}}}}});
    const std::vector<std::vector<std::string>> ells{{"1-2", "2-3"}, {"2-3", "3-4"}, {"3-4", "1-4"}, {"1-4", "1-2"}};
    for (int s = 0; s < 4; ++s)
        cat.push_back({8 + s, "sides " + ells[s][0] + " and " + ells[s][1], 1, true,
                       {{"", one(ells[s], 0.5), one(ells[s], 0.0), 2, {}}}});
    cat.push_back({12, "all sides", 1, true, {{"", "wait=0.5:all", "wait=0:all", 1, {{0.5, 0.5}}}}});
    return cat;
}

std::vector<SquareOutcome> simulate_square_catalogue(Variant variant, double horizon) {
    auto sc = square4(variant);
    std::vector<SquareOutcome> out;
    for (const auto& fam : square4_catalogue()) {
        for (const auto& real : fam.realizations) {
            // A2 with zero waits coincides with case 12.
            if (variant == Variant::ClosedAtOne && real.set == "A2") continue;
            SquareOutcome o;
            o.id = fam.id;
            o.set = real.set;
            try {
                auto spec = BranchSpec::parse(variant == Variant::OpenAtOne ? real.branch : real.closed_branch);
                auto tr = solve_caratheodory(sc, spec, horizon);
                auto rep = cluster_report(tr, variant);
                o.ok = true;
                o.clusters = rep.count();
                o.limits = rep.positions;
                o.final_state = tr.final_state();
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Branch) throw;
                o.error = e.what();
            }
            out.push_back(std::move(o));
        }
    }
    return out;
}

std::map<std::size_t, std::size_t> square_histogram(const std::vector<SquareOutcome>& outcomes, double tol) {
    std::vector<const SquareOutcome*> distinct;
    for (const auto& o : outcomes) {
        if (!o.ok) continue;
        bool seen = false;
        for (auto* d : distinct) {
            double m = 0.0;
            for (std::size_t c = 0; c < o.final_state.size(); ++c)
                m = std::max(m, std::abs(o.final_state[c] - d->final_state[c]));
            seen |= m <= tol;
        }
        if (!seen) distinct.push_back(&o);
    }
    std::map<std::size_t, std::size_t> h;
    for (auto* d : distinct) ++h[d->clusters];
    return h;
}

std::map<std::size_t, std::size_t> square_claimed_histogram() {
    // Claimed configurations: all one-cluster outcomes sit at the center of the square.
    std::map<std::size_t, std::size_t> h;
    bool center = false;
    for (const auto& fam : square4_catalogue())
        for (const auto& r : fam.realizations) {
            if (r.claimed_clusters == 1) {
                if (center) continue;
                center = true;
            }
            ++h[r.claimed_clusters];
        }
    return h;
}

void write_square_catalogue(std::ostream& out, const std::vector<SquareOutcome>& outcomes) {
    out << "id\tset\tparameters\tstatus\tclusters\tlimits\n";
    for (const auto& o : outcomes) {
        int arity = 0;
        for (const auto& f : square4_catalogue())
            if (f.id == o.id) arity = f.arity;
        out << o.id << '\t' << (o.set.empty() ? "-" : o.set) << '\t' << arity << '\t'
            << (o.ok ? "ok" : "rejected") << '\t' << o.clusters << '\t';
        for (std::size_t k = 0; k < o.limits.size(); ++k) {
            out << (k ? ";" : "") << '(';
            for (std::size_t c = 0; c < o.limits[k].size(); ++c) out << (c ? "," : "") << fmt(o.limits[k][c]);
            out << ')';
        }
        out << '\n';
    }
}

void write_composition_catalogue(std::ostream& out, std::size_t N, Variant variant) {
    auto comps = variant == Variant::OpenAtOne ? delta1(N) : delta2(N);
    std::vector<double> xs(N);
    for (std::size_t i = 0; i < N; ++i) xs[i] = static_cast<double>(i);
    auto init = Configuration::line(xs);
    out << "# variant=" << variant_name(variant) << " N=" << N << " count=" << comps.size() << '\n';
    out << "index\tcomposition\tlimits\n";
    for (std::size_t k = 0; k < comps.size(); ++k) {
        auto bl = limit_state(init, comps[k]);
        out << k + 1 << '\t' << comps[k].describe() << '\t';
        for (std::size_t i = 0; i < N; ++i) out << (i ? "," : "") << fmt(bl.agent_limits[i]);
        out << '\n';
    }
}

}  // namespace hk
