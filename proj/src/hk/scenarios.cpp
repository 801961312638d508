#include "hk/scenarios.hpp"

#include "hk/errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <numbers>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace hk {

Scenario toy_two_agents(double x10, double x20, Variant variant) {
    Scenario sc;
    sc.name = "toy";
    sc.label = "two agents on a line";
    sc.kernel = InteractionKernel::constant(2);
    sc.variant = variant;
    sc.initial = Configuration::line({x10, x20});
    double d = std::abs(x20 - x10);
    if (d < 1.0 || (d == 1.0 && variant == Variant::ClosedAtOne)) sc.expected["limit"] = 0.5 * (x10 + x20);
    return sc;
}

IcCase parse_ic_case(const std::string& s) {
    std::string t;
    for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t.rfind("ic-", 0) == 0) t = t.substr(3);
    if (t == "a") return IcCase::A;
    if (t == "b") return IcCase::B;
    if (t == "c") return IcCase::C;
    if (t == "d") return IcCase::D;
    if (t == "e") return IcCase::E;
    fail(ErrorKind::Argument, "unknown initial-condition case '" + s + "'");
}

Scenario three_agents(IcCase c, const std::vector<double>& params, Variant variant) {
    double x1 = -1.0, x3 = 1.0;
    const char* tag = "E";
    switch (c) {
    case IcCase::A: x1 = -1.2, x3 = 1.2, tag = "A"; break;
    case IcCase::B: x1 = -0.6, x3 = 0.6, tag = "B"; break;
    case IcCase::C: x1 = -1.0, x3 = 1.5, tag = "C"; break;
    case IcCase::D: x1 = -1.0, x3 = 0.5, tag = "D"; break;
    case IcCase::E: break;
    }
    if (c == IcCase::E) {
        if (!params.empty()) fail(ErrorKind::Argument, "IC-E takes no parameters");
    } else if (!params.empty()) {
        if (params.size() != 2) fail(ErrorKind::Argument, "expected parameters x1,x3");
        x1 = params[0];
        x3 = params[1];
    }
    bool ok = x1 <= 0.0 && x3 >= 0.0;
    switch (c) {
    case IcCase::A: ok = ok && x1 < -1.0 && x3 > 1.0; break;
    case IcCase::B: ok = ok && x1 > -1.0 && x3 < 1.0; break;
    case IcCase::C: ok = ok && ((x1 == -1.0 && x3 > 1.0) || (x1 < -1.0 && x3 == 1.0)); break;
    case IcCase::D: ok = ok && ((x1 == -1.0 && x3 > 0.0 && x3 < 1.0) || (x1 > -1.0 && x1 < 0.0 && x3 == 1.0)); break;
    case IcCase::E: break;
    }
    if (!ok) fail(ErrorKind::Argument, std::string("parameters violate case IC-") + tag);
    Scenario sc;
    sc.name = std::string("ic-") + static_cast<char>(std::tolower(tag[0]));
    sc.label = std::string("three agents, case ") + tag;
    sc.kernel = InteractionKernel::constant(3);
    sc.variant = variant;
    sc.initial = Configuration::line({x1, 0.0, x3});
    if (c == IcCase::A) sc.expected["constant"] = 1.0;
    if (c == IcCase::B) sc.expected["limit"] = (x1 + x3) / 3.0;
    return sc;
}

Scenario square4(Variant variant) {
    Scenario sc;
    sc.name = variant == Variant::OpenAtOne ? "square4" : "square4-closed";
    sc.label = "four agents at the corners of the unit square";
    sc.kernel = InteractionKernel::constant(4);
    sc.variant = variant;
    sc.initial = Configuration(4, 2, {0, 0, 1, 0, 1, 1, 0, 1});
    sc.expected["barycenter_x"] = 0.5;
    sc.expected["barycenter_y"] = 0.5;
    return sc;
}

Scenario distancing(int levels, const std::vector<std::size_t>& group_sizes, const std::vector<double>& epsilons,
                    bool lumped) {
    if (levels < 0) fail(ErrorKind::Argument, "levels must be nonnegative");
    const auto L = static_cast<std::size_t>(levels);
    if (group_sizes.size() < L) fail(ErrorKind::Argument, "need one group size per level");
    for (std::size_t k = 0; k < L; ++k) {
        if (group_sizes[k] == 0) fail(ErrorKind::Argument, "group sizes must be positive");
        if (k > 0 && group_sizes[k] <= group_sizes[k - 1]) fail(ErrorKind::Argument, "group sizes must increase");
    }
    // Group positions (lumped) and multiplicities; group 0 is the single agent at the origin.
    std::vector<std::array<double, 2>> pos{{0.0, 0.0}};
    std::vector<double> mult{1.0};
    if (L >= 1) {
        pos.push_back({1.0, 0.0});
        mult.push_back(static_cast<double>(group_sizes[0]));
    }
    if (L >= 2) {
        const double N1 = static_cast<double>(group_sizes[0]);
        double e2 = epsilons.size() > 0 && epsilons[0] > 0.0 ? epsilons[0] : 0.1 / (N1 + 1.0);
        if (e2 >= 1.0 / (N1 + 1.0)) fail(ErrorKind::Argument, "epsilon_2 must be below 1/(N1+1)");
        double h = e2 * (N1 + 1.0) / 2.0;
        if (h > 1.0) fail(ErrorKind::Argument, "epsilon_2 too large for the placement");
        pos.push_back({N1 / (N1 + 1.0) + e2 * (1.0 - N1) / 2.0, std::sqrt(1.0 - h * h)});
        mult.push_back(static_cast<double>(group_sizes[1]));
    }
    for (std::size_t k = 3; k <= L; ++k) {
        // New group from the merged barycenter, halfway between the nearest
        // offset keeping every earlier agent at distance >= 1 and the unit offset.
        double W = 0.0, bx = 0.0, by = 0.0;
        for (std::size_t g = 0; g < pos.size(); ++g) {
            W += mult[g];
            bx += mult[g] * pos[g][0];
            by += mult[g] * pos[g][1];
        }
        bx /= W;
        by /= W;
        // Far exit of the ray b + rho d from every earlier unit disc; the direction leaving the most room wins.
        auto exit_radius = [&](double dx, double dy) {
            double rho = 0.0;
            for (const auto& p : pos) {
                double qx = p[0] - bx, qy = p[1] - by;
                double dq = dx * qx + dy * qy, disc = dq * dq - (qx * qx + qy * qy) + 1.0;
                if (disc >= 0.0) rho = std::max(rho, dq + std::sqrt(disc));
            }
            return rho;
        };
        double dx = 1.0, dy = 0.0, rho = exit_radius(dx, dy);
        for (int a = 1; a < 720; ++a) {
            double ang = a * std::numbers::pi / 360.0, cx = std::cos(ang), cy = std::sin(ang);
            double r = exit_radius(cx, cy);
            if (r < rho) dx = cx, dy = cy, rho = r;
        }
        if (rho >= 1.0) fail(ErrorKind::Argument, "no placement for level " + std::to_string(k));
        rho = 0.5 * (rho + 1.0);
        pos.push_back({bx + rho * dx, by + rho * dy});
        mult.push_back(static_cast<double>(group_sizes[k - 1]));
    }

    std::vector<double> x, w;
    for (std::size_t g = 0; g < pos.size(); ++g) {
        std::size_t copies = lumped ? 1 : static_cast<std::size_t>(mult[g]);
        for (std::size_t c = 0; c < copies; ++c) {
            x.push_back(pos[g][0]);
            x.push_back(pos[g][1]);
            w.push_back(lumped ? mult[g] : 1.0);
        }
    }
    const std::size_t N = w.size();
    Scenario sc;
    sc.name = "distancing";
    sc.label = "recursive groups with far-apart limits, " + std::to_string(levels) + " levels";
    sc.kernel = InteractionKernel::constant(N);
    sc.variant = Variant::OpenAtOne;
    sc.initial = Configuration(N, 2, x, w);
    double W = 0.0, bx = 0.0, by = 0.0;
    for (std::size_t g = 0; g < pos.size(); ++g) {
        W += mult[g];
        bx += mult[g] * pos[g][0];
        by += mult[g] * pos[g][1];
    }
    sc.expected["merged_x"] = bx / W;
    sc.expected["merged_y"] = by / W;
    sc.expected["limit_distance"] = std::hypot(bx / W, by / W);
    return sc;
}

DistancingBranches distancing_branches(int levels) {
    if (levels <= 1) return {"wait=inf:all", "wait=0:all"};
    return {"wait=inf:all", "wait=0:1-2;wait=0:1-3,2-3"};
}

ClssConstants clss_constants() {
    ClssConstants c;
    c.eps = 1.0 / 10.0;
    c.T = 1.0 / 100.0;
    c.B = 127.0 / (10.0 * std::sqrt(91.0));
    c.a = 0.5 - 2.0 * c.eps;
    c.s = std::sqrt(1.0 - c.a * c.a);
    return c;
}

std::vector<double> clss_reference_x(double t) {
    const auto c = clss_constants();
    const double e2 = std::exp(2.0 * c.T - 2.0 * t), e8 = std::exp(8.0 * c.T - 8.0 * t);
    std::vector<double> x(20, 0.0);
    x[1] = c.B - (c.B - c.s) * e2;
    x[3] = c.B + (c.B - c.s) * e2;
    for (std::size_t i = 2; i < 6; ++i) x[2 * i] = c.a * e8;
    for (std::size_t i = 6; i < 10; ++i) x[2 * i] = -c.a * e8;
    return x;
}

Scenario clss_ten_agents() {
    Scenario sc;
    sc.name = "clss10";
    sc.label = "ten agents in the plane, two coinciding groups of four";
    sc.kernel = InteractionKernel::constant(10);
    sc.variant = Variant::OpenAtOne;
    sc.initial = Configuration(10, 2, clss_reference_x(0.0));
    const auto c = clss_constants();
    sc.expected["T"] = c.T;
    sc.expected["B"] = c.B;
    return sc;
}

namespace {

// States (x1, x2, x3, x7) per coordinate; the full field is A kron Id_2.
Eigen::Matrix4d clss_matrix_b() {
    Eigen::Matrix4d A;
    A << -9, 1, 4, 4, 1, -1, 0, 0, 1, 0, -5, 4, 1, 0, 4, -5;
    return A;
}

Eigen::Matrix4d clss_matrix_c() {
    Eigen::Matrix4d A;
    A << -9, 1, 4, 4, 1, -9, 4, 4, 1, 1, -6, 4, 1, 1, 4, -6;
    return A;
}

using Reduced = std::array<Eigen::Vector4d, 2>;

Reduced reduce(const std::vector<double>& x) {
    Reduced r;
    for (int c = 0; c < 2; ++c) r[c] << x[0 + c], x[2 + c], x[4 + c], x[12 + c];
    return r;
}

Reduced propagate(const Eigen::Matrix4d& A, const Reduced& r, double tau) {
    Eigen::Matrix4d E = (A * tau).exp();
    return {E * r[0], E * r[1]};
}

std::vector<double> expand(const Reduced& r) {
    std::vector<double> x(20);
    for (int c = 0; c < 2; ++c) {
        x[0 + c] = r[c][0];
        x[2 + c] = r[c][1];
        for (std::size_t i = 2; i < 6; ++i) x[2 * i + c] = r[c][2];
        for (std::size_t i = 6; i < 10; ++i) x[2 * i + c] = r[c][3];
    }
    return x;
}

double gap23(const Reduced& r) { return std::hypot(r[0][1] - r[0][2], r[1][1] - r[1][2]); }

}  // namespace

double clss_Tb() {
    static const double cached = [] {
        const auto c = clss_constants();
        const auto A = clss_matrix_b();
        const auto r0 = reduce(clss_reference_x(c.T));
        auto g = [&](double t) { return gap23(propagate(A, r0, t - c.T)) - 1.0; };
        if (g(c.T) <= 0.0) fail(ErrorKind::Configuration, "agents 2 and 3 already within reach at T");
        double lo = c.T, hi = c.T;
        const double step = 1e-4;
        while (g(hi) > 0.0) {
            lo = hi;
            hi += step;
            if (hi > c.T + 10.0) fail(ErrorKind::NotConverged, "agent 2 never reaches the groups");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            double m = 0.5 * (lo + hi);
            (g(m) > 0.0 ? lo : hi) = m;
        }
        return 0.5 * (lo + hi);
    }();
    return cached;
}

std::vector<double> clss_reference_y(double t) {
    const auto c = clss_constants();
    if (t <= c.T) return clss_reference_x(t);
    const auto rT = reduce(clss_reference_x(c.T));
    const double Tb = clss_Tb();
    if (t <= Tb) return expand(propagate(clss_matrix_b(), rT, t - c.T));
    auto rb = propagate(clss_matrix_b(), rT, Tb - c.T);
    return expand(propagate(clss_matrix_c(), rb, t - Tb));
}

Scenario remark71_scenario(double eps) {
    if (!(eps > 0.0 && eps < 0.5)) fail(ErrorKind::Argument, "eps must lie in (0, 1/2)");
    Scenario sc;
    sc.name = "remark71";
    sc.label = "closed variant, clusters ending at distance one";
    sc.kernel = InteractionKernel::constant(3);
    sc.variant = Variant::ClosedAtOne;
    sc.initial = Configuration(3, 2, {0.0, eps, 0.0, -eps, 1.0, 0.0});
    sc.expected["separation"] = 1.0;
    return sc;
}

std::vector<std::string> builtin_scenario_names() {
    return {"toy-critical", "toy-merge",      "toy-far",   "toy-closed",        "ic-a",          "ic-b",
            "ic-c",         "ic-d",           "ic-e",      "ic-e-closed",       "square4",       "square4-closed",
            "distancing",   "distancing-small", "clss10", "clss3-closed", "remark71"};
}

Scenario builtin_scenario(const std::string& name) {
    Scenario sc;
    if (name == "toy-critical")
        sc = toy_two_agents(0, 1, Variant::OpenAtOne);
    else if (name == "toy-merge")
        sc = toy_two_agents(0, 0.5, Variant::OpenAtOne);
    else if (name == "toy-far")
        sc = toy_two_agents(0, 2, Variant::OpenAtOne);
    else if (name == "toy-closed")
        sc = toy_two_agents(0, 1, Variant::ClosedAtOne);
    else if (name == "ic-a" || name == "ic-b" || name == "ic-c" || name == "ic-d" || name == "ic-e")
        sc = three_agents(parse_ic_case(name));
    else if (name == "ic-e-closed")
        sc = three_agents(IcCase::E, {}, Variant::ClosedAtOne);
    else if (name == "square4")
        sc = square4(Variant::OpenAtOne);
    else if (name == "square4-closed")
        sc = square4(Variant::ClosedAtOne);
    else if (name == "distancing")
        sc = distancing(2, {100, 10000});
    else if (name == "distancing-small")
        sc = distancing(2, {5, 10});
    else if (name == "clss10")
        sc = clss_ten_agents();
    else if (name == "clss3-closed") {
        sc.label = "closed variant, third agent above the first pair";
        sc.kernel = InteractionKernel::constant(3);
        sc.variant = Variant::ClosedAtOne;
        sc.initial = Configuration(3, 2, {0, 0, 1, 0, 1.0 / 3.0, 1});
    } else if (name == "remark71")
        sc = remark71_scenario(0.25);
    else
        fail(ErrorKind::Argument, "unknown scenario '" + name + "'");
    sc.name = name;
    return sc;
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

Kernel1D read_profile(std::istream& in) {
    std::string kind;
    in >> kind;
    if (kind == "constant") {
        double c;
        if (!(in >> c)) fail(ErrorKind::Parse, "bad constant profile");
        return Kernel1D::constant(c);
    }
    if (kind == "affine") {
        double a, b;
        if (!(in >> a >> b)) fail(ErrorKind::Parse, "bad affine profile");
        return Kernel1D::affine(a, b);
    }
    if (kind == "table") {
        std::size_t m;
        if (!(in >> m) || m < 2) fail(ErrorKind::Parse, "bad table profile");
        std::vector<double> r(m), v(m);
        for (std::size_t k = 0; k < m; ++k)
            if (!(in >> r[k] >> v[k])) fail(ErrorKind::Parse, "bad table profile");
        return Kernel1D::table(r, v);
    }
    fail(ErrorKind::Parse, "unknown kernel profile '" + kind + "'");
}

}  // namespace

void write_scenario(std::ostream& out, const Scenario& sc) {
    const auto& x = sc.initial;
    out << "name " << sc.name << '\n';
    out << "label " << sc.label << '\n';
    out << "variant " << variant_name(sc.variant) << '\n';
    out << "N " << x.agents() << '\n';
    out << "n " << x.dim() << '\n';
    out << "kernel " << sc.kernel.default_profile().describe() << '\n';
    for (const auto& [ij, prof] : sc.kernel.overrides())
        out << "pair " << ij.first + 1 << ' ' << ij.second + 1 << ' ' << prof.describe() << '\n';
    if (x.weighted()) {
        out << "weights";
        for (auto w : x.weights()) out << ' ' << num(w);
        out << '\n';
    }
    out << "positions\n";
    for (std::size_t i = 0; i < x.agents(); ++i) {
        for (std::size_t c = 0; c < x.dim(); ++c) out << (c ? " " : "") << num(x.coord(i, c));
        out << '\n';
    }
    for (const auto& [k, v] : sc.expected) out << "expected " << k << ' ' << num(v) << '\n';
}

Scenario read_scenario(std::istream& in) {
    Scenario sc;
    std::size_t N = 0, n = 0;
    bool have_kernel = false;
    Kernel1D def = Kernel1D::constant(1.0);
    std::vector<std::tuple<std::size_t, std::size_t, Kernel1D>> pairs;
    std::vector<double> weights, pos;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "name") {
            ls >> sc.name;
        } else if (key == "label") {
            std::getline(ls >> std::ws, sc.label);
        } else if (key == "variant") {
            std::string v;
            ls >> v;
            sc.variant = parse_variant(v);
        } else if (key == "N") {
            if (!(ls >> N)) fail(ErrorKind::Parse, "bad N");
        } else if (key == "n") {
            if (!(ls >> n)) fail(ErrorKind::Parse, "bad n");
        } else if (key == "kernel") {
            def = read_profile(ls);
            have_kernel = true;
        } else if (key == "pair") {
            std::size_t i, j;
            if (!(ls >> i >> j) || i == 0 || j == 0) fail(ErrorKind::Parse, "bad pair line");
            pairs.emplace_back(i - 1, j - 1, read_profile(ls));
        } else if (key == "weights") {
            double w;
            while (ls >> w) weights.push_back(w);
        } else if (key == "positions") {
            if (N == 0 || n == 0) fail(ErrorKind::Parse, "positions before N and n");
            for (std::size_t i = 0; i < N; ++i) {
                if (!std::getline(in, line)) fail(ErrorKind::Parse, "missing position rows");
                std::istringstream ps(line);
                for (std::size_t c = 0; c < n; ++c) {
                    double v;
                    if (!(ps >> v)) fail(ErrorKind::Parse, "bad position row " + std::to_string(i + 1));
                    pos.push_back(v);
                }
            }
        } else if (key == "expected") {
            std::string k;
            double v;
            if (!(ls >> k >> v)) fail(ErrorKind::Parse, "bad expected line");
            sc.expected[k] = v;
        } else {
            fail(ErrorKind::Parse, "unknown scenario field '" + key + "'");
        }
    }
    if (N == 0 || n == 0 || pos.size() != N * n) fail(ErrorKind::Parse, "incomplete scenario");
    if (!have_kernel) fail(ErrorKind::Parse, "scenario lacks a kernel line");
    sc.kernel = InteractionKernel::uniform(N, def);
    for (auto& [i, j, p] : pairs) sc.kernel.set_pair(i, j, p);
    sc.initial = Configuration(N, n, pos, weights);
    return sc;
}

}  // namespace hk
