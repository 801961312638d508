#include "hk/model.hpp"

#include "hk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace hk {

Pair make_pair_checked(std::size_t a, std::size_t b) {
    if (a == b) fail(ErrorKind::Index, "pair needs two distinct agents (got " + std::to_string(a + 1) + " twice)");
    return a < b ? Pair{a, b} : Pair{b, a};
}

const char* variant_name(Variant v) { return v == Variant::OpenAtOne ? "open" : "closed"; }

Variant parse_variant(const std::string& s) {
    if (s == "open" || s == "OpenAtOne") return Variant::OpenAtOne;
    if (s == "closed" || s == "ClosedAtOne") return Variant::ClosedAtOne;
    fail(ErrorKind::Parse, "unknown variant '" + s + "'");
}

// ---- Kernel1D ----

Kernel1D Kernel1D::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorKind::Argument, "constant kernel must be positive");
    Kernel1D k;
    k.kind_ = Kind::Constant;
    k.a_ = c;
    k.b_ = 0.0;
    k.lip_ = 0.0;
    k.sup_ = c;
    return k;
}

Kernel1D Kernel1D::affine(double a, double b) {
    if (!(a > 0.0) || !(a + b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        fail(ErrorKind::Argument, "affine kernel must stay positive on [0,1]");
    if (b == 0.0) return constant(a);
    Kernel1D k;
    k.kind_ = Kind::Affine;
    k.a_ = a;
    k.b_ = b;
    k.lip_ = std::abs(b);
    k.sup_ = std::max(a, a + b);
    return k;
}

Kernel1D Kernel1D::table(std::vector<double> r, std::vector<double> v) {
    if (r.size() != v.size() || r.size() < 2) fail(ErrorKind::Argument, "kernel table needs at least two samples");
    if (r.front() != 0.0 || r.back() != 1.0) fail(ErrorKind::Argument, "kernel table must span [0,1]");
    double lip = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (!std::isfinite(v[k]) || !(v[k] > 0.0)) fail(ErrorKind::Argument, "kernel values must be positive");
        sup = std::max(sup, v[k]);
        if (k > 0) {
            if (!(r[k] > r[k - 1])) fail(ErrorKind::Argument, "kernel table nodes must increase");
            lip = std::max(lip, std::abs(v[k] - v[k - 1]) / (r[k] - r[k - 1]));
        }
    }
    Kernel1D k;
    k.kind_ = Kind::Table;
    k.r_ = std::move(r);
    k.v_ = std::move(v);
    k.lip_ = lip;
    k.sup_ = sup;
    return k;
}

double Kernel1D::operator()(double r) const {
    switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Affine: return a_ + b_ * std::clamp(r, 0.0, 1.0);
    case Kind::Table: {
        double s = std::clamp(r, 0.0, 1.0);
        auto it = std::upper_bound(r_.begin(), r_.end(), s);
        if (it == r_.end()) return v_.back();
        std::size_t k = static_cast<std::size_t>(it - r_.begin());
        if (k == 0) return v_.front();
        double u = (s - r_[k - 1]) / (r_[k] - r_[k - 1]);
        return v_[k - 1] + u * (v_[k] - v_[k - 1]);
    }
    }
    return a_;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * eps) return left + right + diff / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, eps, 40);
}

}  // namespace

double Kernel1D::potential(double r) const {
    double m = std::clamp(r, 0.0, 1.0);
    switch (kind_) {
    case Kind::Constant: return a_ * m * m / 2.0;
    case Kind::Affine: return a_ * m * m / 2.0 + b_ * m * m * m / 3.0;
    case Kind::Table: {
        auto f = [this](double s) { return (*this)(s) * s; };
        double total = 0.0, lo = 0.0;
        for (std::size_t k = 1; k < r_.size() && lo < m; ++k) {
            double hi = std::min(r_[k], m);
            total += adaptive_simpson(f, lo, hi, 1e-13);
            lo = hi;
        }
        return total;
    }
    }
    return 0.0;
}

std::string Kernel1D::describe() const {
    std::ostringstream os;
    os << std::setprecision(17);
    switch (kind_) {
    case Kind::Constant: os << "constant " << a_; break;
    case Kind::Affine: os << "affine " << a_ << ' ' << b_; break;
    case Kind::Table:
        os << "table " << r_.size();
        for (std::size_t k = 0; k < r_.size(); ++k) os << ' ' << r_[k] << ' ' << v_[k];
        break;
    }
    return os.str();
}

bool Kernel1D::operator==(const Kernel1D& o) const {
    return kind_ == o.kind_ && a_ == o.a_ && b_ == o.b_ && r_ == o.r_ && v_ == o.v_;
}

// ---- InteractionKernel ----

InteractionKernel InteractionKernel::constant(std::size_t agents, double c) {
    return uniform(agents, Kernel1D::constant(c));
}

InteractionKernel InteractionKernel::uniform(std::size_t agents, Kernel1D phi) {
    InteractionKernel k;
    k.n_ = agents;
    k.def_ = std::move(phi);
    return k;
}

void InteractionKernel::set_pair(std::size_t i, std::size_t j, Kernel1D phi) {
    if (i >= n_ || j >= n_) fail(ErrorKind::Index, "kernel pair index out of range");
    Pair p = make_pair_checked(i, j);
    over_[{p.i, p.j}] = std::move(phi);
}

const Kernel1D& InteractionKernel::pair(std::size_t i, std::size_t j) const {
    if (over_.empty()) return def_;
    auto key = i < j ? std::make_pair(i, j) : std::make_pair(j, i);
    auto it = over_.find(key);
    return it == over_.end() ? def_ : it->second;
}

double InteractionKernel::max_sup() const {
    double s = def_.sup();
    for (const auto& [_, k] : over_) s = std::max(s, k.sup());
    return s;
}

std::optional<double> InteractionKernel::uniform_constant() const {
    if (!def_.is_constant()) return std::nullopt;
    for (const auto& [_, k] : over_)
        if (!(k == def_)) return std::nullopt;
    return def_(0.0);
}

bool InteractionKernel::is_unit() const {
    auto c = uniform_constant();
    return c && *c == 1.0;
}

InteractionKernel InteractionKernel::load_table(std::istream& in, std::size_t agents) {
    std::string line;
    bool header = false;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<double, double>>> rows;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (!header) {
            if (first != "i") fail(ErrorKind::Parse, "kernel table: expected header 'i j r value'");
            header = true;
            continue;
        }
        std::istringstream all(line);
        long long i = 0, j = 0;
        double r = 0, v = 0;
        if (!(all >> i >> j >> r >> v)) fail(ErrorKind::Parse, "kernel table: bad row at line " + std::to_string(lineno));
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > agents || static_cast<std::size_t>(j) > agents || i == j)
            fail(ErrorKind::Parse, "kernel table: bad agent index at line " + std::to_string(lineno));
        rows[{static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)}].push_back({r, v});
    }
    if (!header) fail(ErrorKind::Parse, "kernel table: missing header");
    InteractionKernel k = constant(agents, 1.0);
    auto build = [](std::vector<std::pair<double, double>> pts) {
        std::sort(pts.begin(), pts.end());
        std::vector<double> r, v;
        for (auto& [a, b] : pts) {
            r.push_back(a);
            v.push_back(b);
        }
        if (r.size() == 1) {
            r = {0.0, 1.0};
            v = {v[0], v[0]};
        }
        return Kernel1D::table(std::move(r), std::move(v));
    };
    for (std::size_t i = 0; i < agents; ++i) {
        for (std::size_t j = i + 1; j < agents; ++j) {
            auto a = rows.find({i, j});
            auto b = rows.find({j, i});
            if (a == rows.end() && b == rows.end())
                fail(ErrorKind::Parse, "kernel table: pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                           ") missing");
            Kernel1D ka = build(a != rows.end() ? a->second : b->second);
            if (a != rows.end() && b != rows.end()) {
                Kernel1D kb = build(b->second);
                for (int s = 0; s <= 100; ++s) {
                    double r = s / 100.0;
                    if (std::abs(ka(r) - kb(r)) > 1e-12)
                        fail(ErrorKind::Parse, "kernel table: pair (" + std::to_string(i + 1) + "," +
                                                   std::to_string(j + 1) + ") is not symmetric");
                }
            }
            k.set_pair(i, j, std::move(ka));
        }
    }
    return k;
}

void InteractionKernel::write_table(std::ostream& out, std::size_t samples) const {
    out << "i j r value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j) {
            const Kernel1D& k = pair(i, j);
            std::vector<double> rs = k.nodes();
            if (rs.empty())
                for (std::size_t s = 0; s < samples; ++s)
                    rs.push_back(static_cast<double>(s) / static_cast<double>(samples - 1));
            for (double r : rs) out << i + 1 << ' ' << j + 1 << ' ' << r << ' ' << k(r) << '\n';
        }
}

// ---- Configuration ----

Configuration::Configuration(std::size_t agents, std::size_t dim, std::vector<double> positions,
                             std::vector<double> weights)
    : N_(agents), n_(dim), x_(std::move(positions)), w_(std::move(weights)) {
    if (agents == 0 || dim == 0) fail(ErrorKind::Configuration, "configuration needs at least one agent and dimension");
    if (x_.size() != agents * dim)
        fail(ErrorKind::Configuration, "position array has " + std::to_string(x_.size()) + " entries, expected " +
                                           std::to_string(agents * dim));
    for (double v : x_)
        if (!std::isfinite(v)) fail(ErrorKind::Configuration, "non-finite coordinate");
    if (!w_.empty()) {
        if (w_.size() != agents) fail(ErrorKind::Configuration, "weight array length mismatch");
        for (double w : w_)
            if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorKind::Configuration, "weights must be positive");
        if (std::all_of(w_.begin(), w_.end(), [](double w) { return w == 1.0; })) w_.clear();
    }
}

Configuration Configuration::line(const std::vector<double>& xs) { return Configuration(xs.size(), 1, xs); }

double Configuration::total_weight() const {
    if (w_.empty()) return static_cast<double>(N_);
    double s = 0.0;
    for (double w : w_) s += w;
    return s;
}

Configuration Configuration::with_positions(std::vector<double> positions) const {
    return Configuration(N_, n_, std::move(positions), w_);
}

// ---- dynamics ----

double squared_distance(std::span<const double> x, std::size_t n, std::size_t i, std::size_t j) {
    double s = 0.0;
    const double* a = x.data() + i * n;
    const double* b = x.data() + j * n;
    for (std::size_t k = 0; k < n; ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

void add_pair_velocity(std::span<double> v, std::span<const double> x, std::size_t n, std::size_t i,
                       std::size_t j, double a, double wi, double wj) {
    const double* xi = x.data() + i * n;
    const double* xj = x.data() + j * n;
    double* vi = v.data() + i * n;
    double* vj = v.data() + j * n;
    for (std::size_t k = 0; k < n; ++k) {
        double d = xj[k] - xi[k];
        vi[k] += wj * a * d;
        vj[k] -= wi * a * d;
    }
}

void check_kernel(const Configuration& config, const InteractionKernel& kernel) {
    if (kernel.agents() != config.agents())
        fail(ErrorKind::Configuration, "kernel is sized for " + std::to_string(kernel.agents()) + " agents, configuration has " +
                                           std::to_string(config.agents()));
}

std::vector<double> rhs(const Configuration& config, const InteractionKernel& kernel, Variant variant) {
    check_kernel(config, kernel);
    const std::size_t N = config.agents(), n = config.dim();
    std::span<const double> x(config.positions());
    std::vector<double> v(N * n, 0.0);
    auto c = kernel.uniform_constant();
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i + 1; j < N; ++j) {
            double th = squared_distance(x, n, i, j);
            bool active = variant == Variant::OpenAtOne ? th < 1.0 : th <= 1.0;
            if (!active) continue;
            double a = c ? *c : kernel.phi(i, j, std::sqrt(th));
            add_pair_velocity(v, x, n, i, j, a, config.weight(i), config.weight(j));
        }
    }
    return v;
}

void graph_velocity(std::span<const double> x, const Configuration& shape, const InteractionKernel& kernel,
                    const std::vector<Pair>& edges, std::span<double> out, const std::vector<double>* scale) {
    const std::size_t n = shape.dim();
    std::fill(out.begin(), out.end(), 0.0);
    auto c = kernel.uniform_constant();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Pair& p = edges[e];
        double a = c ? *c : kernel.phi(p.i, p.j, std::sqrt(squared_distance(x, n, p.i, p.j)));
        if (scale) a *= (*scale)[e];
        add_pair_velocity(out, x, n, p.i, p.j, a, shape.weight(p.i), shape.weight(p.j));
    }
}

std::vector<Pair> boundary_pairs(const Configuration& config, double tol) {
    if (tol < 0.0) fail(ErrorKind::Argument, "tolerance must be nonnegative");
    std::vector<Pair> out;
    std::span<const double> x(config.positions());
    for (std::size_t i = 0; i < config.agents(); ++i)
        for (std::size_t j = i + 1; j < config.agents(); ++j)
            if (std::abs(squared_distance(x, config.dim(), i, j) - 1.0) <= tol) out.push_back({i, j});
    return out;
}

std::vector<double> filippov_velocity(const Configuration& config, const InteractionKernel& kernel,
                                      const VelocitySelection& selection, double tol) {
    check_kernel(config, kernel);
    auto bp = boundary_pairs(config, tol);
    for (const Pair& p : bp)
        if (!selection.count(p))
            fail(ErrorKind::Selection, "selection misses boundary pair (" + std::to_string(p.i + 1) + "," +
                                           std::to_string(p.j + 1) + ")");
    for (const auto& [p, a] : selection) {
        if (!std::binary_search(bp.begin(), bp.end(), p))
            fail(ErrorKind::Selection, "selection names non-boundary pair (" + std::to_string(p.i + 1) + "," +
                                           std::to_string(p.j + 1) + ")");
        if (!(a >= 0.0 && a <= 1.0)) fail(ErrorKind::Selection, "selection coefficient outside [0,1]");
    }
    const std::size_t N = config.agents(), n = config.dim();
    std::span<const double> x(config.positions());
    std::vector<double> v(N * n, 0.0);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            double th = squared_distance(x, n, i, j);
            double a = 0.0;
            auto it = selection.find(Pair{i, j});
            if (it != selection.end())
                a = it->second * kernel.phi(i, j, 1.0);
            else if (th < 1.0)
                a = kernel.phi(i, j, std::sqrt(th));
            if (a != 0.0) add_pair_velocity(v, x, n, i, j, a, config.weight(i), config.weight(j));
        }
    return v;
}

SublinearReport sublinear_bound_check(const Configuration& config, const InteractionKernel& kernel, double tol) {
    auto bp = boundary_pairs(config, tol);
    VelocitySelection off, on;
    for (const Pair& p : bp) {
        off[p] = 0.0;
        on[p] = 1.0;
    }
    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e * e;
        return std::sqrt(s);
    };
    SublinearReport r;
    double N = static_cast<double>(config.agents());
    double wmax = 1.0;
    for (std::size_t i = 0; i < config.agents(); ++i) wmax = std::max(wmax, config.weight(i));
    r.bound = N * std::sqrt(2.0 * N) * wmax * kernel.max_sup() * (1.0 + norm(config.positions()));
    r.norm_all_off = norm(filippov_velocity(config, kernel, off, tol));
    r.norm_all_on = norm(filippov_velocity(config, kernel, on, tol));
    r.ok = r.norm_all_off <= r.bound && r.norm_all_on <= r.bound;
    return r;
}

}  // namespace hk
