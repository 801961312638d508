#include "hk/geometry.hpp"

#include "hk/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace hk {

namespace {

void check_pair(const Configuration& config, std::size_t i, std::size_t j) {
    if (i == j) fail(ErrorKind::Index, "pair needs two distinct agents");
    if (i >= config.agents() || j >= config.agents()) fail(ErrorKind::Index, "agent index out of range");
}

double weight_fn(const Configuration& c, const InteractionKernel& k, Variant v, std::size_t i, std::size_t j) {
    double th = squared_distance(c.positions(), c.dim(), i, j);
    if (th < 1.0) return k.phi(i, j, std::sqrt(th));
    if (th == 1.0 && v == Variant::ClosedAtOne) return k.phi(i, j, 1.0);
    return 0.0;
}

}  // namespace

double theta(const Configuration& config, std::size_t i, std::size_t j) {
    check_pair(config, i, j);
    return squared_distance(config.positions(), config.dim(), i, j);
}

double alpha(const Configuration& config, std::size_t i, std::size_t j, const InteractionKernel& kernel,
             Variant variant) {
    check_pair(config, i, j);
    check_kernel(config, kernel);
    const std::size_t n = config.dim();
    std::vector<double> drift(n, 0.0);
    for (std::size_t k = 0; k < config.agents(); ++k) {
        if (k == i || k == j) continue;
        double aik = weight_fn(config, kernel, variant, i, k) * config.weight(k);
        double ajk = weight_fn(config, kernel, variant, j, k) * config.weight(k);
        for (std::size_t d = 0; d < n; ++d)
            drift[d] += aik * (config.coord(k, d) - config.coord(i, d)) - ajk * (config.coord(k, d) - config.coord(j, d));
    }
    double s = 0.0;
    for (std::size_t d = 0; d < n; ++d) s += (config.coord(i, d) - config.coord(j, d)) * drift[d];
    return s;
}

double normal_rate(std::span<const double> x, std::span<const double> v, std::size_t n, std::size_t i,
                   std::size_t j) {
    double s = 0.0;
    for (std::size_t d = 0; d < n; ++d) s += (x[i * n + d] - x[j * n + d]) * (v[i * n + d] - v[j * n + d]);
    return s;
}

double activation_jump(const Configuration& config, const InteractionKernel& kernel, std::size_t i, std::size_t j) {
    return kernel.phi(i, j, 1.0) * (config.weight(i) + config.weight(j));
}

const char* crossing_class_name(CrossingClass c) {
    switch (c) {
    case CrossingClass::Separating: return "separating";
    case CrossingClass::Merging: return "merging";
    case CrossingClass::Degenerate: return "degenerate";
    case CrossingClass::MultiplePair: return "multiple-pair";
    case CrossingClass::Bidirectional: return "bidirectional";
    }
    return "?";
}

CrossingClass classify_crossing(const Configuration& config, std::size_t i, std::size_t j,
                                const InteractionKernel& kernel, Variant variant, double tol) {
    check_pair(config, i, j);
    double th = squared_distance(config.positions(), config.dim(), i, j);
    double band = std::max(tol, kBoundaryTol);
    if (std::abs(th - 1.0) > band) fail(ErrorKind::Classification, "pair is not on the discontinuity set");
    if (boundary_pairs(config, band).size() > 1) return CrossingClass::MultiplePair;
    // On a single boundary pair the inactive side evolves with 2 alpha and the active side with
    // 2 (alpha - jump); the variant only changes the value at the boundary itself.
    (void)variant;
    double a = alpha(config, i, j, kernel, Variant::OpenAtOne);
    double jump = activation_jump(config, kernel, i, j);
    if (std::abs(a) <= tol || std::abs(a - jump) <= tol) return CrossingClass::Degenerate;
    if (a > jump) return CrossingClass::Separating;
    if (a < 0.0) return CrossingClass::Merging;
    return CrossingClass::Bidirectional;
}

Partition canonical_partition(std::vector<std::vector<std::size_t>> blocks) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.empty(); }), blocks.end());
    std::sort(blocks.begin(), blocks.end());
    return Partition{std::move(blocks)};
}

Partition coincidence_partition(const Configuration& config, double tol) {
    if (tol < 0.0) fail(ErrorKind::Argument, "tolerance must be nonnegative");
    const std::size_t N = config.agents();
    std::vector<std::size_t> parent(N);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    double tol2 = tol * tol;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j)
            if (squared_distance(config.positions(), config.dim(), i, j) <= tol2) parent[find(i)] = find(j);
    std::vector<std::vector<std::size_t>> groups(N);
    for (std::size_t i = 0; i < N; ++i) groups[find(i)].push_back(i);
    return canonical_partition(std::move(groups));
}

PointSet points_of(const Configuration& config) { return PointSet{config.dim(), config.positions()}; }

namespace {

// Wolfe's minimum-norm-point algorithm on the shifted points.
double min_norm_in_hull(const std::vector<Eigen::VectorXd>& P) {
    const std::size_t m = P.size();
    double scale = 0.0;
    for (const auto& p : P) scale = std::max(scale, p.squaredNorm());
    if (scale == 0.0) return 0.0;
    const double eps = 1e-14 * scale;

    std::size_t first = 0;
    for (std::size_t k = 1; k < m; ++k)
        if (P[k].squaredNorm() < P[first].squaredNorm()) first = k;
    std::vector<std::size_t> S{first};
    std::vector<double> lambda{1.0};
    Eigen::VectorXd x = P[first];

    for (int major = 0; major < 1000; ++major) {
        std::size_t jbest = 0;
        double best = x.dot(P[0]);
        for (std::size_t k = 1; k < m; ++k) {
            double d = x.dot(P[k]);
            if (d < best) {
                best = d;
                jbest = k;
            }
        }
        if (x.squaredNorm() - best <= eps) break;
        if (std::find(S.begin(), S.end(), jbest) != S.end()) break;
        S.push_back(jbest);
        lambda.push_back(0.0);

        for (int minor = 0; minor < 1000; ++minor) {
            const std::size_t s = S.size();
            Eigen::MatrixXd A(s + 1, s + 1);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s + 1));
            for (std::size_t a = 0; a < s; ++a) {
                for (std::size_t c = 0; c < s; ++c) A(a, c) = P[S[a]].dot(P[S[c]]);
                A(a, s) = 1.0;
                A(s, a) = 1.0;
            }
            A(s, s) = 0.0;
            b(static_cast<Eigen::Index>(s)) = 1.0;
            Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(b);
            bool interior = true;
            for (std::size_t a = 0; a < s; ++a)
                if (sol(static_cast<Eigen::Index>(a)) <= 1e-15) interior = false;
            if (interior) {
                for (std::size_t a = 0; a < s; ++a) lambda[a] = sol(static_cast<Eigen::Index>(a));
                break;
            }
            double step = 1.0;
            for (std::size_t a = 0; a < s; ++a) {
                double mu = sol(static_cast<Eigen::Index>(a));
                if (mu <= 1e-15 && lambda[a] - mu > 0) step = std::min(step, lambda[a] / (lambda[a] - mu));
            }
            std::vector<std::size_t> S2;
            std::vector<double> l2;
            for (std::size_t a = 0; a < s; ++a) {
                double nl = lambda[a] + step * (sol(static_cast<Eigen::Index>(a)) - lambda[a]);
                if (nl > 1e-15) {
                    S2.push_back(S[a]);
                    l2.push_back(nl);
                }
            }
            if (S2.empty()) {
                S2.push_back(S.back());
                l2.push_back(1.0);
            }
            double tot = std::accumulate(l2.begin(), l2.end(), 0.0);
            for (double& v : l2) v /= tot;
            S = std::move(S2);
            lambda = std::move(l2);
        }
        x = Eigen::VectorXd::Zero(P[0].size());
        for (std::size_t a = 0; a < S.size(); ++a) x += lambda[a] * P[S[a]];
    }
    return x.norm();
}

// Planar case: monotone-chain hull plus orientation tests, exact enough for sliver hulls.
double planar_hull_distance(const std::vector<double>& c, double qx, double qy) {
    const std::size_t m = c.size() / 2;
    std::vector<std::array<double, 2>> pts(m);
    for (std::size_t k = 0; k < m; ++k) pts[k] = {c[2 * k] - qx, c[2 * k + 1] - qy};
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a, const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    auto seg = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
        double dx = b[0] - a[0], dy = b[1] - a[1], L = dx * dx + dy * dy;
        double t = L > 0.0 ? std::clamp(-(a[0] * dx + a[1] * dy) / L, 0.0, 1.0) : 0.0;
        return std::hypot(a[0] + t * dx, a[1] + t * dy);
    };
    if (pts.size() == 1) return std::hypot(pts[0][0], pts[0][1]);
    std::vector<std::array<double, 2>> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    const std::array<double, 2> o{0.0, 0.0};
    bool inside = h.size() >= 3;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto& a = h[i];
        const auto& b = h[(i + 1) % h.size()];
        if (cross(a, b, o) < 0.0) inside = false;
        best = std::min(best, seg(a, b));
    }
    return inside ? 0.0 : best;
}

}  // namespace

double hull_distance(const PointSet& outer, std::span<const double> q) {
    if (q.size() != outer.dim) fail(ErrorKind::Configuration, "hull query dimension mismatch");
    const std::size_t m = outer.size();
    if (m == 0) fail(ErrorKind::Argument, "empty point set");
    if (outer.dim == 1) {
        double lo = outer.coords[0], hi = outer.coords[0];
        for (double v : outer.coords) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (q[0] < lo) return lo - q[0];
        if (q[0] > hi) return q[0] - hi;
        return 0.0;
    }
    if (outer.dim == 2) return planar_hull_distance(outer.coords, q[0], q[1]);
    std::vector<Eigen::VectorXd> P;
    P.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        Eigen::VectorXd p(static_cast<Eigen::Index>(outer.dim));
        for (std::size_t d = 0; d < outer.dim; ++d) p(static_cast<Eigen::Index>(d)) = outer.coords[k * outer.dim + d] - q[d];
        P.push_back(std::move(p));
    }
    return min_norm_in_hull(P);
}

bool hull_contains(const PointSet& outer, const PointSet& inner, double tol) {
    if (outer.dim != inner.dim) fail(ErrorKind::Configuration, "hull dimension mismatch");
    // Interior points come back from the min-norm iteration with a rounding-level residual.
    double scale = 1.0;
    for (double v : outer.coords) scale = std::max(scale, std::abs(v));
    const double slack = tol + 64.0 * std::numeric_limits<double>::epsilon() * scale;
    for (std::size_t k = 0; k < inner.size(); ++k)
        if (hull_distance(outer, inner.point(k)) > slack) return false;
    return true;
}

}  // namespace hk
