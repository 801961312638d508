#include "hk/analysis.hpp"

#include "hk/differences.hpp"
#include "hk/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hk {

namespace {

std::vector<double> barycenter(const Trajectory& tr, std::size_t k) {
    const std::size_t N = tr.agents(), n = tr.dim();
    std::vector<double> b(n, 0.0);
    double W = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double w = tr.weights().empty() ? 1.0 : tr.weights()[i];
        W += w;
        for (std::size_t c = 0; c < n; ++c) b[c] += w * tr.state(k)[i * n + c];
    }
    for (auto& v : b) v /= W;
    return b;
}

PointSet points(const Trajectory& tr, std::size_t k) { return PointSet{tr.dim(), tr.state(k)}; }

double outward(const Trajectory& tr, std::size_t outer, std::size_t inner) {
    auto P = points(tr, outer);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.agents(); ++i) {
        std::span<const double> q(tr.state(inner).data() + i * tr.dim(), tr.dim());
        worst = std::max(worst, hull_distance(P, q));
    }
    return worst;
}

}  // namespace

double peak_speed(const Trajectory& traj) {
    double v = 0.0;
    const std::size_t n = traj.dim();
    for (std::size_t k = 1; k < traj.size(); ++k) {
        double h = traj.times()[k] - traj.times()[k - 1];
        if (h <= 0.0) continue;
        for (std::size_t i = 0; i < traj.agents(); ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                double d = traj.state(k)[i * n + c] - traj.state(k - 1)[i * n + c];
                s += d * d;
            }
            v = std::max(v, std::sqrt(s) / h);
        }
    }
    return v;
}

double barycenter_drift(const Trajectory& traj) {
    if (traj.empty()) return 0.0;
    auto b0 = barycenter(traj, 0);
    double worst = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        auto b = barycenter(traj, k);
        for (std::size_t c = 0; c < b.size(); ++c) worst = std::max(worst, std::abs(b[c] - b0[c]));
    }
    return worst;
}

double hull_contractivity_report(const Trajectory& traj, std::size_t stride) {
    if (stride == 0) fail(ErrorKind::Argument, "stride must be positive");
    if (traj.size() < 2) return 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < traj.size(); k += stride) idx.push_back(k);
    if (idx.back() != traj.size() - 1) idx.push_back(traj.size() - 1);
    double worst = 0.0;
    for (std::size_t m = 1; m < idx.size(); ++m) {
        worst = std::max(worst, outward(traj, idx[m - 1], idx[m]));
        if (m > 1) worst = std::max(worst, outward(traj, idx[0], idx[m]));
    }
    return worst;
}

double lyapunov_V(const Configuration& config, const InteractionKernel& kernel) {
    const std::size_t N = config.agents(), n = config.dim();
    double V = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            double r = std::sqrt(squared_distance(config.positions(), n, i, j));
            V += 2.0 * config.weight(i) * config.weight(j) * kernel.pair(i, j).potential(r);
        }
    return V;
}

double lyapunov_monotone_check(const Trajectory& traj, const InteractionKernel& kernel) {
    if (traj.empty()) return 0.0;
    double prev = lyapunov_V(traj.config(0), kernel), worst = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        double v = lyapunov_V(traj.config(k), kernel);
        worst = std::max(worst, v - prev);
        prev = v;
    }
    return worst;
}

ClusterReport cluster_report(const Trajectory& traj, Variant variant, const ClusterOptions& opts) {
    if (traj.size() < 2) fail(ErrorKind::NotConverged, "trajectory too short for a cluster report");
    const std::size_t N = traj.agents(), n = traj.dim();
    const auto& t = traj.times();
    const double T = t.back(), t0 = T - 0.1 * (T - t.front());
    ClusterReport rep;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (t[k] < t0) continue;
        double h = t[k] - t[k - 1];
        if (h <= 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                double d = traj.state(k)[i * n + c] - traj.state(k - 1)[i * n + c];
                s += d * d;
            }
            rep.terminal_speed = std::max(rep.terminal_speed, std::sqrt(s) / h);
        }
    }
    if (rep.terminal_speed > opts.speed_tol)
        fail(ErrorKind::NotConverged, "agents still moving at speed " + std::to_string(rep.terminal_speed));

    auto last = traj.config(traj.size() - 1);
    rep.clusters = coincidence_partition(last, opts.cluster_tol);
    for (const auto& block : rep.clusters.blocks) {
        std::vector<double> p(n, 0.0);
        double W = 0.0;
        for (auto i : block) {
            W += last.weight(i);
            for (std::size_t c = 0; c < n; ++c) p[c] += last.weight(i) * last.coord(i, c);
        }
        for (auto& v : p) v /= W;
        rep.positions.push_back(p);
    }
    const std::size_t m = rep.positions.size();
    rep.separations.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                double d = rep.positions[a][c] - rep.positions[b][c];
                s += d * d;
            }
            s = std::sqrt(s);
            rep.separations[a][b] = rep.separations[b][a] = s;
            // Both variants accept separations of (numerically) exactly one; the closed one reaches them
            // with interacting clusters, the open one only from frozen data.
            (void)variant;
            if (s > opts.cluster_tol && s < 1.0 - opts.sep_tol) rep.violations.emplace_back(a, b);
        }
    return rep;
}

double box_least_squares(const std::vector<double>& G, std::size_t rows, const std::vector<double>& b,
                         std::vector<double>& c) {
    const std::size_t k = rows ? G.size() / rows : 0;
    Eigen::Map<const Eigen::MatrixXd> A(G.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(k));
    Eigen::Map<const Eigen::VectorXd> y(b.data(), static_cast<Eigen::Index>(rows));
    c.assign(k, 0.0);
    if (k == 0) return y.norm();

    Eigen::VectorXd best = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    double best_r = (y - A * best).norm();
    auto consider = [&](const Eigen::VectorXd& x) {
        double r = (y - A * x).norm();
        if (r < best_r) {
            best_r = r;
            best = x;
        }
    };

    if (k <= 8) {
        // Every face of the box: each coordinate pinned at 0, at 1, or free.
        std::size_t faces = 1;
        for (std::size_t q = 0; q < k; ++q) faces *= 3;
        std::vector<int> code(k);
        for (std::size_t f = 0; f < faces; ++f) {
            std::size_t g = f;
            std::vector<Eigen::Index> freeidx;
            Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
            for (std::size_t q = 0; q < k; ++q) {
                code[q] = static_cast<int>(g % 3);
                g /= 3;
                if (code[q] == 1) x[static_cast<Eigen::Index>(q)] = 1.0;
                if (code[q] == 2) freeidx.push_back(static_cast<Eigen::Index>(q));
            }
            if (!freeidx.empty()) {
                Eigen::VectorXd rhs = y - A * x;
                Eigen::MatrixXd Af(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(freeidx.size()));
                for (std::size_t q = 0; q < freeidx.size(); ++q) Af.col(static_cast<Eigen::Index>(q)) = A.col(freeidx[q]);
                Eigen::VectorXd sol = Af.completeOrthogonalDecomposition().solve(rhs);
                bool inside = true;
                for (std::size_t q = 0; q < freeidx.size(); ++q) {
                    double v = sol[static_cast<Eigen::Index>(q)];
                    if (v < -1e-12 || v > 1.0 + 1e-12) inside = false;
                    x[freeidx[q]] = std::clamp(v, 0.0, 1.0);
                }
                if (!inside) continue;
            }
            consider(x);
        }
    }

    // Projected gradient, also a safety net for rank-deficient faces.
    Eigen::MatrixXd AtA = A.transpose() * A;
    Eigen::VectorXd Aty = A.transpose() * y;
    double L = AtA.norm();
    if (L > 0.0) {
        Eigen::VectorXd x = best;
        for (int it = 0; it < 5000; ++it) {
            Eigen::VectorXd nx = (x - (AtA * x - Aty) / L).cwiseMax(0.0).cwiseMin(1.0);
            double move = (nx - x).norm();
            x = nx;
            if (move < 1e-15) break;
        }
        consider(x);
    }
    for (std::size_t q = 0; q < k; ++q) c[q] = best[static_cast<Eigen::Index>(q)];
    return best_r;
}

InclusionReport filippov_inclusion_residual(const Trajectory& traj, const InteractionKernel& kernel,
                                            Variant variant, double band) {
    InclusionReport rep;
    if (traj.size() < 2) return rep;
    const bool pl = traj.info.count("piecewise_linear") && traj.info.at("piecewise_linear") != 0.0;
    const double span = traj.final_time() - traj.times().front();
    if (!pl && span > 0.0 && static_cast<double>(traj.size() - 1) / span < 100.0)
        fail(ErrorKind::Sampling, "trajectory needs at least 100 samples per unit time");
    (void)variant;

    const std::size_t N = traj.agents(), n = traj.dim(), D = N * n;
    auto est = estimate_velocities(traj);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (est.at[k].empty()) continue;
        const auto& x = traj.state(k);
        auto cfg = traj.config(k);
        std::vector<Pair> inner, bnd;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) {
                double r = std::sqrt(squared_distance(x, n, i, j));
                if (std::abs(r - 1.0) <= band)
                    bnd.push_back({i, j});
                else if (r < 1.0)
                    inner.push_back({i, j});
            }
        std::vector<double> v0(D, 0.0);
        graph_velocity(x, cfg, kernel, inner, v0);
        std::vector<double> G(D * bnd.size(), 0.0);
        for (std::size_t q = 0; q < bnd.size(); ++q) {
            std::span<double> col(G.data() + q * D, D);
            graph_velocity(x, cfg, kernel, {bnd[q]}, col);
        }
        for (const auto& d : est.at[k]) {
            std::vector<double> b(D);
            for (std::size_t c = 0; c < D; ++c) b[c] = d[c] - v0[c];
            std::vector<double> coef;
            double r = box_least_squares(G, D, b, coef);
            if (r > rep.max_residual) {
                rep.max_residual = r;
                rep.worst_time = traj.times()[k];
            }
            for (std::size_t q = 0; q < bnd.size(); ++q) rep.alpha[bnd[q]].emplace_back(traj.times()[k], coef[q]);
        }
        ++rep.samples;
    }
    return rep;
}

std::vector<double> aitken_limit(const Trajectory& traj) {
    if (traj.empty()) return {};
    const double T = traj.final_time(), h = 0.1 * (T - traj.times().front());
    auto x0 = traj.at(T - 2 * h), x1 = traj.at(T - h), x2 = traj.at(T);
    std::vector<double> out(x2.size());
    for (std::size_t c = 0; c < x2.size(); ++c) {
        double d1 = x2[c] - x1[c], d0 = x1[c] - x0[c], den = d1 - d0;
        out[c] = std::abs(den) > 1e-14 && std::abs(d1) < std::abs(d0) ? x2[c] - d1 * d1 / den : x2[c];
    }
    return out;
}

double fitted_rate(const Trajectory& traj) {
    if (traj.size() < 3) return 0.0;
    const auto& xf = traj.final_state();
    const std::size_t N = traj.agents(), n = traj.dim();
    const double t0 = traj.times().front(), T = traj.final_time();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        double t = traj.times()[k];
        if (t < t0 + 0.3 * (T - t0) || t > t0 + 0.8 * (T - t0)) continue;
        double e = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                double d = traj.state(k)[i * n + c] - xf[i * n + c];
                s += d * d;
            }
            e = std::max(e, std::sqrt(s));
        }
        if (e < 1e-13) continue;
        double y = -std::log(e);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++m;
    }
    if (m < 3) return 0.0;
    double den = m * sxx - sx * sx;
    return den > 0.0 ? (m * sxy - sx * sy) / den : 0.0;
}

CompareResult compare_trajectories(const Trajectory& a, const Trajectory& b, double threshold) {
    if (a.agents() != b.agents() || a.dim() != b.dim()) fail(ErrorKind::Configuration, "trajectory shapes differ");
    if (a.empty() || b.empty()) fail(ErrorKind::Argument, "empty trajectory");
    const double lo = std::max(a.times().front(), b.times().front());
    const double hi = std::min(a.final_time(), b.final_time());
    if (lo > hi) fail(ErrorKind::Argument, "time ranges do not overlap");
    std::vector<double> grid;
    for (const auto* tr : {&a, &b})
        for (double t : tr->times())
            if (t >= lo && t <= hi) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const std::size_t N = a.agents(), n = a.dim();
    CompareResult res;
    for (double t : grid) {
        auto xa = a.at(t), xb = b.at(t);
        double d = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += (xa[i * n + c] - xb[i * n + c]) * (xa[i * n + c] - xb[i * n + c]);
            d = std::max(d, std::sqrt(s));
        }
        if (d > res.max_distance) {
            res.max_distance = d;
            res.max_time = t;
        }
        if (res.divergence_time < 0.0 && d > threshold) res.divergence_time = t;
        res.final_distance = d;
    }
    return res;
}

}  // namespace hk
