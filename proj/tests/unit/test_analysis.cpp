#include "hk/analysis.hpp"
#include "hk/enumeration.hpp"
#include "hk/errors.hpp"
#include "hk/scenarios.hpp"
#include "hk/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hk;

namespace {

Trajectory constant_trajectory(const std::vector<double>& x, std::size_t dim, double horizon, std::size_t samples) {
    Trajectory tr(x.size() / dim, dim);
    for (std::size_t k = 0; k <= samples; ++k) tr.append(horizon * static_cast<double>(k) / samples, x);
    return tr;
}

// Same samples with every displacement from x(0) doubled: velocities scale by 2.
Trajectory doubled_velocity(const Trajectory& tr) {
    Trajectory out(tr.agents(), tr.dim());
    const auto& x0 = tr.state(0);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        auto x = tr.state(k);
        for (std::size_t d = 0; d < x.size(); ++d) x[d] = x0[d] + 2.0 * (x[d] - x0[d]);
        out.append(tr.times()[k], x);
    }
    for (const auto& e : tr.events()) out.add_event(e);
    return out;
}

Scenario ic_e() { return three_agents(IcCase::E); }

}  // namespace

TEST(Barycenter, Examples) {
    EXPECT_EQ(barycenter_drift(constant_trajectory({-1.2, 0.0, 1.2}, 1, 5.0, 100)), 0.0);
    auto sc = ic_e();
    EXPECT_LE(barycenter_drift(solve_caratheodory(sc, BranchSpec::parse("wait=0:both"), 10.0)), 1e-9);
    EXPECT_LE(barycenter_drift(solve_filippov_sliding(sc, {{Pair{0, 1}, 0.0, kNever}}, 10.0)), 1e-9);
}

TEST(Barycenter, DetectsDrift) {
    Trajectory tr(2, 1);
    tr.append(0.0, {0.0, 1.0});
    tr.append(1.0, {0.5, 1.0});
    EXPECT_DOUBLE_EQ(barycenter_drift(tr), 0.25);
}

TEST(Hull, ContractivityReports) {
    auto sc = ic_e();
    EXPECT_LE(hull_contractivity_report(solve_caratheodory(sc, BranchSpec::parse("wait=0:both"), 10.0)), 1e-8);
    EXPECT_EQ(hull_contractivity_report(constant_trajectory({0, 0, 1, 1}, 2, 1.0, 10)), 0.0);
    auto sq = square4(Variant::OpenAtOne);
    auto cat = square4_catalogue();
    auto tr = solve_caratheodory(sq, BranchSpec::parse(cat[5].realizations.front().branch), 30.0);
    EXPECT_LE(hull_contractivity_report(tr, 5), 1e-8);
    // An expanding pair leaves the initial hull.
    Trajectory grow(2, 1);
    grow.append(0.0, {0.0, 1.0});
    grow.append(1.0, {-0.5, 1.5});
    EXPECT_DOUBLE_EQ(hull_contractivity_report(grow), 0.5);
    EXPECT_THROW(hull_contractivity_report(grow, 0), Error);
}

TEST(Lyapunov, ValueExamples) {
    EXPECT_DOUBLE_EQ(lyapunov_V(Configuration::line({-1, 0, 1}), InteractionKernel::constant(3)), 3.0);
    EXPECT_EQ(lyapunov_V(Configuration::line({0.3, 0.3, 0.3}), InteractionKernel::constant(3)), 0.0);
    EXPECT_DOUBLE_EQ(lyapunov_V(Configuration::line({0.0, 0.5}), InteractionKernel::constant(2)), 0.25);
}

TEST(Lyapunov, MonotoneAlongSolutions) {
    auto sc = ic_e();
    EXPECT_LE(lyapunov_monotone_check(solve_caratheodory(sc, BranchSpec::parse("wait=0:both"), 10.0), sc.kernel), 1e-9);
    EXPECT_EQ(lyapunov_monotone_check(constant_trajectory({-1.2, 0.0, 1.2}, 1, 5.0, 10), sc.kernel), 0.0);
    // Coarse Euler: reported only, must simply be finite.
    auto clss = solve_clss(three_agents(IcCase::B), StepSchedule::uniform(1.0, 10));
    EXPECT_TRUE(std::isfinite(lyapunov_monotone_check(clss, sc.kernel)));
}

TEST(Clusters, Examples) {
    auto sc = ic_e();
    auto gamma = solve_caratheodory(sc, BranchSpec::parse("wait=0:1-2;wait=inf:2-3"), 30.0);
    auto rg = cluster_report(gamma, Variant::OpenAtOne);
    EXPECT_EQ(rg.clusters.blocks, (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
    EXPECT_NEAR(rg.positions[0][0], -0.5, 1e-6);
    EXPECT_NEAR(rg.positions[1][0], 1.0, 1e-6);
    EXPECT_TRUE(rg.clean());

    auto rb = cluster_report(solve_caratheodory(sc, BranchSpec::parse("wait=0:both"), 30.0), Variant::OpenAtOne);
    ASSERT_EQ(rb.count(), 1u);
    EXPECT_NEAR(rb.positions[0][0], 0.0, 1e-6);

    auto r71 = remark71_scenario(0.25);
    auto tr = solve_caratheodory(r71, {}, 30.0);
    auto rr = cluster_report(tr, Variant::ClosedAtOne);
    ASSERT_EQ(rr.count(), 2u);
    EXPECT_NEAR(rr.positions[0][0], 0.0, 1e-6);
    EXPECT_NEAR(rr.positions[0][1], 0.0, 1e-6);
    EXPECT_NEAR(rr.positions[1][0], 1.0, 1e-6);
    EXPECT_NEAR(rr.separations[0][1], 1.0, 1e-6);
    EXPECT_TRUE(rr.clean());
}

TEST(Clusters, FlagsP2ViolationAndSlowRuns) {
    auto bad = constant_trajectory({0.0, 0.5}, 1, 30.0, 300);
    auto r = cluster_report(bad, Variant::OpenAtOne);
    EXPECT_EQ(r.count(), 2u);
    EXPECT_FALSE(r.clean());
    auto sc = three_agents(IcCase::B);
    auto short_run = solve_caratheodory(sc, {}, 1.0);
    try {
        cluster_report(short_run, Variant::OpenAtOne);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotConverged);
    }
}

TEST(Inclusion, CaratheodoryAndSliding) {
    auto sc = ic_e();
    auto beta = solve_caratheodory(sc, BranchSpec::parse("wait=0:both"), 10.0);
    EXPECT_LE(filippov_inclusion_residual(beta, sc.kernel, sc.variant).max_residual, 1e-6);

    auto sl = solve_filippov_sliding(sc, {{Pair{0, 1}, 0.0, kNever}}, 10.0);
    auto rep = filippov_inclusion_residual(sl, sc.kernel, sc.variant);
    EXPECT_LE(rep.max_residual, 1e-6);
    ASSERT_TRUE(rep.alpha.count(Pair{0, 1}));
    std::size_t checked = 0;
    for (const auto& [t, a] : rep.alpha.at(Pair{0, 1})) {
        EXPECT_NEAR(a, 0.5 * std::exp(-1.5 * t), 1e-5) << "t=" << t;
        ++checked;
    }
    EXPECT_GT(checked, 500u);
}

TEST(Inclusion, NegativeControlAndSampling) {
    auto sc = ic_e();
    auto beta = solve_caratheodory(sc, BranchSpec::parse("wait=0:both"), 10.0);
    EXPECT_GT(filippov_inclusion_residual(doubled_velocity(beta), sc.kernel, sc.variant).max_residual, 0.1);
    auto sparse = constant_trajectory({-1.2, 0.0, 1.2}, 1, 10.0, 50);
    try {
        filippov_inclusion_residual(sparse, sc.kernel, sc.variant);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Sampling);
    }
}

TEST(BoxLeastSquares, MatchesGridSearch) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t rows = 3, k = 2;
        std::vector<double> G(rows * k), b(rows);
        for (auto& g : G) g = u(rng);
        for (auto& v : b) v = 2.0 * u(rng);
        std::vector<double> c;
        double got = box_least_squares(G, rows, b, c);
        ASSERT_EQ(c.size(), k);
        double best = INFINITY;
        for (int i = 0; i <= 400; ++i)
            for (int j = 0; j <= 400; ++j) {
                double c0 = i / 400.0, c1 = j / 400.0, s = 0.0;
                for (std::size_t r = 0; r < rows; ++r) {
                    double e = b[r] - G[r] * c0 - G[rows + r] * c1;
                    s += e * e;
                }
                best = std::min(best, std::sqrt(s));
            }
        EXPECT_LE(got, best + 1e-12);
        EXPECT_GE(got, best - 1e-2);
        for (double v : c) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Compare, DistinctLimitsAndIdentity) {
    auto sc = ic_e();
    auto gamma = solve_caratheodory(sc, BranchSpec::parse("wait=0:1-2;wait=inf:2-3"), 30.0);
    auto delta = solve_caratheodory(sc, BranchSpec::parse("wait=0:2-3;wait=inf:1-2"), 30.0);
    auto r = compare_trajectories(gamma, delta, 0.5);
    EXPECT_GE(r.max_distance, 1.0 - 1e-6);
    EXPECT_GT(r.divergence_time, 0.0);
    auto same = compare_trajectories(gamma, gamma, 1e-12);
    EXPECT_EQ(same.max_distance, 0.0);
    EXPECT_LT(same.divergence_time, 0.0);
    Trajectory other(2, 1);
    other.append(0.0, {0.0, 0.0});
    EXPECT_THROW(compare_trajectories(gamma, other, 1.0), Error);
}

TEST(Rates, ExtrapolationAndFit) {
    // x(t) = e^{-t} sampled to t = 10: limit 0, rate 1.
    Trajectory tr(1, 1);
    for (int k = 0; k <= 1000; ++k) tr.append(k * 0.01, {1.0 + std::exp(-k * 0.01)});
    EXPECT_NEAR(aitken_limit(tr)[0], 1.0, 1e-8);
    EXPECT_NEAR(fitted_rate(tr), 1.0, 0.05);
    EXPECT_EQ(fitted_rate(constant_trajectory({1.0}, 1, 1.0, 10)), 0.0);
}
