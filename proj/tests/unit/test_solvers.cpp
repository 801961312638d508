#include "hk/errors.hpp"
#include "hk/geometry.hpp"
#include "hk/scenarios.hpp"
#include "hk/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace hk;

namespace {

Scenario line_scenario(std::vector<double> xs, Variant v = Variant::OpenAtOne) {
    Scenario s;
    s.initial = Configuration::line(xs);
    s.kernel = InteractionKernel::constant(xs.size());
    s.variant = v;
    return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::Io;
}

}  // namespace

TEST(IntegrateSmooth, TwoAgentGapDecaysAtRateTwo) {
    auto cfg = Configuration::line({0.0, 1.0 - 1e-9});
    auto res = integrate_smooth(cfg, InteractionGraph::complete(2), InteractionKernel::constant(2), 5.0);
    EXPECT_EQ(res.reason, ExitReason::Horizon);
    const auto& tr = res.trajectory;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        double gap = tr.state(k)[0] - tr.state(k)[1];
        EXPECT_NEAR(gap, std::exp(-2.0 * tr.times()[k]) * (-(1.0 - 1e-9)), 1e-8);
    }
}

TEST(IntegrateSmooth, EmptyGraphIsConstant) {
    auto cfg = Configuration::line({-1.2, 0.0, 1.2});
    auto res = integrate_smooth(cfg, InteractionGraph::empty(3), InteractionKernel::constant(3), 4.0);
    EXPECT_EQ(res.reason, ExitReason::Horizon);
    EXPECT_EQ(max_abs_diff(res.trajectory.final_state(), cfg.positions()), 0.0);
}

TEST(IntegrateSmooth, PartialGraphMergesOnePair) {
    auto cfg = Configuration::line({0.0, 0.5, 2.2});
    auto res = integrate_smooth(cfg, InteractionGraph(3, {{0, 1}}), InteractionKernel::constant(3), 10.0);
    EXPECT_EQ(res.reason, ExitReason::Horizon);
    const auto& tr = res.trajectory;
    for (std::size_t k = 0; k < tr.size(); k += 50) {
        double t = tr.times()[k];
        EXPECT_NEAR(tr.state(k)[0], 0.25 - 0.25 * std::exp(-2 * t), 1e-8);
        EXPECT_NEAR(tr.state(k)[1], 0.25 + 0.25 * std::exp(-2 * t), 1e-8);
        EXPECT_EQ(tr.state(k)[2], 2.2);
    }
}

TEST(IntegrateSmooth, StopsWhenAnEdgeReachesOne) {
    // The chain contracts, so the non-edge 1-3 (initially 1.55 apart) comes down to distance 1.
    auto cfg = Configuration::line({0.0, 0.6, 1.55});
    auto res = integrate_smooth(cfg, InteractionGraph(3, {{0, 1}, {1, 2}}), InteractionKernel::constant(3), 10.0);
    ASSERT_EQ(res.reason, ExitReason::Event);
    auto x = res.trajectory.final_state();
    double th = (x[1] - x[2]) * (x[1] - x[2]);
    double th13 = (x[0] - x[2]) * (x[0] - x[2]);
    EXPECT_TRUE(std::abs(th - 1.0) <= 1e-10 || std::abs(th13 - 1.0) <= 1e-10);
}

TEST(ResolveGraph, Examples) {
    auto e = resolve_graph_at_M(Configuration::line({-1.0, 0.0, 1.0}), InteractionKernel::constant(3),
                                Variant::OpenAtOne, {{0, 1}, {1, 2}});
    EXPECT_EQ(e.edges(), (std::vector<Pair>{{0, 1}, {1, 2}}));
    auto c = resolve_graph_at_M(Configuration::line({-1.0, 0.0, 1.7}), InteractionKernel::constant(3),
                                Variant::OpenAtOne);
    EXPECT_EQ(c.edges(), (std::vector<Pair>{{0, 1}}));
    auto two = resolve_graph_at_M(Configuration::line({0.0, 1.0}), InteractionKernel::constant(2), Variant::OpenAtOne);
    EXPECT_EQ(two.edges(), (std::vector<Pair>{{0, 1}}));
}

TEST(Caratheodory, BetaBranchClosedForm) {
    auto sc = three_agents(IcCase::E);
    auto tr = solve_caratheodory(sc, BranchSpec::parse("wait=0:both"), 10.0);
    // Before ln 2 agents 1,3 approach agent 2 as -e^{-t}, e^{-t}; afterwards all three interact.
    const double l2 = std::log(2.0);
    for (double t : {0.1, 0.5, l2, 1.0, 3.0, 9.0}) {
        double x3 = t <= l2 ? std::exp(-t) : 0.5 * std::exp(-3.0 * (t - l2));
        auto x = tr.at(t);
        EXPECT_NEAR(x[2], x3, 1e-8) << "t=" << t;
        EXPECT_NEAR(x[0], -x3, 1e-8);
        EXPECT_NEAR(x[1], 0.0, 1e-12);
    }
    ASSERT_EQ(tr.events().size(), 2u);
    EXPECT_NEAR(tr.events()[1].time, l2, 1e-10);
    auto xe = tr.at(tr.events()[1].time);
    EXPECT_NEAR((xe[0] - xe[2]) * (xe[0] - xe[2]), 1.0, 1e-10);
}

TEST(Caratheodory, GammaAfterAWait) {
    auto sc = three_agents(IcCase::E);
    auto tr = solve_caratheodory(sc, BranchSpec::parse("wait=1.5:1-2;wait=inf:2-3"), 30.0);
    EXPECT_EQ(max_abs_diff(tr.at(1.4), {-1, 0, 1}), 0.0);
    // x1 - x2 = -e^{-2(t-1.5)}
    auto x = tr.at(2.0);
    EXPECT_NEAR(x[0] - x[1], -std::exp(-1.0), 1e-8);
    EXPECT_LT(max_abs_diff(tr.final_state(), {-0.5, -0.5, 1.0}), 1e-6);
}

TEST(Caratheodory, DeltaUnderClosedVariant) {
    auto sc = three_agents(IcCase::E, {}, Variant::ClosedAtOne);
    auto tr = solve_caratheodory(sc, BranchSpec::parse("wait=0:2-3;others=never"), 30.0);
    EXPECT_LT(max_abs_diff(tr.final_state(), {-1.0, 0.5, 0.5}), 1e-6);
}

TEST(Caratheodory, ClosedVariantRejectsWaits) {
    auto sc = three_agents(IcCase::E, {}, Variant::ClosedAtOne);
    EXPECT_EQ(kind_of([&] { solve_caratheodory(sc, BranchSpec::parse("wait=0.5:both"), 5.0); }), ErrorKind::Branch);
    EXPECT_EQ(kind_of([&] { solve_caratheodory(sc, BranchSpec::parse("wait=inf:all"), 5.0); }), ErrorKind::Branch);
}

TEST(Caratheodory, UnreachedRuleIsAnError) {
    auto sc = three_agents(IcCase::A);
    EXPECT_EQ(kind_of([&] { solve_caratheodory(sc, BranchSpec::parse("wait=0:1-2"), 5.0); }), ErrorKind::Branch);
}

TEST(Caratheodory, ConstantCaseStaysPut) {
    auto tr = solve_caratheodory(three_agents(IcCase::A), {}, 30.0);
    EXPECT_EQ(max_abs_diff(tr.final_state(), {-1.2, 0.0, 1.2}), 0.0);
    EXPECT_TRUE(tr.events().empty());
}

TEST(Caratheodory, CaseBMergesToBarycenter) {
    auto sc = three_agents(IcCase::B);
    auto tr = solve_caratheodory(sc, {}, 30.0);
    for (double v : tr.final_state()) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(BranchSpec, ParsesGrammar) {
    auto b = BranchSpec::parse("wait=0.5:1-2,2-3; wait=inf:all others=never order=2-3,1-2");
    ASSERT_EQ(b.rules.size(), 2u);
    EXPECT_EQ(b.rules[0].pairs, (std::vector<Pair>{{0, 1}, {1, 2}}));
    EXPECT_EQ(b.rules[0].wait, 0.5);
    EXPECT_TRUE(b.rules[1].initial_all);
    EXPECT_EQ(b.rules[1].wait, kNever);
    EXPECT_TRUE(b.others_never);
    EXPECT_EQ(b.ordering, (std::vector<Pair>{{1, 2}, {0, 1}}));
    EXPECT_EQ(kind_of([] { BranchSpec::parse("wait=-1:1-2"); }), ErrorKind::Parse);
    EXPECT_EQ(kind_of([] { BranchSpec::parse("wait=1:1-1"); }), ErrorKind::Index);
    EXPECT_EQ(kind_of([] { BranchSpec::parse("nonsense"); }), ErrorKind::Parse);
}

TEST(Sliding, ClosedFormOnCaseE) {
    auto sc = three_agents(IcCase::E);
    auto tr = solve_filippov_sliding(sc, {{Pair{0, 1}, 0.0, kNever}}, 10.0);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        double t = tr.times()[k], e = std::exp(-1.5 * t);
        const auto& x = tr.state(k);
        EXPECT_NEAR(x[0], -2.0 / 3.0 - e / 3.0, 1e-8);
        EXPECT_NEAR(x[1], 1.0 / 3.0 - e / 3.0, 1e-8);
        EXPECT_NEAR(x[2], 1.0 / 3.0 + 2.0 * e / 3.0, 1e-8);
        EXPECT_NEAR((x[0] - x[1]) * (x[0] - x[1]), 1.0, 1e-8);
    }
}

TEST(Sliding, CoefficientsKeepPairOnBoundary) {
    auto cfg = Configuration::line({-1.0, 0.0, 0.6});
    auto a = sliding_alpha(cfg, InteractionKernel::constant(3), {{1, 2}}, {{0, 1}});
    ASSERT_EQ(a.size(), 1u);
    EXPECT_NEAR(a[0], 0.3, 1e-12);  // (x3 - x2)/2
}

TEST(Sliding, ReleaseFreezesAgentOne) {
    auto sc = three_agents(IcCase::E);
    const double t2 = 0.5;
    auto tr = solve_filippov_sliding(sc, {{Pair{0, 1}, 0.0, t2}}, 30.0, BranchSpec::parse("wait=inf:1-2"));
    double x1 = -2.0 / 3.0 - std::exp(-1.5 * t2) / 3.0;
    auto xf = tr.final_state();
    EXPECT_NEAR(xf[0], x1, 1e-8);
    EXPECT_GE(xf[0], -1.0);
    EXPECT_LE(xf[0], -2.0 / 3.0);
    EXPECT_NEAR(xf[1], -x1 / 2.0, 1e-6);
    EXPECT_NEAR(xf[2], -x1 / 2.0, 1e-6);
}

TEST(Sliding, EmptyWindowIsCaratheodory) {
    auto sc = three_agents(IcCase::E);
    auto a = solve_filippov_sliding(sc, {{Pair{0, 1}, 0.0, 0.0}}, 10.0);
    auto b = solve_caratheodory(sc, {}, 10.0);
    EXPECT_LT(max_abs_diff(a.final_state(), b.final_state()), 1e-9);
}

TEST(Sliding, InfeasibleStartIsReported) {
    // Agents far from the boundary cannot be pinned.
    EXPECT_THROW(solve_filippov_sliding(three_agents(IcCase::A), {{Pair{0, 1}, 0.0, kNever}}, 1.0), Error);
}

TEST(Clss, ConstantCase) {
    auto tr = solve_clss(three_agents(IcCase::A), StepSchedule::uniform(1.0, 100));
    EXPECT_EQ(max_abs_diff(tr.final_state(), {-1.2, 0.0, 1.2}), 0.0);
}

TEST(Clss, EulerErrorBoundOnTwoAgents) {
    auto sc = line_scenario({0.0, 0.5});
    for (std::size_t K : {100u, 400u, 1600u}) {
        auto tr = solve_clss(sc, StepSchedule::uniform(1.0, K));
        double gap = tr.final_state()[1] - tr.final_state()[0];
        // Euler gives 0.5 (1 - 2/K)^K exactly.
        EXPECT_NEAR(gap, 0.5 * std::pow(1.0 - 2.0 / K, static_cast<double>(K)), 1e-12);
        EXPECT_LE(std::abs(gap - 0.5 * std::exp(-2.0)), 2.0 / K);
    }
}

TEST(Clss, ScheduleValidation) {
    EXPECT_EQ(kind_of([] { clss_jump_schedule(10, 3, 0.01); }), ErrorKind::Schedule);
    EXPECT_EQ(kind_of([] { clss_jump_schedule(100, 10, 0.01); }), ErrorKind::Schedule);  // K <= 3 r^2
    EXPECT_EQ(kind_of([] { StepSchedule({0.1, -0.1}); }), ErrorKind::Schedule);
    EXPECT_EQ(kind_of([] { StepSchedule({0.1, 0.1}, 0.3); }), ErrorKind::Schedule);
    // Long uniform schedules must not trip the sum check through rounding.
    for (std::size_t n : {3u, 300000u, 3000000u}) EXPECT_NO_THROW(StepSchedule::uniform(30.0, n)) << n;
    auto js = clss_jump_schedule(400, 5, 1.0);
    // 380 uniform steps, the long one, then up to (r+1)K/r = 480 units.
    EXPECT_EQ(js.jump_index, 380u);
    EXPECT_DOUBLE_EQ(js.schedule.steps()[380], 80.0 / 400.0);
    EXPECT_EQ(js.end_index, 381u + (480u - 460u));
    EXPECT_NEAR(js.schedule.horizon(), 1.2, 1e-12);
}

TEST(Clss, JumpScheduleAvoidsContact) {
    auto sc = clss_ten_agents();
    double min_gap = INFINITY;
    ClssOptions o;
    o.observer = [&](std::size_t, double, const std::vector<double>& x) {
        min_gap = std::min(min_gap, std::hypot(x[0] - x[4], x[1] - x[5]));
    };
    solve_clss_jump_schedule(sc, 10000, 50, clss_constants().T, 0.0, o);
    EXPECT_GT(min_gap, 1.0);
}

TEST(Stratified, ToyStratifications) {
    auto sc = toy_two_agents(0.0, 1.0, Variant::OpenAtOne);
    auto s1 = solve_stratified(sc, toy_stratification(false), 5.0);
    EXPECT_EQ(max_abs_diff(s1.final_state(), {0.0, 1.0}), 0.0);
    auto s2 = solve_stratified(sc, toy_stratification(true), 5.0);
    for (std::size_t k = 0; k < s2.size(); ++k) {
        double t = s2.times()[k];
        EXPECT_NEAR(s2.state(k)[1] - s2.state(k)[0], std::exp(-2.0 * t), 1e-8);
    }
}

TEST(Stratified, ThreeAgentCellCounts) {
    auto s = builtin_stratification_3agents();
    std::map<int, int> by_dim;
    for (const auto& c : s.cells) ++by_dim[c.dimension];
    EXPECT_EQ(by_dim[0], 12);
    EXPECT_EQ(by_dim[1], 30);
    EXPECT_EQ(by_dim[2], 19);
    // Representative points sit in their own cell only.
    for (const auto& c : s.cells) EXPECT_EQ(s.locate(Configuration::line(c.sample)), c.id) << c.label;
}

TEST(Stratified, ThreeAgentLookups) {
    auto s = builtin_stratification_3agents();
    const auto& origin = s.cell(s.locate(three_agents_from_reduced(0.0, 0.0)));
    EXPECT_EQ(origin.label.substr(0, 1), "E");
    const auto& v = s.cell(s.locate(three_agents_from_reduced(0.0, 1.0)));
    EXPECT_EQ(v.dimension, 0);
    EXPECT_EQ(s.cell(s.sigma.at(v.id)).label.substr(0, 1), "C");
    const auto& far = s.cell(s.locate(three_agents_from_reduced(-5.0, 5.0)));
    EXPECT_EQ(far.dimension, 2);
    EXPECT_EQ(far.label.substr(0, 1), "A");
}

TEST(Stratified, CaseEConvergesToOrigin) {
    auto tr = solve_stratified(three_agents(IcCase::E), builtin_stratification_3agents(), 30.0);
    for (double v : tr.final_state()) EXPECT_NEAR(v, 0.0, 1e-6);
    auto again = solve_stratified(three_agents(IcCase::E), builtin_stratification_3agents(), 30.0);
    ASSERT_EQ(tr.size(), again.size());
    for (std::size_t k = 0; k < tr.size(); ++k) EXPECT_EQ(tr.state(k), again.state(k));
}

TEST(Classical, Examples) {
    auto a = three_agents(IcCase::A);
    EXPECT_TRUE(check_classical(solve_caratheodory(a, {}, 5.0), a).classical);
    auto b = three_agents(IcCase::B);
    EXPECT_FALSE(check_classical(solve_caratheodory(b, {}, 5.0), b).classical);
    auto closed = toy_two_agents(0.0, 1.0, Variant::ClosedAtOne);
    EXPECT_TRUE(check_classical(solve_caratheodory(closed, {}, 5.0), closed).classical);
    auto open = toy_two_agents(0.0, 1.0, Variant::OpenAtOne);
    EXPECT_FALSE(check_classical(solve_caratheodory(open, BranchSpec::parse("wait=0:1-2"), 5.0), open).classical);
}
