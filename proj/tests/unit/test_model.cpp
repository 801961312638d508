#include "hk/errors.hpp"
#include "hk/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace hk;

namespace {

// Direct transcription of the pairwise sum, independent of the library's accumulation.
std::vector<double> naive_rhs(const std::vector<double>& x, std::size_t n, bool closed) {
    const std::size_t N = x.size() / n;
    std::vector<double> v(x.size(), 0.0);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            if (i == j) continue;
            double d2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) d2 += (x[i * n + k] - x[j * n + k]) * (x[i * n + k] - x[j * n + k]);
            if (d2 < 1.0 || (closed && d2 == 1.0))
                for (std::size_t k = 0; k < n; ++k) v[i * n + k] += x[j * n + k] - x[i * n + k];
        }
    return v;
}

void expect_vec(const std::vector<double>& got, const std::vector<double>& want, double tol = 1e-15) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], tol) << "component " << k;
}

const Configuration kIcE = Configuration::line({-1.0, 0.0, 1.0});

}  // namespace

TEST(Rhs, SpreadOutAgentsAreAtRest) {
    auto k = InteractionKernel::constant(3);
    expect_vec(rhs(Configuration::line({-1.5, 0.0, 1.5}), k, Variant::OpenAtOne), {0, 0, 0});
}

TEST(Rhs, TwoCloseAgentsAttract) {
    auto k = InteractionKernel::constant(2);
    expect_vec(rhs(Configuration::line({0.0, 0.5}), k, Variant::OpenAtOne), {0.5, -0.5});
}

TEST(Rhs, UnitSpacingDependsOnVariant) {
    auto k = InteractionKernel::constant(3);
    expect_vec(rhs(kIcE, k, Variant::OpenAtOne), {0, 0, 0});
    expect_vec(rhs(kIcE, k, Variant::ClosedAtOne), {1, 0, -1});
}

TEST(Rhs, RejectsKernelOfWrongSize) {
    auto k = InteractionKernel::constant(2);
    try {
        rhs(kIcE, k, Variant::OpenAtOne);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Configuration);
    }
}

TEST(Rhs, MatchesNaiveSumOnRandomPlanarData) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(10);
        for (auto& c : x) c = u(rng);
        Configuration cfg(5, 2, x);
        auto k = InteractionKernel::constant(5);
        expect_vec(rhs(cfg, k, Variant::OpenAtOne), naive_rhs(x, 2, false), 1e-13);
        // Momentum conservation.
        auto v = rhs(cfg, k, Variant::ClosedAtOne);
        EXPECT_NEAR(v[0] + v[2] + v[4] + v[6] + v[8], 0.0, 1e-12);
        EXPECT_NEAR(v[1] + v[3] + v[5] + v[7] + v[9], 0.0, 1e-12);
    }
}

TEST(Rhs, VariantsAgreeOffTheBoundary) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto k = InteractionKernel::constant(4);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(8);
        for (auto& c : x) c = u(rng);
        Configuration cfg(4, 2, x);
        ASSERT_TRUE(boundary_pairs(cfg, 0.0).empty());
        expect_vec(rhs(cfg, k, Variant::OpenAtOne), rhs(cfg, k, Variant::ClosedAtOne), 0.0);
    }
}

TEST(Rhs, AffineKernelWeightsByDistance) {
    auto k = InteractionKernel::uniform(2, Kernel1D::affine(1.0, 2.0));
    // phi(0.5) = 2, so v_1 = 2 * 0.5.
    expect_vec(rhs(Configuration::line({0.0, 0.5}), k, Variant::OpenAtOne), {1.0, -1.0});
}

TEST(FilippovVelocity, SelectionExtremes) {
    auto k = InteractionKernel::constant(3);
    Pair p12{0, 1}, p23{1, 2};
    expect_vec(filippov_velocity(kIcE, k, {{p12, 0.0}, {p23, 0.0}}), {0, 0, 0});
    expect_vec(filippov_velocity(kIcE, k, {{p12, 1.0}, {p23, 1.0}}), {1, 0, -1});
    expect_vec(filippov_velocity(kIcE, k, {{p12, 1.0}, {p23, 0.0}}), {1, -1, 0});
}

TEST(FilippovVelocity, ExtremesMatchBothVariants) {
    std::mt19937_64 rng(3);
    // Dyadic coordinates keep the unit distance exact.
    std::uniform_int_distribution<int> q(-25, 25);
    auto u = [&](std::mt19937_64& g) { return q(g) / 64.0; };
    for (int trial = 0; trial < 100; ++trial) {
        // Agent 2 sits at distance exactly 1 from agent 1 along an axis so the pair is on the boundary.
        std::vector<double> x = {u(rng), u(rng), 0, 0, u(rng) + 3.0, u(rng)};
        x[2] = x[0] + 1.0;
        x[3] = x[1];
        Configuration cfg(3, 2, x);
        auto k = InteractionKernel::constant(3);
        auto bp = boundary_pairs(cfg, 0.0);
        ASSERT_EQ(bp.size(), 1u);
        expect_vec(filippov_velocity(cfg, k, {{bp[0], 0.0}}), rhs(cfg, k, Variant::OpenAtOne), 1e-15);
        expect_vec(filippov_velocity(cfg, k, {{bp[0], 1.0}}), rhs(cfg, k, Variant::ClosedAtOne), 1e-15);
    }
}

TEST(FilippovVelocity, RejectsBadSelections) {
    auto k = InteractionKernel::constant(3);
    auto kind_of = [&](const VelocitySelection& s) {
        try {
            filippov_velocity(kIcE, k, s);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Io;
    };
    EXPECT_EQ(kind_of({{Pair{0, 1}, 0.5}}), ErrorKind::Selection);
    EXPECT_EQ(kind_of({{Pair{0, 1}, 0.5}, {Pair{1, 2}, 1.5}}), ErrorKind::Selection);
    EXPECT_EQ(kind_of({{Pair{0, 1}, 0.5}, {Pair{1, 2}, 0.5}, {Pair{0, 2}, 0.5}}), ErrorKind::Selection);
}

TEST(BoundaryPairs, Examples) {
    EXPECT_EQ(boundary_pairs(kIcE, 0.0), (std::vector<Pair>{{0, 1}, {1, 2}}));
    EXPECT_TRUE(boundary_pairs(Configuration::line({-1.2, 0.0, 1.2}), 0.0).empty());
    EXPECT_EQ(boundary_pairs(Configuration::line({0.0, 1.0 + 1e-12}), 1e-9), (std::vector<Pair>{{0, 1}}));
}

TEST(SublinearBound, HoldsOnExamplesAndRandomData) {
    EXPECT_TRUE(sublinear_bound_check(kIcE, InteractionKernel::constant(3)).ok);
    EXPECT_TRUE(sublinear_bound_check(Configuration::line({0.0, 0.5}), InteractionKernel::constant(2)).ok);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(10);
        for (auto& c : x) c = u(rng);
        auto rep = sublinear_bound_check(Configuration(5, 2, x), InteractionKernel::constant(5));
        ASSERT_TRUE(rep.ok) << rep.norm_all_on << " > " << rep.bound;
    }
}

TEST(Kernel, PositivityAndLipschitz) {
    EXPECT_THROW(Kernel1D::constant(0.0), Error);
    EXPECT_THROW(Kernel1D::affine(1.0, -1.0), Error);  // vanishes at r = 1
    auto t = Kernel1D::table({0.0, 0.5, 1.0}, {1.0, 2.0, 1.5});
    EXPECT_DOUBLE_EQ(t(0.25), 1.5);
    EXPECT_DOUBLE_EQ(t.lipschitz(), 2.0);
    for (int k = 0; k < 100; ++k) {
        double a = k / 100.0, b = (k + 1) / 100.0;
        EXPECT_LE(std::abs(t(b) - t(a)) / (b - a), t.lipschitz() + 1e-9);
    }
}

TEST(Kernel, PotentialOfConstantProfile) {
    auto k = Kernel1D::constant(1.0);
    EXPECT_DOUBLE_EQ(k.potential(0.5), 0.125);
    EXPECT_DOUBLE_EQ(k.potential(1.0), 0.5);
    EXPECT_DOUBLE_EQ(k.potential(3.0), 0.5);
    // phi(s) = 1 + s: int_0^1 (s + s^2) ds = 5/6.
    EXPECT_NEAR(Kernel1D::affine(1.0, 1.0).potential(2.0), 5.0 / 6.0, 1e-12);
}

TEST(Kernel, TableFileRoundTripAndSymmetry) {
    auto k = InteractionKernel::constant(3);
    k.set_pair(0, 2, Kernel1D::affine(1.0, 1.0));
    std::stringstream ss;
    k.write_table(ss);
    auto back = InteractionKernel::load_table(ss, 3);
    for (double r : {0.0, 0.3, 0.7, 1.0}) {
        EXPECT_NEAR(back.phi(0, 2, r), 1.0 + r, 1e-12);
        EXPECT_NEAR(back.phi(2, 0, r), 1.0 + r, 1e-12);
        EXPECT_NEAR(back.phi(0, 1, r), 1.0, 1e-12);
    }
    std::stringstream asym("i j r value\n1 2 0 1\n1 2 1 1\n2 1 0 2\n2 1 1 2\n");
    EXPECT_THROW(InteractionKernel::load_table(asym, 2), Error);
}

TEST(Configuration, ValidatesShape) {
    EXPECT_THROW(Configuration(2, 2, {0.0, 1.0, 2.0}), Error);
    EXPECT_THROW(Configuration(1, 1, {std::nan("")}), Error);
    EXPECT_THROW(make_pair_checked(1, 1), Error);
}
