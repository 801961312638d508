#include "hk/errors.hpp"
#include "hk/geometry.hpp"
#include "hk/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hk;

namespace {

const Configuration kIcE = Configuration::line({-1.0, 0.0, 1.0});

// Hand-written alpha for phi = 1 and the open variant.
double alpha_oracle(const std::vector<double>& x, std::size_t n, std::size_t i, std::size_t j) {
    const std::size_t N = x.size() / n;
    auto d2 = [&](std::size_t a, std::size_t b) {
        double s = 0;
        for (std::size_t k = 0; k < n; ++k) s += (x[a * n + k] - x[b * n + k]) * (x[a * n + k] - x[b * n + k]);
        return s;
    };
    double out = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double si = 0.0, sj = 0.0;
        for (std::size_t m = 0; m < N; ++m) {
            if (m == i || m == j) continue;
            if (d2(i, m) < 1.0) si += x[m * n + k] - x[i * n + k];
            if (d2(j, m) < 1.0) sj += x[m * n + k] - x[j * n + k];
        }
        out += (x[i * n + k] - x[j * n + k]) * (si - sj);
    }
    return out;
}

}  // namespace

TEST(Theta, Examples) {
    EXPECT_EQ(theta(kIcE, 0, 2), 4.0);
    EXPECT_EQ(theta(kIcE, 0, 1), 1.0);
    EXPECT_EQ(theta(Configuration(2, 2, {0, 0, 3, 4}), 0, 1), 25.0);
    try {
        theta(kIcE, 1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Index);
    }
}

TEST(Alpha, Examples) {
    auto k3 = InteractionKernel::constant(3);
    EXPECT_EQ(alpha(kIcE, 0, 1, k3, Variant::OpenAtOne), 0.0);
    EXPECT_DOUBLE_EQ(alpha(Configuration::line({-1.0, 0.0, 0.5}), 0, 1, k3, Variant::OpenAtOne), 0.5);
    EXPECT_EQ(alpha(Configuration::line({0.0, 1.0}), 0, 1, InteractionKernel::constant(2), Variant::OpenAtOne), 0.0);
    EXPECT_THROW(alpha(kIcE, 2, 2, k3, Variant::OpenAtOne), Error);
}

TEST(Alpha, SymmetricAndMatchesOracle) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto k = InteractionKernel::constant(4);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x(8);
        for (auto& c : x) c = u(rng);
        Configuration cfg(4, 2, x);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j) {
                double a = alpha(cfg, i, j, k, Variant::OpenAtOne);
                EXPECT_NEAR(a, alpha(cfg, j, i, k, Variant::OpenAtOne), 1e-14);
                EXPECT_NEAR(a, alpha_oracle(x, 2, i, j), 1e-13);
            }
    }
}

TEST(ClassifyCrossing, Examples) {
    auto k3 = InteractionKernel::constant(3);
    EXPECT_EQ(classify_crossing(kIcE, 0, 1, k3, Variant::OpenAtOne), CrossingClass::MultiplePair);
    EXPECT_EQ(classify_crossing(Configuration::line({-1.0, 0.0, 0.5}), 0, 1, k3, Variant::OpenAtOne),
              CrossingClass::Bidirectional);
    EXPECT_EQ(classify_crossing(Configuration::line({0.0, 1.0}), 0, 1, InteractionKernel::constant(2),
                                Variant::OpenAtOne),
              CrossingClass::Degenerate);
}

TEST(ClassifyCrossing, SeparatingAndMerging) {
    // A strong third agent near agent 1 drags it away: alpha = (-1)(3 (-0.9)) = 2.7 > 2 phi(1).
    auto strong = InteractionKernel::constant(3);
    strong.set_pair(0, 2, Kernel1D::constant(3.0));
    auto sep = Configuration::line({-1.0, 0.0, -1.9});
    EXPECT_NEAR(alpha(sep, 0, 1, strong, Variant::OpenAtOne), 2.7, 1e-14);
    EXPECT_EQ(classify_crossing(sep, 0, 1, strong, Variant::OpenAtOne), CrossingClass::Separating);
    auto mer = Configuration::line({-1.0, 0.0, -0.5});
    ASSERT_LT(alpha_oracle(mer.positions(), 1, 0, 1), 0.0);
    EXPECT_EQ(classify_crossing(mer, 0, 1, InteractionKernel::constant(3), Variant::OpenAtOne),
              CrossingClass::Merging);
}

TEST(ClassifyCrossing, RejectsPairOffTheBoundary) {
    try {
        classify_crossing(Configuration::line({0.0, 0.5}), 0, 1, InteractionKernel::constant(2), Variant::OpenAtOne);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Classification);
    }
}

TEST(CoincidencePartition, Examples) {
    EXPECT_EQ(coincidence_partition(kIcE, 1e-9).size(), 3u);
    auto p = coincidence_partition(Configuration::line({0.0, 0.0, 1.0}), 1e-9);
    EXPECT_EQ(p.blocks, (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
    EXPECT_EQ(coincidence_partition(Configuration::line({0.0, 5e-10, 1e-9}), 1e-9).size(), 1u);
}

TEST(Hull, Examples) {
    PointSet line{1, {-1.0, 0.0, 1.0}};
    EXPECT_TRUE(hull_contains(line, PointSet{1, {-0.5, 0.9}}, 0.0));
    PointSet square{2, {0, 0, 1, 0, 1, 1, 0, 1}};
    EXPECT_TRUE(hull_contains(square, PointSet{2, {0.5, 0.5}}, 0.0));
    EXPECT_FALSE(hull_contains(PointSet{1, {-1.0, 1.0}}, PointSet{1, {1.001}}, 1e-6));
    EXPECT_THROW(hull_contains(square, PointSet{1, {0.5}}, 0.0), Error);
}

TEST(Hull, SelfContainmentAndDistanceOracle) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        PointSet a{2, {}};
        for (int k = 0; k < 12; ++k) a.coords.push_back(u(rng));
        EXPECT_TRUE(hull_contains(a, a, 0.0));
    }
    // Distance to the unit square from outside points has a closed form.
    PointSet square{2, {0, 0, 1, 0, 1, 1, 0, 1}};
    for (int trial = 0; trial < 200; ++trial) {
        double q[2] = {3 * u(rng), 3 * u(rng)};
        double dx = std::max({0.0, -q[0], q[0] - 1.0}), dy = std::max({0.0, -q[1], q[1] - 1.0});
        EXPECT_NEAR(hull_distance(square, q), std::hypot(dx, dy), 1e-9);
    }
}

TEST(Alpha, PredictsThetaDerivativeOnEitherSide) {
    // Close to the boundary of pair (1,2), d theta/dt = 2 alpha (inactive) or 2 (alpha - 2 phi(1)) (active).
    auto k3 = InteractionKernel::constant(3);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.4, 1.4);
    for (int trial = 0; trial < 100; ++trial) {
        double c = u(rng);
        if (std::abs(std::abs(c + 0.5) - 1.0) < 1e-3 || std::abs(std::abs(c - 0.5) - 1.0) < 1e-3) continue;
        std::vector<double> x = {-0.5, 0.5, c};
        for (double side : {1.0, -1.0}) {
            std::vector<double> y = x;
            y[1] += side * 1e-7;
            Configuration cfg = Configuration::line(y);
            auto v = rhs(cfg, k3, Variant::OpenAtOne);
            double rate = 2.0 * (y[0] - y[1]) * (v[0] - v[1]);
            double a = alpha(Configuration::line(x), 0, 1, k3, Variant::OpenAtOne);
            double want = side > 0 ? 2.0 * a : 2.0 * (a - 2.0);
            EXPECT_NEAR(rate, want, 1e-5);
        }
    }
}
