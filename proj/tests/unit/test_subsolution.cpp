#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hessgreen/subsolution.hpp"

using namespace hessgreen;

namespace {

double sk_of(const HermitianMatrix& a, int k) {
    return elementary_symmetric(mu_of_matrix(a).mu.vector(), k);
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int n, double r) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(2 * n);
    for (auto& v : x) {
        v = normal(rng);
    }
    return r * x / x.norm();
}

}  // namespace

TEST(ComplexCoordinates, RoundTrip) {
    Eigen::VectorXd x(4);
    x << 1.0, 2.0, 3.0, 4.0;
    const auto z = to_complex(x);
    ASSERT_EQ(z.size(), 2);
    EXPECT_EQ(z(0), cdouble(1.0, 2.0));
    EXPECT_EQ(z(1), cdouble(3.0, 4.0));
    EXPECT_EQ(to_real(z), x);
}

TEST(UnitQuadratic, LevelOne) {
    for (int n = 2; n <= 5; ++n) {
        for (int k = 1; k <= n; ++k) {
            const double a = unit_quadratic_coefficient(n, k);
            const auto m = mu_of_matrix(a * HermitianMatrix::identity(n));
            EXPECT_NEAR(elementary_symmetric(m.mu.vector(), k), 1.0, 1e-13) << n << "," << k;
        }
    }
}

TEST(BallSubsolution, BoundaryValueAndLevel) {
    std::mt19937_64 rng(7);
    for (const auto& [n, k, gamma] : {std::tuple{3, 1, 4.0}, std::tuple{3, 2, 2.0}, std::tuple{3, 3, 2.0},
                                      std::tuple{4, 2, 4.0}}) {
        const auto u = ball_subsolution(1.5, gamma, default_params(n, k, 1.0), 0.25);
        EXPECT_TRUE(u.floor_certified);
        for (int i = 0; i < 20; ++i) {
            EXPECT_NEAR(u.value(random_point(rng, n, 1.5)), 0.25, 1e-12);
            const double r = 0.05 + 1.4 * (i + 0.5) / 20.0;
            const auto pv = u.evaluate(random_point(rng, n, r));
            EXPECT_TRUE(in_gamma_k(mu_of_matrix(pv.hessian).mu.vector(), k));
            // Eigenvalue rounding scales with the Hessian entries, which grow like r^{-gamma-2}.
            const double slack = 1e-13 * std::pow(1.0 + pv.hessian.max_abs_entry(), k);
            EXPECT_GE(sk_of(pv.hessian, k), u.rhs_floor - slack) << n << "," << k << " r=" << r;
        }
    }
}

TEST(BallSubsolution, GenericBranchNotCertified) {
    const auto u = ball_subsolution(1.0, 10.0, default_params(3, 2, 1.0), 0.0);
    EXPECT_FALSE(u.floor_certified);
}

TEST(BallLogSubsolution, OnlyForTwoTwo) {
    const auto u = ball_log_subsolution(1.0, default_params(2, 2, 1.0), -1.0);
    Eigen::VectorXd x(4);
    x << 0.0, 0.0, 1.0, 0.0;
    EXPECT_NEAR(u.value(x), -1.0, 1e-14);
    x << 0.3, 0.1, 0.0, -0.2;
    EXPECT_GE(sk_of(u.evaluate(x).hessian, 2), 1.0 - 1e-12);
    EXPECT_THROW(ball_log_subsolution(1.0, default_params(3, 2, 1.0), 0.0), InvalidArgument);
}

TEST(BoxSubsolution, ReachesLevelEverywhere) {
    Eigen::VectorXd lo(6), hi(6);
    lo.setConstant(-1.0);
    hi.setConstant(1.0);
    const auto box = DomainSpec::box(lo, hi);
    // Re(z1 z2) is pluriharmonic: its complex Hessian vanishes.
    SmoothFunction data = [](const Eigen::VectorXd& x) {
        PointValue v;
        v.value = x(0) * x(2) - x(1) * x(3);
        v.gradient = Eigen::VectorXd::Zero(x.size());
        v.hessian = HermitianMatrix(3);
        return v;
    };
    const auto p = default_params(3, 2, 1.0);
    const auto u = box_subsolution(box, data, p, 2.0, 3);
    // mu = 2B(1,1,1) needs S_2 = 12 B^2 >= 2.
    EXPECT_NEAR(u.B, std::sqrt(2.0 / 12.0), 1e-6);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        Eigen::VectorXd x(6);
        for (auto& v : x) {
            v = unif(rng);
        }
        const auto pv = u.evaluate(x);
        EXPECT_GE(sk_of(pv.hessian, 2), 2.0 * (1.0 - 1e-5));
        EXPECT_LE(pv.value, data(x).value);
    }
    EXPECT_THROW(box_subsolution(box, data, default_params(3, 3, 1.0), 1.0), InvalidArgument);
    EXPECT_THROW(box_subsolution(DomainSpec::ball(3, 1.0), data, p, 1.0), InvalidArgument);
}

TEST(DomainSpec, Validation) {
    EXPECT_THROW(DomainSpec::ball(1, 1.0), InvalidArgument);
    EXPECT_THROW(DomainSpec::ball(2, 0.0), InvalidArgument);
    Eigen::VectorXd lo(4), hi(4);
    lo << -1, -1, -1, 0.1;
    hi << 1, 1, 1, 1;
    EXPECT_THROW(DomainSpec::box(lo, hi), InvalidArgument);
    const auto ball = DomainSpec::ball(2, 2.0);
    EXPECT_DOUBLE_EQ(ball.diameter(), 4.0);
    EXPECT_TRUE(ball.contains(Eigen::VectorXd::Constant(4, 0.9)));
    EXPECT_FALSE(ball.contains(Eigen::VectorXd::Constant(4, 1.0)));
}

TEST(LeviTrace, BallIsNMinusOne) {
    const auto ball = DomainSpec::ball(3, 2.0);
    Eigen::VectorXd x(6);
    x << 1.0, 1.0, 0.0, 1.0, 1.0, 0.0;
    x *= 2.0 / x.norm();
    EXPECT_NEAR(levi_trace(ball, x), 2.0, 1e-12);
    EXPECT_THROW(levi_trace(ball, 0.5 * x), InvalidArgument);
}
