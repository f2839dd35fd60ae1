#include <gtest/gtest.h>

#include <random>

#include "hessgreen/fundamental.hpp"
#include "support.hpp"

using namespace hessgreen;

TEST(GammaExponents, Table) {
    const auto t31 = gamma_exponents(3, 1);
    ASSERT_EQ(t31.branches.size(), 1u);
    EXPECT_EQ(t31.branches[0].gamma, 4.0);
    EXPECT_EQ(t31.branches[0].branch, Branch::Generic);

    const auto t32 = gamma_exponents(3, 2);
    ASSERT_EQ(t32.branches.size(), 2u);
    EXPECT_EQ(t32.branches[0].gamma, 10.0);
    EXPECT_EQ(t32.branches[1].gamma, 2.0);
    EXPECT_EQ(t32.branches[1].branch, Branch::Degenerate);

    const auto t44 = gamma_exponents(4, 4);
    ASSERT_EQ(t44.branches.size(), 1u);
    EXPECT_EQ(t44.branches[0].gamma, 4.0);

    const auto t22 = gamma_exponents(2, 2);
    EXPECT_TRUE(t22.branches.empty());
    ASSERT_EQ(t22.diagnostics.size(), 1u);

    EXPECT_THROW(gamma_exponents(3, 4), InvalidArgument);
    EXPECT_THROW(gamma_exponents(1, 1), InvalidArgument);
}

TEST(PhiEval, PowerRule) {
    const auto p = phi_eval(4.0, 1.0);
    EXPECT_EQ(p.phi, -1.0);
    EXPECT_EQ(p.dphi, 2.0);
    EXPECT_EQ(p.d2phi, -6.0);
    EXPECT_EQ(phi_eval(7.3, 1.0).phi, -1.0);
    EXPECT_DOUBLE_EQ(phi_eval(2.0, 4.0).phi, -0.25);
    EXPECT_THROW(phi_eval(2.0, 0.0), InvalidArgument);
    EXPECT_THROW(phi_eval(0.0, 1.0), InvalidArgument);
}

TEST(RadialMu, Examples) {
    EXPECT_EQ(radial_mu({1.0, 1.0, 1.0, 0.0}, 3).vector(), (std::vector<double>{2, 2, 2}));
    for (double s : {0.01, 0.3, 2.0}) {
        const auto mu = radial_mu(phi_eval(2.0, s), 3);
        EXPECT_NEAR(mu[0], 0.0, 1e-14 * std::pow(s, -2.0));
        const auto pt = phi_eval(10.0, s);
        EXPECT_NEAR((3 - 2) * pt.d2phi * s + 6 * pt.dphi, 0.0, 1e-13 * std::abs(pt.dphi));
    }
}

TEST(RadialSk, Examples) {
    EXPECT_DOUBLE_EQ(radial_sk({0.7, 0.7, 1.0, 0.0}, 3, 2), 12.0);
    const double a = 1.0 / std::sqrt(12.0);
    EXPECT_NEAR(radial_sk({2.0, 2 * a, a, 0.0}, 3, 2), 1.0, 1e-15);
}

TEST(RadialSk, FundamentalSolutionsVanish) {
    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (const auto& b : gamma_exponents(n, k).branches) {
                for (int i = 0; i < 50; ++i) {
                    const double s = std::pow(10.0, -4.0 + 6.0 * i / 49.0);
                    const auto pt = phi_eval(b.gamma, s);
                    EXPECT_LE(std::abs(radial_sk_relative(pt, n, k)), 1e-10)
                        << "n=" << n << " k=" << k << " gamma=" << b.gamma;
                }
            }
        }
    }
}

TEST(RadialSk, MatchesSymmetricFunctionOfRadialMu) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    std::uniform_real_distribution<double> logs(-3.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const RadialPoint pt{std::pow(10.0, logs(rng)), 0.0, uni(rng), uni(rng)};
        for (int n = 2; n <= 5; ++n) {
            for (int k = 1; k <= n; ++k) {
                const auto mu = radial_mu(pt, n);
                const double via_mu = testsupport::brute_force_sk(mu.vector(), k);
                std::vector<double> magnitude;
                for (double m : mu.vector()) {
                    magnitude.push_back(std::abs(m));
                }
                const double scale = testsupport::brute_force_sk(magnitude, k);
                EXPECT_NEAR(radial_sk(pt, n, k), via_mu, 1e-12 * scale);
            }
        }
    }
}

TEST(RadialMu, DenseHessianCrossCheck) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        Eigen::VectorXcd z(n);
        for (int i = 0; i < n; ++i) {
            z(i) = {normal(rng), normal(rng)};
        }
        const double s = z.squaredNorm();
        const auto pt = phi_eval(2.0 * n - 2.0, s);
        const auto dense = mu_of_matrix(radial_complex_hessian(pt, z)).mu.sorted_descending();
        const auto closed = radial_mu(pt, n).sorted_descending();
        const double scale = std::abs(pt.dphi) + std::abs(pt.d2phi) * s;
        for (int i = 0; i < n; ++i) {
            EXPECT_NEAR(dense[static_cast<std::size_t>(i)], closed[static_cast<std::size_t>(i)], 1e-9 * scale);
        }
    }
}

TEST(BranchAdmissible, OnlyHarmonicAndDegenerateProfilesAreAdmissible) {
    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (const auto& b : gamma_exponents(n, k).branches) {
                const bool expected = k == 1 || b.branch == Branch::Degenerate;
                EXPECT_EQ(branch_admissible(b), expected) << "n=" << n << " k=" << k << " gamma=" << b.gamma;
            }
        }
    }
    // The generic (3,2) profile lies in the negative cone: mu = (-20, -20, 10) at s = 1.
    const auto mu = radial_mu(phi_eval(10.0, 1.0), 3);
    EXPECT_EQ(mu.vector(), (std::vector<double>{-20, -20, 10}));
    std::vector<double> neg{20, 20, -10};
    EXPECT_NEAR(elementary_symmetric(neg, 2), 0.0, 1e-12);
    EXPECT_GT(elementary_symmetric(neg, 1), 0.0);
}

TEST(SingularProfile, LogBranch) {
    const auto pt = SingularProfile::logarithmic().eval(2.0);
    EXPECT_DOUBLE_EQ(pt.phi, std::log(2.0));
    // n = 2: m = phi' + phi'' s = 0, the degenerate profile.
    EXPECT_DOUBLE_EQ(radial_mu(pt, 2)[0], 0.0);
    EXPECT_EQ(SingularProfile::power(4.0).decay_rate(), 2.0);
    EXPECT_THROW(SingularProfile::power(0.0), InvalidArgument);
}
