#include <gtest/gtest.h>

#include <random>

#include "hessgreen/symfun.hpp"
#include "support.hpp"

using namespace hessgreen;

TEST(ElementarySymmetric, HandValues) {
    // Pairs of (3,2,1): 6 + 3 + 2.
    EXPECT_DOUBLE_EQ(elementary_symmetric(Spectrum{3, 2, 1}, 2), 11.0);
    EXPECT_DOUBLE_EQ(elementary_symmetric(Spectrum{1, 1, 1}, 3), 1.0);
    EXPECT_DOUBLE_EQ(elementary_symmetric(Spectrum{-4.5, 7, 0.25}, 0), 1.0);
    EXPECT_DOUBLE_EQ(elementary_symmetric(Spectrum{1, 2}, 3), 0.0);
}

TEST(ElementarySymmetric, NegativeDegreeRejected) {
    EXPECT_THROW(elementary_symmetric(Spectrum{1, 2}, -1), InvalidArgument);
}

TEST(ElementarySymmetric, MatchesSubsetEnumeration) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> mu(static_cast<std::size_t>(n));
            for (auto& m : mu) {
                m = normal(rng);
            }
            for (int k = 0; k <= n; ++k) {
                const double expected = testsupport::brute_force_sk(mu, k);
                EXPECT_NEAR(elementary_symmetric(mu, k), expected, 1e-12 * (1.0 + std::abs(expected)));
            }
        }
    }
}

TEST(PartialSymmetric, HandValues) {
    EXPECT_DOUBLE_EQ(partial_symmetric(Spectrum{2, 2, 2}, 2, 0), 4.0);
    EXPECT_DOUBLE_EQ(partial_symmetric(Spectrum{1, 0, 0}, 1, 0), 1.0);
    EXPECT_DOUBLE_EQ(partial_symmetric(Spectrum{3, 2, 1}, 3, 1), 3.0);
}

TEST(PartialSymmetric, RangeChecks) {
    EXPECT_THROW(partial_symmetric(Spectrum{1, 2, 3}, 2, 3), InvalidArgument);
    EXPECT_THROW(partial_symmetric(Spectrum{1, 2, 3}, 0, 0), InvalidArgument);
    EXPECT_THROW(partial_symmetric(Spectrum{1, 2, 3}, 4, 0), InvalidArgument);
}

TEST(PartialSymmetric, MatchesCentralDifference) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int n = 2; n <= 6; ++n) {
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<double> mu(static_cast<std::size_t>(n));
            for (auto& m : mu) {
                m = normal(rng);
            }
            for (int k = 1; k <= n; ++k) {
                for (std::size_t j = 0; j < mu.size(); ++j) {
                    const double step = 1e-5;
                    auto plus = mu;
                    auto minus = mu;
                    plus[j] += step;
                    minus[j] -= step;
                    const double fd =
                        (testsupport::brute_force_sk(plus, k) - testsupport::brute_force_sk(minus, k)) / (2 * step);
                    const double exact = partial_symmetric(mu, k, j);
                    // S_k is affine in mu_j, so the central difference is exact up to rounding.
                    EXPECT_NEAR(exact, fd, 1e-6 * (1.0 + std::abs(exact)));
                }
            }
        }
    }
}

TEST(GardingCone, Membership) {
    EXPECT_TRUE(in_gamma_k(Spectrum{1, 1, 1}, 3));
    EXPECT_TRUE(in_gamma_k(Spectrum{3, 3, -1}, 2));
    EXPECT_FALSE(in_gamma_k(Spectrum{1, -1, 0}, 1));
    EXPECT_FALSE(in_gamma_k(Spectrum{3, 3, -1}, 3));
    EXPECT_THROW(in_gamma_k(Spectrum{1, 1}, 3), InvalidArgument);
}

TEST(GardingCone, NestedMembership) {
    std::mt19937_64 rng(3);
    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (int trial = 0; trial < 50; ++trial) {
                const auto mu = testsupport::sample_cone(rng, n, k);
                for (int j = 1; j <= k; ++j) {
                    EXPECT_TRUE(in_gamma_k(mu, j));
                }
            }
        }
    }
}

TEST(IdentitySuite, HandValues) {
    const auto r = identity_suite(Spectrum{2, 2, 2}, 2);
    EXPECT_LE(r.p04_relative_residual, 1e-15);
    EXPECT_LE(r.p02_relative_residual, 1e-15);
    EXPECT_NEAR(r.p03_ratio, 1.0 / 3.0, 1e-15);

    const auto k1 = identity_suite(Spectrum{1, 1, 1}, 1);
    EXPECT_FALSE(k1.p01_ratio.has_value());
    EXPECT_LE(k1.p02_relative_residual, 1e-15);

    EXPECT_NEAR(identity_suite(Spectrum{3, 2, 1}, 2).p03_ratio, 4.0 / 12.0, 1e-15);
}

TEST(IdentitySuite, RejectsOutsideCone) {
    EXPECT_THROW(identity_suite(Spectrum{1, -2, 0}, 1), ConeViolation);
}

TEST(IdentitySuite, RandomConeSamples) {
    std::mt19937_64 rng(42);
    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (int trial = 0; trial < 100; ++trial) {
                auto mu = testsupport::sample_cone(rng, n, k);
                const auto r = identity_suite(mu, k);
                EXPECT_LE(r.p04_relative_residual, 1e-10);
                EXPECT_LE(r.p02_relative_residual, 1e-10);
                EXPECT_GT(r.p03_ratio, 0.0);
                if (k >= 2) {
                    EXPECT_GT(*r.p01_ratio, 0.0);
                }
                std::sort(mu.begin(), mu.end(), std::greater<>());
                for (std::size_t i = 0; i + 1 < mu.size(); ++i) {
                    EXPECT_LE(partial_symmetric(mu, k, i), partial_symmetric(mu, k, i + 1) * (1 + 1e-12) + 1e-12);
                }
            }
        }
    }
}
