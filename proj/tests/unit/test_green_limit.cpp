#include <gtest/gtest.h>

#include <cmath>

#include "hessgreen/diagnostics.hpp"
#include "hessgreen/green_limit.hpp"

using namespace hessgreen;

namespace {

GreenLimitConfig laplace_config(InnerData inner) {
    GreenLimitConfig cfg;
    cfg.params = default_params(3, 1);
    cfg.profile = SingularProfile::power(4.0);
    cfg.inner = inner;
    for (int j = 0; j <= 6; ++j) {
        cfg.eps_schedule.push_back(0.2 * std::pow(0.5, j));
    }
    cfg.probe_radii = {0.3, 0.5, 0.7};
    cfg.M = 256;
    return cfg;
}

}  // namespace

TEST(Richardson, ExactOnPolynomialsInEps) {
    const std::vector<double> eps{0.4, 0.2, 0.1};
    std::vector<double> vals;
    for (double e : eps) {
        vals.push_back(3.0 - 2.0 * std::sqrt(e) + 5.0 * e);
    }
    EXPECT_NEAR(richardson_limit(eps, vals, 0.5, 2), 3.0, 1e-12);
    EXPECT_THROW(richardson_limit(eps, vals, 0.5, 1), InvalidArgument);
}

TEST(LimitExponent, Branches) {
    EXPECT_EQ(default_limit_exponent(default_params(3, 1), SingularProfile::power(4.0)), 1.0);
    EXPECT_EQ(default_limit_exponent(default_params(3, 3), SingularProfile::power(2.0)), 0.5);
    EXPECT_EQ(default_limit_exponent(default_params(3, 2), SingularProfile::power(10.0)), 1.0);
    EXPECT_EQ(default_limit_exponent(default_params(2, 2), SingularProfile::logarithmic()), 1.0);
}

TEST(GreenLimit, LaplaceReachesTheFundamentalSolution) {
    const auto report = green_limit(laplace_config(InnerData::ExactHomogeneous));
    ASSERT_TRUE(report.all_solved);
    EXPECT_TRUE(report.monotonicity_ok);
    EXPECT_TRUE(report.sandwich_ok);
    ASSERT_EQ(report.reference.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        const double r = report.config.probe_radii[i];
        EXPECT_DOUBLE_EQ(report.reference[i], 1.0 - std::pow(r, -4.0));
        EXPECT_NEAR(report.extrapolated[i], report.reference[i], 1e-6);
    }
}

TEST(GreenLimit, SubsolutionDataIsMonotone) {
    for (const auto& [n, k, gamma] : {std::tuple{3, 1, 4.0}, std::tuple{3, 3, 2.0}, std::tuple{3, 2, 2.0}}) {
        auto cfg = laplace_config(InnerData::Subsolution);
        cfg.params = default_params(n, k);
        cfg.profile = SingularProfile::power(gamma);
        const auto report = green_limit(cfg);
        ASSERT_TRUE(report.all_solved) << n << "," << k;
        EXPECT_TRUE(report.monotonicity_ok) << n << "," << k << " gap " << report.worst_monotonicity_gap;
        EXPECT_TRUE(report.sandwich_ok) << n << "," << k;
        EXPECT_TRUE(report.reference.empty());
        for (const auto& row : report.cauchy) {
            for (std::size_t j = 1; j < row.size(); ++j) {
                EXPECT_LT(row[j], row[j - 1]);
            }
        }
    }
}

TEST(GreenLimit, ScalingStaysBounded) {
    const auto report = green_limit(laplace_config(InnerData::ExactHomogeneous));
    const auto d = scaling_diagnostic(report, 4.0);
    EXPECT_TRUE(d.bounded);
    EXPECT_EQ(d.eps.size(), report.levels.size());
}

TEST(GreenLimit, GenericBranchLevelsReportFailure) {
    auto cfg = laplace_config(InnerData::ExactHomogeneous);
    cfg.params = default_params(3, 2);
    cfg.profile = SingularProfile::power(10.0);
    cfg.eps_schedule = {0.2};
    const auto report = green_limit(cfg);
    EXPECT_FALSE(report.all_solved);
    ASSERT_EQ(report.levels.size(), 1u);
    EXPECT_FALSE(report.levels[0].failure.empty());
    EXPECT_TRUE(std::isnan(report.extrapolated[0]));
}

TEST(GreenLimitConfig, Validation) {
    auto cfg = laplace_config(InnerData::ExactHomogeneous);
    cfg.eps_schedule = {0.1, 0.2};
    EXPECT_THROW(green_limit(cfg), InvalidArgument);
    cfg.eps_schedule = {0.2, 0.1};
    cfg.probe_radii = {0.15};
    EXPECT_THROW(green_limit(cfg), InvalidArgument);
    cfg.probe_radii = {};
    cfg.eps_schedule = {};
    EXPECT_THROW(green_limit(cfg), InvalidArgument);
}
