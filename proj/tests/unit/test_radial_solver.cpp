#include <gtest/gtest.h>

#include <cmath>

#include "hessgreen/diagnostics.hpp"
#include "hessgreen/green_limit.hpp"
#include "hessgreen/radial_solver.hpp"

using namespace hessgreen;

namespace {

/// k = 1: (n-1)(n phi' + s phi'') = h, so phi = A s^{1-n} + B + h s / (n(n-1)).
struct LaplaceOracle {
    double A = 0.0;
    double B = 0.0;
    double c = 0.0;
    int n = 2;

    LaplaceOracle(int n_, double h, double s0, double u0, double s1, double u1) : n(n_) {
        c = h / (n * (n - 1.0));
        const double e0 = std::pow(s0, 1 - n);
        const double e1 = std::pow(s1, 1 - n);
        A = ((u0 - c * s0) - (u1 - c * s1)) / (e0 - e1);
        B = u1 - c * s1 - A * e1;
    }
    double operator()(double s) const { return A * std::pow(s, 1 - n) + B + c * s; }
};

RadialProblem laplace_problem(int n) {
    return make_radial_problem(default_params(n, 1), SingularProfile::power(2.0 * n - 2.0), 1.0, 0.2, 256, -5.0,
                               0.0);
}

}  // namespace

TEST(LogMesh, Endpoints) {
    const auto t = log_mesh(0.1, 2.0, 10);
    ASSERT_EQ(t.size(), 11u);
    EXPECT_DOUBLE_EQ(t.front(), 2.0 * std::log(0.1));
    EXPECT_DOUBLE_EQ(t.back(), 2.0 * std::log(2.0));
    EXPECT_THROW(log_mesh(1.0, 0.5, 4), InvalidArgument);
}

TEST(AdmissibleRoot, SolvesTheRadialEquation) {
    for (int n = 2; n <= 5; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (double p : {-3.0, -0.1, 0.2, 4.0}) {
                const double h = 0.7;
                const auto root = admissible_root(p, n, k, h);
                if (k == n && p <= 0.0) {
                    EXPECT_FALSE(root.has_value());
                    continue;
                }
                ASSERT_TRUE(root.has_value());
                const double m = root->m;
                const double K = binomial(n - 1, k - 1) / k;
                const double lhs = K * std::pow(m, k - 1) * ((n - k) * m + k * (n - 1) * p);
                const double scale = K * std::pow(m, k - 1) * (std::abs((n - k) * m) + std::abs(k * (n - 1) * p));
                EXPECT_NEAR(lhs, h, 1e-13 * (1.0 + scale)) << n << "," << k << " p=" << p;
                const double dp = 1e-6 * (1.0 + std::abs(p));
                const auto up = admissible_root(p + dp, n, k, h);
                const auto dn = admissible_root(p - dp, n, k, h);
                ASSERT_TRUE(up && dn);
                EXPECT_NEAR(root->dm_dp, (up->m - dn->m) / (2.0 * dp), 1e-5 * (1.0 + std::abs(root->dm_dp)));
            }
        }
    }
}

TEST(RadialSolver, LaplaceClosedForm) {
    for (int n : {2, 3, 4}) {
        const auto problem = laplace_problem(n);
        const auto sol = solve_radial(problem, matched_profile(problem));
        EXPECT_TRUE(sol.admissible);
        const LaplaceOracle exact(n, problem.params.rhs_level, 0.04, -5.0, 1.0, 0.0);
        for (double r : {0.21, 0.3, 0.45, 0.6, 0.8, 0.99}) {
            const double s = r * r;
            EXPECT_NEAR(sol.value_at_radius(r), exact(s), 1e-8 * (1.0 + std::abs(exact(s)))) << "n=" << n;
        }
        EXPECT_EQ(sol.phi.front(), -5.0);
        EXPECT_EQ(sol.phi.back(), 0.0);
    }
}

TEST(RadialSolver, RestartNeedsNoIterations) {
    const auto problem = laplace_problem(3);
    const auto sol = solve_radial(problem, matched_profile(problem));
    EXPECT_GT(sol.newton_iters, 0);
    const auto again = solve_radial(problem, as_profile(sol));
    EXPECT_EQ(again.newton_iters, 0);
    for (std::size_t j = 0; j < sol.phi.size(); ++j) {
        EXPECT_NEAR(again.phi[j], sol.phi[j], 1e-12 * (1.0 + std::abs(sol.phi[j])));
    }
}

TEST(RadialSolver, NodalResidualIsSmall) {
    GreenLimitConfig cfg;
    cfg.params = default_params(3, 2);
    cfg.profile = SingularProfile::power(2.0);
    cfg.eps_schedule = {0.2};
    const auto setup = green_level_setup(cfg, 0.2);
    const auto sol = solve_radial(setup.problem, setup.lower);
    EXPECT_TRUE(sol.admissible);
    const auto res = radial_residual(sol.phi, setup.problem, 6);
    for (std::size_t j = 1; j + 1 < res.residual.size(); ++j) {
        EXPECT_TRUE(res.admissible[j]);
        EXPECT_LT(std::abs(res.residual[j]), 1e-4 * res.scale[j]) << "node " << j;
    }
}

TEST(RadialSolver, ComparisonWithSubsolution) {
    for (const auto& [n, k, gamma] : {std::tuple{3, 1, 4.0}, std::tuple{3, 2, 2.0}, std::tuple{3, 3, 2.0}}) {
        GreenLimitConfig cfg;
        cfg.params = default_params(n, k);
        cfg.profile = SingularProfile::power(gamma);
        cfg.eps_schedule = {0.1};
        cfg.inner = InnerData::Subsolution;
        const auto setup = green_level_setup(cfg, 0.1);
        const auto sol = solve_radial(setup.problem, setup.lower);
        const double C0 = std::max(std::abs(setup.problem.inner_value - cfg.profile.eval(0.01).phi),
                                   std::abs(setup.problem.outer_value - cfg.profile.eval(1.0).phi));
        const auto upper = [&](double s) {
            auto pt = cfg.profile.eval(s);
            pt.phi += C0;
            return pt;
        };
        const auto check = sandwich_check(sol, setup.lower, upper);
        EXPECT_LE(check.max_violation, 1e-9) << n << "," << k;
    }
}

TEST(RadialSolver, RejectsInadmissibleInit) {
    const auto problem = laplace_problem(3);
    const RadialProfileFn flat = [](double s) { return RadialPoint{s, 0.0, 0.0, 0.0}; };
    EXPECT_FALSE(profile_admissible(flat, problem));
    EXPECT_THROW(solve_radial(problem, flat), InvalidArgument);
}

TEST(RadialProblem, Validation) {
    EXPECT_THROW(make_radial_problem(default_params(3, 1), SingularProfile::power(4.0), 1.0, 0.2, 16, 0.0, 0.0),
                 InvalidArgument);
    EXPECT_THROW(make_radial_problem(default_params(3, 1), SingularProfile::power(4.0), 1.0, 1.5, 64, 0.0, 0.0),
                 InvalidArgument);
    auto p = laplace_problem(3);
    p.inner_value = std::nan("");
    EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(RadialSolution, HermiteReproducesNodes) {
    const auto problem = laplace_problem(3);
    const auto sol = solve_radial(problem, matched_profile(problem));
    for (std::size_t j = 0; j < sol.t.size(); j += 17) {
        const auto pt = sol.eval(std::exp(sol.t[j]));
        EXPECT_NEAR(pt.phi, sol.phi[j], 1e-12 * (1.0 + std::abs(sol.phi[j])));
        EXPECT_NEAR(pt.dphi, sol.dphi[j], 1e-9 * (1.0 + std::abs(sol.dphi[j])));
    }
    EXPECT_THROW(sol.eval(0.001), InvalidArgument);
    EXPECT_THROW(sol.eval(2.0), InvalidArgument);
}
