#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hessgreen/grid_solver.hpp"
#include "support.hpp"

using namespace hessgreen;

namespace {

const Grid4& small_grid() {
    static const Grid4 g = Grid4::build(DomainSpec::ball(2, 1.0), 0.25, 0.125);
    return g;
}

/// Complex Hessian of f at the first active node with the grid's stencil.
HermitianMatrix stencil_hessian(const std::function<double(const Eigen::VectorXd&)>& f) {
    const auto field = make_field(small_grid(), f, f);
    return complex_hessian(field, small_grid().active_count() / 3);
}

void expect_matrix(const HermitianMatrix& a, double a00, double a11, cdouble a01) {
    EXPECT_NEAR(a(0, 0).real(), a00, 1e-12);
    EXPECT_NEAR(a(1, 1).real(), a11, 1e-12);
    EXPECT_NEAR(std::abs(a(0, 1) - a01), 0.0, 1e-12);
}

/// Ball-subsolution data for k = 2. For k = 1 the harmonic -|z|^{-2} part has a
/// negative discrete Laplacian near the puncture at this spacing, so the
/// manufactured solution is used instead.
GridField data_field(const Grid4& grid, int k) {
    if (k == 1) {
        const auto f = manufactured_solution(1, 0.25);
        return make_field(grid, f, f);
    }
    const auto sub = grid_ball_subsolution(k, 1.0, 0.0);
    auto f = [sub](const Eigen::VectorXd& x) { return sub.value(x); };
    return make_field(grid, f, f);
}

}  // namespace

TEST(Grid4, Classification) {
    const auto& g = small_grid();
    EXPECT_EQ(g.nodes_per_axis(), 2 * g.half() + 1);
    EXPECT_GT(g.active_count(), 1000u);
    EXPECT_GT(g.dirichlet_count(), 0u);
    for (auto lin : g.active_nodes()) {
        const auto x = g.coords(lin);
        EXPECT_GT(x.norm(), 0.25);
        EXPECT_LT(x.norm(), 1.0);
        for (auto off : g.offsets()) {
            EXPECT_NE(g.kind(lin + off), Grid4::Kind::Unused);
        }
    }
    for (auto lin : g.dirichlet_nodes()) {
        const auto x = g.coords(lin);
        EXPECT_TRUE(x.norm() <= 0.25 || x.norm() >= 1.0);
        EXPECT_EQ(g.linear(g.multi_index(lin)), lin);
    }
}

TEST(Grid4, Errors) {
    EXPECT_THROW(Grid4::build(DomainSpec::ball(3, 1.0), 0.25, 0.125), InvalidArgument);
    EXPECT_THROW(Grid4::build(DomainSpec::ball(2, 1.0), 1.5, 0.125), InvalidArgument);
    EXPECT_THROW(Grid4::build(DomainSpec::ball(2, 1.0), 0.25, -0.1), InvalidArgument);
    const auto& g = small_grid();
    const GridField f{&g, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.active_count())),
                      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.dirichlet_count()))};
    EXPECT_THROW(f.at(0), GridConstructionError);
}

TEST(StencilHessian, QuadraticExamples) {
    // |z|^2
    expect_matrix(stencil_hessian([](const Eigen::VectorXd& x) { return x.squaredNorm(); }), 1.0, 1.0, 0.0);
    // Re(z1^2) is pluriharmonic.
    expect_matrix(stencil_hessian([](const Eigen::VectorXd& x) { return x(0) * x(0) - x(1) * x(1); }), 0.0, 0.0,
                  0.0);
    // x1 x2: u_{1 2bar} = 1/4.
    expect_matrix(stencil_hessian([](const Eigen::VectorXd& x) { return x(0) * x(2); }), 0.0, 0.0, {0.25, 0.0});
    // x1 y2 and y1 x2 carry the imaginary part with opposite signs.
    expect_matrix(stencil_hessian([](const Eigen::VectorXd& x) { return x(0) * x(3); }), 0.0, 0.0, {0.0, 0.25});
    expect_matrix(stencil_hessian([](const Eigen::VectorXd& x) { return x(1) * x(2); }), 0.0, 0.0, {0.0, -0.25});
    // |z1|^2 alone.
    expect_matrix(stencil_hessian([](const Eigen::VectorXd& x) { return x(0) * x(0) + x(1) * x(1); }), 1.0, 0.0,
                  0.0);
}

TEST(Operator2, MatchesGeneralOperator) {
    std::mt19937_64 rng(11);
    for (const auto& p : {default_params(2, 1, 1.0), default_params(2, 2, 1.0),
                          OperatorParams{2, 2, Form::Root, 1.0}}) {
        for (int i = 0; i < 200; ++i) {
            const auto a = testsupport::random_admissible(rng, 2, p.k);
            const Hessian2 H{a(0, 0).real(), a(1, 1).real(), a(0, 1)};
            const auto op = operator2(H, p);
            ASSERT_TRUE(op.admissible);
            EXPECT_NEAR(op.F, f_value(a, p), 1e-12 * (1.0 + std::abs(op.F)));
            const auto G = f_gradient(a, p);
            const double scale = 1e-10 * (1.0 + G.max_abs_entry());
            EXPECT_NEAR(op.g00, G(0, 0).real(), scale);
            EXPECT_NEAR(op.g11, G(1, 1).real(), scale);
            EXPECT_NEAR(std::abs(op.g10 - G(1, 0)), 0.0, scale);
        }
    }
    EXPECT_FALSE(operator2({1.0, 1.0, {2.0, 0.0}}, default_params(2, 2, 1.0)).admissible);
    EXPECT_FALSE(operator2({-1.0, 0.5, {0.0, 0.0}}, default_params(2, 1, 1.0)).admissible);
}

TEST(Jacobian, MatchesDirectionalDifference) {
    const auto& g = small_grid();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int k : {1, 2}) {
        const auto p = default_params(2, k, 0.25);
        auto field = data_field(g, k);
        // A smooth non-radial perturbation keeps the mixed entries nonzero.
        auto q = [](const Eigen::VectorXd& x) { return 0.05 * (x(0) * x(2) + x(1) * x(3)); };
        field.active += sample_nodes(g, g.active_nodes(), q);
        field.dirichlet += sample_nodes(g, g.dirichlet_nodes(), q);
        const auto base = evaluate_grid(field, p);
        ASSERT_EQ(base.inadmissible, 0u) << "k=" << k;
        const auto J = assemble_jacobian(field, base.ops);
        Eigen::VectorXd v(static_cast<Eigen::Index>(g.active_count()));
        for (auto& e : v) {
            e = unif(rng);
        }
        const double t = 1e-7;
        GridField up = field;
        GridField dn = field;
        up.active += t * v;
        dn.active -= t * v;
        const Eigen::VectorXd fd = (assemble_residual(up, p) - assemble_residual(dn, p)) / (2.0 * t);
        const Eigen::VectorXd jv = J * v;
        EXPECT_LT((fd - jv).lpNorm<Eigen::Infinity>(), 1e-5 * (1.0 + jv.lpNorm<Eigen::Infinity>())) << "k=" << k;
    }
}

TEST(AssembleResidual, ReportsInadmissibleNode) {
    const auto& g = small_grid();
    const auto field = make_field(g, [](const Eigen::VectorXd& x) { return -x.squaredNorm(); },
                                  [](const Eigen::VectorXd& x) { return -x.squaredNorm(); });
    EXPECT_THROW(assemble_residual(field, default_params(2, 2, 0.25)), InadmissiblePoint);
    EXPECT_THROW(solve_grid(field, default_params(2, 2, 0.25)), InvalidArgument);
    EXPECT_THROW(solve_grid(data_field(g, 2), default_params(2, 2, 0.0)), InvalidArgument);
}

TEST(SolveGrid, LinearCaseConvergesInOneStep) {
    const auto& g = small_grid();
    const auto sol = solve_grid(data_field(g, 1), default_params(2, 1, 0.25));
    EXPECT_TRUE(sol.report.converged);
    EXPECT_EQ(sol.report.iterations, 1);
    const auto ref = reference_poisson(g, sol.field.dirichlet, 0.25);
    EXPECT_LT((ref.active - sol.field.active).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(SolveGrid, NonlinearInvariants) {
    const auto& g = small_grid();
    const auto p = default_params(2, 2, 0.25);
    const auto init = data_field(g, 2);
    const auto sol = solve_grid(init, p);
    EXPECT_TRUE(sol.report.converged);
    EXPECT_TRUE(sol.report.all_iterates_admissible);
    EXPECT_LE(sol.report.residual_history.back(), 1e-9 * 1.25);
    for (std::size_t j = 1; j < sol.report.residual_history.size(); ++j) {
        EXPECT_LT(sol.report.residual_history[j], sol.report.residual_history[j - 1]);
    }
    // Comparison: the subsolution data is a discrete subsolution (S_2 >= 1 > 0.25).
    EXPECT_GE((sol.field.active - init.active).minCoeff(), 0.0);
    const auto r = evaluate_grid(sol.field, p);
    EXPECT_EQ(r.inadmissible, 0u);

    // Adding the discrete-pluriharmonic quadratic Re(z1 z2) to the data adds it to the solution.
    auto q = [](const Eigen::VectorXd& x) { return x(0) * x(2) - x(1) * x(3); };
    GridField shifted = init;
    shifted.active += sample_nodes(g, g.active_nodes(), q);
    shifted.dirichlet += sample_nodes(g, g.dirichlet_nodes(), q);
    const auto sol2 = solve_grid(shifted, p);
    const Eigen::VectorXd diff = sol2.field.active - sol.field.active - sample_nodes(g, g.active_nodes(), q);
    EXPECT_LT(diff.lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(SolveGrid, InitIndependence) {
    const auto& g = small_grid();
    const auto p = default_params(2, 2, 0.25);
    const auto a = data_field(g, 2);
    GridField b = a;
    b.active += sample_nodes(g, g.active_nodes(), shell_perturbation(1.0, 0.25, 0.01));
    const auto ua = solve_grid(a, p);
    const auto ub = solve_grid(b, p);
    EXPECT_LT((ua.field.active - ub.field.active).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(Manufactured, LevelMatchesEps) {
    const double eps = 0.3;
    for (int k : {1, 2}) {
        const auto f = manufactured_solution(k, eps);
        const auto p = default_params(2, k, eps);
        // The cubic and higher Taylor terms make the discrete level O(h^2) off.
        const auto field = make_field(small_grid(), f, f);
        const auto r = evaluate_grid(field, p);
        EXPECT_EQ(r.inadmissible, 0u);
        EXPECT_LT(r.residual.lpNorm<Eigen::Infinity>(), 0.1) << "k=" << k;
    }
    EXPECT_THROW(manufactured_solution(3, eps), InvalidArgument);
}
