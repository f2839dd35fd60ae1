#pragma once

/// Finite-difference Newton solver for S_k(mu[u]) = h on punctured domains in
/// C^2 = R^4, coordinates (x1, y1, x2, y2).
///
/// The complex Hessian u_{i j-bar} = (u_{x_i x_j} + u_{y_i y_j} + i(u_{x_i y_j} - u_{y_i x_j}))/4
/// is built from second-order central differences: 3-point axis stencils and
/// 4-corner stencils for the four mixed pairs, 25 points in all. Curved boundaries
/// are handled by Dirichlet masking: every non-active node within stencil reach of
/// an active node takes the value of a globally defined boundary function.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "hessgreen/error.hpp"
#include "hessgreen/hessian_operator.hpp"
#include "hessgreen/subsolution.hpp"

namespace hessgreen {

inline constexpr int kGridDim = 4;
inline constexpr int kStencilSize = 25;

/// Axis pairs (a, b) of the mixed derivatives: (x1,x2), (y1,y2), (x1,y2), (y1,x2).
inline constexpr std::array<std::array<int, 2>, 4> kMixedPairs{{{0, 2}, {1, 3}, {0, 3}, {1, 2}}};

/// Node classification of a uniform grid on [-L, L]^4.
class Grid4 {
public:
    enum class Kind { Active, Dirichlet, Unused };

    /// Active nodes: inside the domain with |x| > eps. The box half-width is
    /// h (ceil(extent/h) + 2), leaving at least one node of margin beyond the domain.
    static Grid4 build(const DomainSpec& domain, double eps, double h) {
        if (domain.n != 2) {
            throw InvalidArgument("Grid4: the grid path is fixed to n = 2");
        }
        if (!(h > 0.0)) {
            throw InvalidArgument("Grid4: h must be > 0");
        }
        if (!(eps > 0.0)) {
            throw InvalidArgument("Grid4: eps must be > 0");
        }
        double extent = domain.radius;
        if (domain.shape == DomainSpec::Shape::Box) {
            extent = std::max(domain.lower.cwiseAbs().maxCoeff(), domain.upper.cwiseAbs().maxCoeff());
        } else if (!(eps < domain.radius)) {
            throw InvalidArgument("Grid4: eps must be smaller than the ball radius");
        }
        Grid4 g;
        g.h_ = h;
        g.half_ = static_cast<int>(std::ceil(extent / h - 1e-12)) + 2;
        g.n_ = 2 * g.half_ + 1;
        g.eps_ = eps;
        if (eps + 2.0 * h > g.half_ * h) {
            throw GridConstructionError("Grid4: puncture ball does not fit in the box with a 2h margin");
        }
        const std::int64_t total = static_cast<std::int64_t>(g.n_) * g.n_ * g.n_ * g.n_;
        g.map_.assign(static_cast<std::size_t>(total), kUnused);
        g.strides_ = {static_cast<std::int64_t>(g.n_) * g.n_ * g.n_, static_cast<std::int64_t>(g.n_) * g.n_, g.n_, 1};
        g.build_offsets();

        const double eps2 = eps * eps;
        Eigen::VectorXd x(kGridDim);
        for (std::int64_t lin = 0; lin < total; ++lin) {
            g.fill_coords(lin, x);
            if (x.squaredNorm() > eps2 && domain.contains(x)) {
                g.map_[static_cast<std::size_t>(lin)] = static_cast<std::int32_t>(g.active_.size());
                g.active_.push_back(lin);
            }
        }
        if (g.active_.empty()) {
            throw GridConstructionError("Grid4: no active nodes");
        }
        for (std::int64_t lin : g.active_) {
            const auto idx = g.multi_index(lin);
            for (int a = 0; a < kGridDim; ++a) {
                if (idx[static_cast<std::size_t>(a)] == 0 || idx[static_cast<std::size_t>(a)] == g.n_ - 1) {
                    throw GridConstructionError("Grid4: active node on the box boundary");
                }
            }
            for (std::int64_t off : g.offsets_) {
                const auto nb = static_cast<std::size_t>(lin + off);
                if (g.map_[nb] == kUnused) {
                    g.map_[nb] = static_cast<std::int32_t>(-2 - static_cast<std::int64_t>(g.dirichlet_.size()));
                    g.dirichlet_.push_back(lin + off);
                }
            }
        }
        return g;
    }

    double h() const noexcept { return h_; }
    double eps() const noexcept { return eps_; }
    int nodes_per_axis() const noexcept { return n_; }
    int half() const noexcept { return half_; }
    std::size_t active_count() const noexcept { return active_.size(); }
    std::size_t dirichlet_count() const noexcept { return dirichlet_.size(); }
    const std::vector<std::int64_t>& active_nodes() const noexcept { return active_; }
    const std::vector<std::int64_t>& dirichlet_nodes() const noexcept { return dirichlet_; }
    const std::array<std::int64_t, kStencilSize>& offsets() const noexcept { return offsets_; }
    std::int64_t total_nodes() const noexcept { return static_cast<std::int64_t>(map_.size()); }

    /// >= 0 active index, -1 unused, <= -2 Dirichlet index (-2 - d).
    std::int32_t code(std::int64_t lin) const { return map_[static_cast<std::size_t>(lin)]; }

    Kind kind(std::int64_t lin) const {
        const auto c = code(lin);
        return c >= 0 ? Kind::Active : (c == kUnused ? Kind::Unused : Kind::Dirichlet);
    }

    std::array<int, kGridDim> multi_index(std::int64_t lin) const {
        std::array<int, kGridDim> idx{};
        for (int a = 0; a < kGridDim; ++a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(lin / strides_[static_cast<std::size_t>(a)]);
            lin %= strides_[static_cast<std::size_t>(a)];
        }
        return idx;
    }

    std::int64_t linear(const std::array<int, kGridDim>& idx) const {
        std::int64_t lin = 0;
        for (int a = 0; a < kGridDim; ++a) {
            lin += idx[static_cast<std::size_t>(a)] * strides_[static_cast<std::size_t>(a)];
        }
        return lin;
    }

    void fill_coords(std::int64_t lin, Eigen::VectorXd& x) const {
        const auto idx = multi_index(lin);
        for (int a = 0; a < kGridDim; ++a) {
            x(a) = (idx[static_cast<std::size_t>(a)] - half_) * h_;
        }
    }

    Eigen::VectorXd coords(std::int64_t lin) const {
        Eigen::VectorXd x(kGridDim);
        fill_coords(lin, x);
        return x;
    }

    /// Lower corner of the box.
    double lower() const noexcept { return -half_ * h_; }

private:
    static constexpr std::int32_t kUnused = -1;

    void build_offsets() {
        std::size_t i = 0;
        offsets_[i++] = 0;
        for (int a = 0; a < kGridDim; ++a) {
            offsets_[i++] = strides_[static_cast<std::size_t>(a)];
            offsets_[i++] = -strides_[static_cast<std::size_t>(a)];
        }
        for (const auto& pair : kMixedPairs) {
            const auto sa = strides_[static_cast<std::size_t>(pair[0])];
            const auto sb = strides_[static_cast<std::size_t>(pair[1])];
            offsets_[i++] = sa + sb;
            offsets_[i++] = sa - sb;
            offsets_[i++] = -sa + sb;
            offsets_[i++] = -sa - sb;
        }
    }

    double h_ = 0.0;
    double eps_ = 0.0;
    int half_ = 0;
    int n_ = 0;
    std::array<std::int64_t, kGridDim> strides_{};
    std::array<std::int64_t, kStencilSize> offsets_{};
    std::vector<std::int32_t> map_;
    std::vector<std::int64_t> active_;
    std::vector<std::int64_t> dirichlet_;
};

/// Values on the active and Dirichlet nodes of a grid.
struct GridField {
    const Grid4* grid = nullptr;
    Eigen::VectorXd active;
    Eigen::VectorXd dirichlet;

    /// Value at any active or Dirichlet node. Unused nodes are a construction error.
    double at(std::int64_t lin) const {
        const auto c = grid->code(lin);
        if (c >= 0) {
            return active(c);
        }
        if (c == -1) {
            throw GridConstructionError("GridField: stencil reached an unused node");
        }
        return dirichlet(-2 - c);
    }
};

/// Samples a function at the Dirichlet nodes (or active nodes) of a grid.
inline Eigen::VectorXd sample_nodes(const Grid4& grid, const std::vector<std::int64_t>& nodes,
                                    const std::function<double(const Eigen::VectorXd&)>& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(nodes.size()));
    Eigen::VectorXd x(kGridDim);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        grid.fill_coords(nodes[i], x);
        v(static_cast<Eigen::Index>(i)) = f(x);
    }
    return v;
}

inline GridField make_field(const Grid4& grid, const std::function<double(const Eigen::VectorXd&)>& active_values,
                            const std::function<double(const Eigen::VectorXd&)>& dirichlet_values) {
    return {&grid, sample_nodes(grid, grid.active_nodes(), active_values),
            sample_nodes(grid, grid.dirichlet_nodes(), dirichlet_values)};
}

/// Entries of the 2x2 complex Hessian.
struct Hessian2 {
    double a00 = 0.0;
    double a11 = 0.0;
    cdouble a01{0.0, 0.0};

    HermitianMatrix matrix() const {
        HermitianMatrix m(2);
        m.set_diagonal(0, a00);
        m.set_diagonal(1, a11);
        m.set(0, 1, a01);
        return m;
    }
};

/// Complex Hessian from the 25 stencil values (ordered as Grid4::offsets()).
inline Hessian2 hessian_from_stencil(const std::array<double, kStencilSize>& v, double h) {
    const double inv_h2 = 1.0 / (h * h);
    std::array<double, kGridDim> axis{};
    for (int a = 0; a < kGridDim; ++a) {
        const auto i = static_cast<std::size_t>(1 + 2 * a);
        axis[static_cast<std::size_t>(a)] = (v[i] - 2.0 * v[0] + v[i + 1]) * inv_h2;
    }
    std::array<double, 4> mixed{};
    for (std::size_t p = 0; p < 4; ++p) {
        const std::size_t i = 9 + 4 * p;
        mixed[p] = (v[i] - v[i + 1] - v[i + 2] + v[i + 3]) * 0.25 * inv_h2;
    }
    Hessian2 H;
    H.a00 = 0.25 * (axis[0] + axis[1]);
    H.a11 = 0.25 * (axis[2] + axis[3]);
    H.a01 = 0.25 * cdouble(mixed[0] + mixed[1], mixed[2] - mixed[3]);
    return H;
}

inline std::array<double, kStencilSize> gather(const GridField& field, std::int64_t lin) {
    std::array<double, kStencilSize> v{};
    const auto& off = field.grid->offsets();
    for (std::size_t i = 0; i < kStencilSize; ++i) {
        v[i] = field.at(lin + off[i]);
    }
    return v;
}

/// Complex Hessian at an active node.
inline HermitianMatrix complex_hessian(const GridField& field, std::size_t active_index) {
    const auto lin = field.grid->active_nodes().at(active_index);
    return hessian_from_stencil(gather(field, lin), field.grid->h()).matrix();
}

/// F and its gradient G for n = 2 in closed form: mu = (lambda_2, lambda_1), so
/// S_1(mu) = tr A and S_2(mu) = det A; the gradient of det is adj(A).
struct Operator2 {
    bool admissible = false;
    double F = 0.0;
    double g00 = 0.0;
    double g11 = 0.0;
    cdouble g10{0.0, 0.0};
};

inline Operator2 operator2(const Hessian2& A, const OperatorParams& p) {
    Operator2 r;
    const double tr = A.a00 + A.a11;
    if (p.k == 1) {
        r.admissible = tr > 0.0;
        r.F = tr;
        r.g00 = 1.0;
        r.g11 = 1.0;
        return r;
    }
    const double det = A.a00 * A.a11 - std::norm(A.a01);
    r.admissible = tr > 0.0 && det > 0.0;
    if (!r.admissible) {
        return r;
    }
    // adj(A) = [[a11, -a01], [-conj(a01), a00]].
    const double scale = p.form == Form::Log ? 1.0 / det : 0.5 / std::sqrt(det);
    r.F = p.form == Form::Log ? std::log(det) : std::sqrt(det);
    r.g00 = A.a11 * scale;
    r.g11 = A.a00 * scale;
    r.g10 = -std::conj(A.a01) * scale;
    return r;
}

/// Target value of F: h^{1/k} (Root) or log h (Log).
inline double operator_target(const OperatorParams& p) {
    return p.form == Form::Log ? std::log(p.rhs_level) : std::pow(p.rhs_level, 1.0 / p.k);
}

/// Per-node residual F(A) - target, with admissibility flags.
struct GridResidual {
    Eigen::VectorXd residual;
    std::vector<Operator2> ops;
    std::size_t inadmissible = 0;
    std::int64_t first_inadmissible = -1;   ///< linear index
};

inline GridResidual evaluate_grid(const GridField& field, const OperatorParams& p) {
    const auto& grid = *field.grid;
    const auto count = grid.active_count();
    GridResidual r;
    r.residual.resize(static_cast<Eigen::Index>(count));
    r.ops.resize(count);
    const double target = operator_target(p);
    for (std::size_t i = 0; i < count; ++i) {
        const auto lin = grid.active_nodes()[i];
        const auto op = operator2(hessian_from_stencil(gather(field, lin), grid.h()), p);
        r.ops[i] = op;
        if (!op.admissible) {
            if (r.inadmissible++ == 0) {
                r.first_inadmissible = lin;
            }
            r.residual(static_cast<Eigen::Index>(i)) = std::numeric_limits<double>::quiet_NaN();
        } else {
            r.residual(static_cast<Eigen::Index>(i)) = op.F - target;
        }
    }
    return r;
}

/// Residual F(A) - target at every active node; throws InadmissiblePoint (with
/// the node's coordinates as mu context) when any node is inadmissible.
inline Eigen::VectorXd assemble_residual(const GridField& field, const OperatorParams& p) {
    p.validate();
    if (p.n != 2) {
        throw InvalidArgument("assemble_residual: the grid path is fixed to n = 2");
    }
    auto r = evaluate_grid(field, p);
    if (r.inadmissible > 0) {
        throw InadmissiblePoint("assemble_residual: inadmissible node", as_std(field.grid->coords(r.first_inadmissible)));
    }
    return r.residual;
}

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

/// Jacobian dF/du at the active nodes: tr(G dA) contracted with the stencil weights.
/// Exactly zero coefficients (all mixed terms for k = 1) are skipped.
inline SparseRowMatrix assemble_jacobian(const GridField& field, const std::vector<Operator2>& ops) {
    const auto& grid = *field.grid;
    const auto count = static_cast<std::int64_t>(grid.active_count());
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    SparseRowMatrix J(count, count);
    Eigen::VectorXi reserve(count);
    for (std::int64_t i = 0; i < count; ++i) {
        const auto& op = ops[static_cast<std::size_t>(i)];
        reserve(i) = op.g10 == cdouble(0.0, 0.0) ? 9 : kStencilSize;
    }
    J.reserve(reserve);
    const auto& off = grid.offsets();
    std::array<double, kStencilSize> w{};
    for (std::int64_t i = 0; i < count; ++i) {
        const auto& op = ops[static_cast<std::size_t>(i)];
        // dF = g00 dA00 + g11 dA11 + 2 Re(g10 dA01).
        const double axis_coef[kGridDim] = {0.25 * op.g00, 0.25 * op.g00, 0.25 * op.g11, 0.25 * op.g11};
        const double mixed_coef[4] = {0.5 * op.g10.real(), 0.5 * op.g10.real(), -0.5 * op.g10.imag(),
                                      0.5 * op.g10.imag()};
        w.fill(0.0);
        for (int a = 0; a < kGridDim; ++a) {
            const double c = axis_coef[a] * inv_h2;
            w[0] -= 2.0 * c;
            w[static_cast<std::size_t>(1 + 2 * a)] += c;
            w[static_cast<std::size_t>(2 + 2 * a)] += c;
        }
        for (std::size_t q = 0; q < 4; ++q) {
            const double c = mixed_coef[q] * 0.25 * inv_h2;
            const std::size_t base = 9 + 4 * q;
            w[base] += c;
            w[base + 1] -= c;
            w[base + 2] -= c;
            w[base + 3] += c;
        }
        const auto lin = grid.active_nodes()[static_cast<std::size_t>(i)];
        for (std::size_t s = 0; s < kStencilSize; ++s) {
            if (w[s] == 0.0) {
                continue;
            }
            const auto c = grid.code(lin + off[s]);
            if (c >= 0) {
                J.insert(i, c) = w[s];
            }
        }
    }
    J.makeCompressed();
    return J;
}

struct GridSolverOptions {
    double tolerance = 1e-9;
    int max_iterations = 60;
    int max_halvings = 40;
    double linear_tolerance = 1e-12;
    int max_linear_iterations = 20000;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;
    std::vector<int> linear_iterations;
    std::vector<double> linear_errors;
    std::vector<int> halvings;
    bool all_iterates_admissible = true;
    std::size_t active_nodes = 0;
    std::size_t dirichlet_nodes = 0;
};

struct GridSolution {
    GridField field;
    SolveReport report;
};

/// Damped Newton with BiCGSTAB (diagonal preconditioner) linear solves.
inline GridSolution solve_grid(const GridField& init, const OperatorParams& p, const GridSolverOptions& options = {}) {
    p.validate();
    if (p.n != 2) {
        throw InvalidArgument("solve_grid: the grid path is fixed to n = 2");
    }
    if (!(p.rhs_level > 0.0)) {
        throw InvalidArgument("solve_grid: rhs_level must be > 0");
    }
    GridSolution out{init, {}};
    auto& report = out.report;
    report.active_nodes = init.grid->active_count();
    report.dirichlet_nodes = init.grid->dirichlet_count();

    auto current = evaluate_grid(out.field, p);
    if (current.inadmissible > 0) {
        throw InvalidArgument("solve_grid: init is not admissible at every active node");
    }
    double norm = current.residual.lpNorm<Eigen::Infinity>();
    report.residual_history.push_back(norm);
    const double target = options.tolerance * (1.0 + p.rhs_level);

    while (norm > target) {
        if (report.iterations >= options.max_iterations) {
            throw SolverFailure("solve_grid: no convergence within the iteration limit", report.residual_history);
        }
        const auto J = assemble_jacobian(out.field, current.ops);
        Eigen::BiCGSTAB<SparseRowMatrix, Eigen::DiagonalPreconditioner<double>> solver;
        solver.setTolerance(options.linear_tolerance);
        solver.setMaxIterations(options.max_linear_iterations);
        solver.compute(J);
        const Eigen::VectorXd step = solver.solve(-current.residual);
        report.linear_iterations.push_back(static_cast<int>(solver.iterations()));
        report.linear_errors.push_back(solver.error());
        if (solver.info() != Eigen::Success || !step.allFinite()) {
            throw NumericalError("solve_grid: linear solver stagnated (relative residual " +
                                 std::to_string(solver.error()) + ")");
        }

        double lambda = 1.0;
        bool accepted = false;
        int halvings = 0;
        for (; halvings <= options.max_halvings; ++halvings, lambda *= 0.5) {
            GridField trial = out.field;
            trial.active += lambda * step;
            auto eval = evaluate_grid(trial, p);
            if (eval.inadmissible > 0) {
                continue;
            }
            const double trial_norm = eval.residual.lpNorm<Eigen::Infinity>();
            if (trial_norm < norm) {
                out.field = std::move(trial);
                current = std::move(eval);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        report.halvings.push_back(halvings);
        if (!accepted) {
            throw SolverFailure("solve_grid: line search stagnated after 40 halvings", report.residual_history);
        }
        ++report.iterations;
        report.residual_history.push_back(norm);
    }
    report.converged = true;
    return out;
}

/// Reference solve of the k = 1 problem (1/4) Delta_h u = h with the same Dirichlet
/// data, assembled independently as the 9-point Laplacian and solved by conjugate
/// gradients on the SPD matrix -Delta_h.
struct ReferenceSolve {
    Eigen::VectorXd active;
    int iterations = 0;
    double error = 0.0;
};

inline ReferenceSolve reference_poisson(const Grid4& grid, const Eigen::VectorXd& dirichlet, double rhs,
                                        double tolerance = 1e-14) {
    const auto count = static_cast<std::int64_t>(grid.active_count());
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t> A(count, count);
    A.reserve(Eigen::VectorXi::Constant(count, 9));
    Eigen::VectorXd b = Eigen::VectorXd::Constant(count, -4.0 * rhs);
    for (std::int64_t i = 0; i < count; ++i) {
        const auto lin = grid.active_nodes()[static_cast<std::size_t>(i)];
        A.insert(i, i) = 2.0 * kGridDim * inv_h2;
        for (int a = 0; a < 2 * kGridDim; ++a) {
            const auto c = grid.code(lin + grid.offsets()[static_cast<std::size_t>(1 + a)]);
            if (c >= 0) {
                A.insert(i, c) = -inv_h2;
            } else {
                b(i) += inv_h2 * dirichlet(-2 - c);
            }
        }
    }
    A.makeCompressed();
    Eigen::ConjugateGradient<decltype(A), Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tolerance);
    cg.setMaxIterations(100000);
    cg.compute(A);
    ReferenceSolve r;
    r.active = cg.solve(b);
    r.iterations = static_cast<int>(cg.iterations());
    r.error = cg.error();
    return r;
}

/// Discrete harmonic function on the active nodes of `grid` with the given
/// Dirichlet values (used for majorants).
inline ReferenceSolve discrete_harmonic(const Grid4& grid, const Eigen::VectorXd& dirichlet, double tolerance = 1e-13) {
    return reference_poisson(grid, dirichlet, 0.0, tolerance);
}

/// c|z|^2 + Re(exp(z1 + z2/2)) with S_k(mu) = eps: c = eps/2 (k = 1) or sqrt(eps) (k = 2).
inline std::function<double(const Eigen::VectorXd&)> manufactured_solution(int k, double eps) {
    if (k != 1 && k != 2) {
        throw InvalidArgument("manufactured_solution: k must be 1 or 2");
    }
    const double c = k == 1 ? 0.5 * eps : std::sqrt(eps);
    return [c](const Eigen::VectorXd& x) {
        return c * x.squaredNorm() + std::exp(x(0) + 0.5 * x(2)) * std::cos(x(1) + 0.5 * x(3));
    };
}

/// Ball subsolution used as Dirichlet data and default init on the grid:
/// -|z|^{-2} + a|z|^2 + b for k = 1, log|z|^2 + a|z|^2 + b for k = 2.
inline Subsolution grid_ball_subsolution(int k, double R, double boundary_constant) {
    OperatorParams unit = default_params(2, k, 1.0);
    return k == 1 ? ball_subsolution(R, 2.0, unit, boundary_constant)
                  : ball_log_subsolution(R, unit, boundary_constant);
}

/// delta (|z|^2 - R^2)(|z|^2 - eps^2): vanishes on both boundary spheres, used to
/// build a second admissible init for init-independence checks.
inline std::function<double(const Eigen::VectorXd&)> shell_perturbation(double R, double eps, double delta) {
    return [=](const Eigen::VectorXd& x) {
        const double s = x.squaredNorm();
        return delta * (s - R * R) * (s - eps * eps);
    };
}

}  // namespace hessgreen
