#pragma once

/// The eps -> 0 limit of radial approximating problems: solve on B_R \ B_eps
/// for a decreasing eps schedule, check monotonicity and the sandwich bounds,
/// and extrapolate the limit at probe radii.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgreen/error.hpp"
#include "hessgreen/fundamental.hpp"
#include "hessgreen/radial_solver.hpp"
#include "hessgreen/subsolution.hpp"

namespace hessgreen {

enum class InnerData { Subsolution, ExactHomogeneous };

inline const char* to_string(InnerData d) {
    return d == InnerData::Subsolution ? "subsolution" : "exact-homogeneous";
}

struct GreenLimitConfig {
    OperatorParams params;                ///< n, k, form; rhs_level is set per eps
    SingularProfile profile;
    double R = 1.0;
    double boundary_constant = 0.0;
    InnerData inner = InnerData::Subsolution;
    std::vector<double> eps_schedule;
    std::vector<double> probe_radii;
    int M = 512;
    int extrapolation_terms = 2;
    std::optional<double> exponent;       ///< eps power of the leading correction
    double monotonicity_slack = 1e-8;
    double sandwich_tolerance = 1e-6;
    RadialSolverOptions solver;

    void validate() const {
        params.validate();
        if (eps_schedule.empty()) {
            throw InvalidArgument("green_limit: empty eps schedule");
        }
        for (std::size_t j = 0; j < eps_schedule.size(); ++j) {
            if (!(eps_schedule[j] > 0.0) || !(eps_schedule[j] < R)) {
                throw InvalidArgument("green_limit: every eps must lie in (0, R)");
            }
            if (j > 0 && !(eps_schedule[j] < eps_schedule[j - 1])) {
                throw InvalidArgument("green_limit: eps schedule must be strictly decreasing");
            }
        }
        for (double r : probe_radii) {
            if (!(r > eps_schedule.front()) || !(r < R)) {
                throw InvalidArgument("green_limit: probe radii must lie in (max eps, R)");
            }
        }
        if (extrapolation_terms < 0) {
            throw InvalidArgument("green_limit: extrapolation_terms must be >= 0");
        }
    }
};

/// Leading eps power of u^eps - u: 1/(k-1) on profiles with m = 0 (the degenerate
/// branch and log s), where the equation gives m ~ eps^{1/(k-1)}; 1 otherwise.
inline double default_limit_exponent(const OperatorParams& p, const SingularProfile& profile) {
    if (p.k == 1) {
        return 1.0;
    }
    const bool degenerate = profile.kind == SingularProfile::Kind::Log ||
                            std::abs(profile.gamma - (2.0 * p.n - 4.0)) <= 1e-12 * profile.gamma;
    return degenerate ? 1.0 / (p.k - 1) : 1.0;
}

/// L from u_j = L + sum_{i=1}^{terms} a_i eps_j^{i p} on the given levels
/// (exactly terms + 1 of them).
inline double richardson_limit(const std::vector<double>& eps, const std::vector<double>& values, double p,
                               int terms) {
    const auto rows = static_cast<Eigen::Index>(values.size());
    if (rows != terms + 1 || eps.size() != values.size()) {
        throw InvalidArgument("richardson_limit: need exactly terms + 1 levels");
    }
    Eigen::MatrixXd A(rows, rows);
    Eigen::VectorXd b(rows);
    for (Eigen::Index j = 0; j < rows; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        A(j, 0) = 1.0;
        for (Eigen::Index i = 1; i < rows; ++i) {
            A(j, i) = std::pow(eps[jj], static_cast<double>(i) * p);
        }
        b(j) = values[jj];
    }
    return A.fullPivLu().solve(b)(0);
}

struct GreenLevel {
    double eps = 0.0;
    bool ok = false;
    std::string failure;
    double inner_value = 0.0;
    double outer_value = 0.0;
    int newton_iters = 0;
    double residual_norm = 0.0;
    double sandwich_violation = 0.0;   ///< max over nodes of max(lower - u, u - upper) / (1 + |u|)
    double C0 = 0.0;
    std::optional<RadialSolution> solution;
};

struct GreenLimitReport {
    GreenLimitConfig config;
    double exponent = 1.0;
    std::vector<GreenLevel> levels;
    /// values[i][j]: u^{eps_j}(probe_i); NaN where the solve failed.
    std::vector<std::vector<double>> values;
    /// cauchy[i][j] = |u^{eps_{j+1}} - u^{eps_j}| at probe i.
    std::vector<std::vector<double>> cauchy;
    std::vector<double> extrapolated;
    /// Closed-form g(r) = Phi(r^2) - Phi(R^2) + boundary constant (exact-homogeneous data only).
    std::vector<double> reference;
    bool all_solved = false;
    bool monotonicity_ok = false;
    double worst_monotonicity_gap = 0.0;   ///< min over probes and j of u^{eps_{j+1}} - u^{eps_j}
    bool sandwich_ok = false;
    double worst_sandwich_violation = 0.0;
};

/// Boundary data, starting profile and lower barrier for one eps level.
struct GreenLevelSetup {
    RadialProblem problem;
    RadialProfileFn lower;
};

inline GreenLevelSetup green_level_setup(const GreenLimitConfig& cfg, double eps) {
    const double s_in = eps * eps;
    const double s_out = cfg.R * cfg.R;
    double inner = 0.0;
    std::optional<Subsolution> sub;
    if (cfg.inner == InnerData::Subsolution) {
        OperatorParams unit = cfg.params;
        unit.rhs_level = 1.0;
        sub = cfg.profile.kind == SingularProfile::Kind::Log
                  ? ball_log_subsolution(cfg.R, unit, cfg.boundary_constant)
                  : ball_subsolution(cfg.R, cfg.profile.gamma, unit, cfg.boundary_constant);
        inner = sub->radial(s_in).phi;
    } else {
        inner = cfg.profile.eval(s_in).phi - cfg.profile.eval(s_out).phi + cfg.boundary_constant;
    }
    GreenLevelSetup setup{make_radial_problem(cfg.params, cfg.profile, cfg.R, eps, cfg.M, inner, cfg.boundary_constant),
                          {}};
    if (sub) {
        const Subsolution u = *sub;
        setup.lower = [u](double s) { return u.radial(s); };
    } else {
        setup.lower = matched_profile(setup.problem);
    }
    return setup;
}

inline GreenLimitReport green_limit(const GreenLimitConfig& cfg) {
    cfg.validate();
    GreenLimitReport report;
    report.config = cfg;
    report.exponent = cfg.exponent.value_or(default_limit_exponent(cfg.params, cfg.profile));
    const std::size_t levels = cfg.eps_schedule.size();
    const std::size_t probes = cfg.probe_radii.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.values.assign(probes, std::vector<double>(levels, nan));

    for (std::size_t j = 0; j < levels; ++j) {
        GreenLevel level;
        level.eps = cfg.eps_schedule[j];
        try {
            const auto setup = green_level_setup(cfg, level.eps);
            level.inner_value = setup.problem.inner_value;
            level.outer_value = setup.problem.outer_value;
            auto sol = solve_radial(setup.problem, setup.lower, cfg.solver);
            level.newton_iters = sol.newton_iters;
            level.residual_norm = sol.residual_norm;

            const double s_in = level.eps * level.eps;
            const double s_out = cfg.R * cfg.R;
            level.C0 = std::max(std::abs(level.inner_value - cfg.profile.eval(s_in).phi),
                                std::abs(level.outer_value - cfg.profile.eval(s_out).phi));
            double worst = 0.0;
            for (std::size_t q = 0; q < sol.t.size(); ++q) {
                const double s = std::exp(sol.t[q]);
                const double u = sol.phi[q];
                const double lower = setup.lower(s).phi;
                const double upper = cfg.profile.eval(s).phi + level.C0;
                worst = std::max(worst, std::max(lower - u, u - upper) / (1.0 + std::abs(u)));
            }
            level.sandwich_violation = worst;
            for (std::size_t i = 0; i < probes; ++i) {
                report.values[i][j] = sol.value_at_radius(cfg.probe_radii[i]);
            }
            level.ok = sol.admissible;
            if (!sol.admissible) {
                level.failure = "solution not admissible at every node";
            }
            level.solution = std::move(sol);
        } catch (const std::exception& e) {
            level.ok = false;
            level.failure = e.what();
        }
        report.levels.push_back(std::move(level));
    }

    report.all_solved = std::all_of(report.levels.begin(), report.levels.end(), [](const auto& l) { return l.ok; });
    report.sandwich_ok = report.all_solved;
    for (const auto& l : report.levels) {
        if (l.ok) {
            report.worst_sandwich_violation = std::max(report.worst_sandwich_violation, l.sandwich_violation);
        }
    }
    report.sandwich_ok = report.sandwich_ok && report.worst_sandwich_violation <= cfg.sandwich_tolerance;

    report.monotonicity_ok = report.all_solved;
    report.worst_monotonicity_gap = std::numeric_limits<double>::infinity();
    report.cauchy.assign(probes, {});
    for (std::size_t i = 0; i < probes; ++i) {
        for (std::size_t j = 0; j + 1 < levels; ++j) {
            const double gap = report.values[i][j + 1] - report.values[i][j];
            report.cauchy[i].push_back(std::abs(gap));
            if (std::isfinite(gap)) {
                report.worst_monotonicity_gap = std::min(report.worst_monotonicity_gap, gap);
            }
        }
    }
    if (levels < 2) {
        report.worst_monotonicity_gap = 0.0;
    }
    report.monotonicity_ok = report.monotonicity_ok && report.worst_monotonicity_gap >= -cfg.monotonicity_slack;

    const auto terms = static_cast<std::size_t>(std::min<int>(cfg.extrapolation_terms, static_cast<int>(levels) - 1));
    for (std::size_t i = 0; i < probes; ++i) {
        if (!report.all_solved) {
            report.extrapolated.push_back(nan);
            continue;
        }
        std::vector<double> eps(cfg.eps_schedule.end() - static_cast<std::ptrdiff_t>(terms + 1), cfg.eps_schedule.end());
        std::vector<double> vals(report.values[i].end() - static_cast<std::ptrdiff_t>(terms + 1), report.values[i].end());
        report.extrapolated.push_back(richardson_limit(eps, vals, report.exponent, static_cast<int>(terms)));
    }
    if (cfg.inner == InnerData::ExactHomogeneous) {
        const double phiR = cfg.profile.eval(cfg.R * cfg.R).phi;
        for (double r : cfg.probe_radii) {
            report.reference.push_back(cfg.profile.eval(r * r).phi - phiR + cfg.boundary_constant);
        }
    }
    return report;
}

}  // namespace hessgreen
