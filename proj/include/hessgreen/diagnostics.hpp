#pragma once

/// Post-processing of converged solutions: sphere suprema of |u|, |grad u| and
/// the complex Hessian, log-log rate fits, sandwich and monotonicity checks, the
/// scaling diagnostic and the discrete harmonic majorant.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgreen/error.hpp"
#include "hessgreen/green_limit.hpp"
#include "hessgreen/grid_solver.hpp"
#include "hessgreen/radial_solver.hpp"

namespace hessgreen {

enum class Quantity { Value, Gradient, HessianNorm };

inline const char* to_string(Quantity q) {
    switch (q) {
        case Quantity::Value: return "value";
        case Quantity::Gradient: return "gradient";
        case Quantity::HessianNorm: return "hessian";
    }
    return "?";
}

struct ProfileSample {
    double r = 0.0;
    double value = 0.0;
};

inline std::vector<double> log_spaced(double a, double b, int count) {
    if (!(a > 0.0) || !(b > a) || count < 2) {
        throw InvalidArgument("log_spaced: need 0 < a < b and count >= 2");
    }
    std::vector<double> r(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        r[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (count - 1));
    }
    return r;
}

/// Sphere suprema for a radial profile phi(|z|^2): |phi|, |d phi/dr| = 2r|phi'|,
/// and max(|phi'|, |phi' + s phi''|), the largest complex-Hessian entry.
inline std::vector<ProfileSample> sphere_profile(const RadialSolution& sol, const std::vector<double>& radii,
                                                 Quantity q) {
    std::vector<ProfileSample> out;
    const double r_min = std::sqrt(sol.s_min());
    const double r_max = std::sqrt(sol.s_max());
    for (double r : radii) {
        if (!(r > r_min) || !(r < r_max)) {
            throw InvalidArgument("sphere_profile: radius outside the annulus");
        }
        const auto pt = sol.eval(r * r);
        double v = 0.0;
        switch (q) {
            case Quantity::Value: v = std::abs(pt.phi); break;
            case Quantity::Gradient: v = 2.0 * r * std::abs(pt.dphi); break;
            case Quantity::HessianNorm: v = std::max(std::abs(pt.dphi), std::abs(pt.dphi + pt.s * pt.d2phi)); break;
        }
        out.push_back({r, v});
    }
    return out;
}

inline double radical_inverse(unsigned index, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * (index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

/// Quasi-uniform unit vectors in R^4 from a Halton sequence in bases 2, 3, 5,
/// mapped by z1 = sqrt(u) e^{2 pi i v}, z2 = sqrt(1-u) e^{2 pi i w}.
inline std::vector<Eigen::VectorXd> sphere_directions(int count) {
    std::vector<Eigen::VectorXd> dirs;
    for (int i = 1; i <= count; ++i) {
        const auto ui = static_cast<unsigned>(i);
        const double u = radical_inverse(ui, 2);
        const double v = 2.0 * std::numbers::pi * radical_inverse(ui, 3);
        const double w = 2.0 * std::numbers::pi * radical_inverse(ui, 5);
        Eigen::VectorXd x(kGridDim);
        x << std::sqrt(u) * std::cos(v), std::sqrt(u) * std::sin(v), std::sqrt(1.0 - u) * std::cos(w),
            std::sqrt(1.0 - u) * std::sin(w);
        dirs.push_back(x);
    }
    return dirs;
}

/// Multilinear interpolation of a grid field; every corner must be active or Dirichlet.
inline double interpolate(const GridField& field, const Eigen::VectorXd& x) {
    const auto& g = *field.grid;
    std::array<int, kGridDim> base{};
    std::array<double, kGridDim> frac{};
    for (int a = 0; a < kGridDim; ++a) {
        const double u = (x(a) - g.lower()) / g.h();
        int i = static_cast<int>(std::floor(u));
        i = std::clamp(i, 0, g.nodes_per_axis() - 2);
        base[static_cast<std::size_t>(a)] = i;
        frac[static_cast<std::size_t>(a)] = u - i;
    }
    double v = 0.0;
    for (int corner = 0; corner < 16; ++corner) {
        std::array<int, kGridDim> idx = base;
        double w = 1.0;
        for (int a = 0; a < kGridDim; ++a) {
            const auto aa = static_cast<std::size_t>(a);
            if (corner & (1 << a)) {
                idx[aa] += 1;
                w *= frac[aa];
            } else {
                w *= 1.0 - frac[aa];
            }
        }
        if (w != 0.0) {
            v += w * field.at(g.linear(idx));
        }
    }
    return v;
}

/// Sphere suprema on a grid: maxima over 100 quasi-uniform points of |u|, the
/// central-difference gradient norm, or the largest entry of the complex Hessian
/// (25-point formula applied to interpolated values), all with step h.
inline std::vector<ProfileSample> sphere_profile(const GridField& field, const DomainSpec& domain,
                                                 const std::vector<double>& radii, Quantity q,
                                                 int directions = 100) {
    const auto& g = *field.grid;
    const double h = g.h();
    const auto dirs = sphere_directions(directions);
    std::vector<ProfileSample> out;
    for (double r : radii) {
        const double reach = q == Quantity::Value ? 0.0 : h;
        const bool inside = std::all_of(dirs.begin(), dirs.end(), [&](const Eigen::VectorXd& d) {
            return domain.contains((r + reach) * d);
        });
        if (!(r - reach > g.eps()) || !inside) {
            throw InvalidArgument("sphere_profile: radius outside the annulus");
        }
        std::size_t hits = 0;
        for (std::int64_t lin : g.active_nodes()) {
            if (std::abs(g.coords(lin).norm() - r) <= h) {
                ++hits;
            }
        }
        if (hits < 20) {
            throw InvalidArgument("sphere_profile: fewer than 20 active nodes near the sphere");
        }
        double best = 0.0;
        for (const auto& d : dirs) {
            const Eigen::VectorXd x = r * d;
            double v = 0.0;
            if (q == Quantity::Value) {
                v = std::abs(interpolate(field, x));
            } else if (q == Quantity::Gradient) {
                double sq = 0.0;
                for (int a = 0; a < kGridDim; ++a) {
                    const Eigen::VectorXd e = h * Eigen::VectorXd::Unit(kGridDim, a);
                    const double da = (interpolate(field, x + e) - interpolate(field, x - e)) / (2.0 * h);
                    sq += da * da;
                }
                v = std::sqrt(sq);
            } else {
                std::array<double, kStencilSize> vals{};
                std::array<Eigen::VectorXd, kStencilSize> pts;
                std::size_t i = 0;
                pts[i++] = Eigen::VectorXd::Zero(kGridDim);
                for (int a = 0; a < kGridDim; ++a) {
                    pts[i++] = Eigen::VectorXd::Unit(kGridDim, a);
                    pts[i++] = -Eigen::VectorXd::Unit(kGridDim, a);
                }
                for (const auto& pair : kMixedPairs) {
                    const Eigen::VectorXd ea = Eigen::VectorXd::Unit(kGridDim, pair[0]);
                    const Eigen::VectorXd eb = Eigen::VectorXd::Unit(kGridDim, pair[1]);
                    pts[i++] = ea + eb;
                    pts[i++] = ea - eb;
                    pts[i++] = -ea + eb;
                    pts[i++] = -ea - eb;
                }
                for (std::size_t s = 0; s < kStencilSize; ++s) {
                    vals[s] = interpolate(field, x + h * pts[s]);
                }
                const auto H = hessian_from_stencil(vals, h);
                v = std::max({std::abs(H.a00), std::abs(H.a11), std::abs(H.a01)});
            }
            best = std::max(best, v);
        }
        out.push_back({r, best});
    }
    return out;
}

struct RateFit {
    double r_min = 0.0;
    double r_max = 0.0;
    std::vector<ProfileSample> samples;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (log r, log value).
inline RateFit fit_rate(const std::vector<ProfileSample>& samples) {
    if (samples.size() < 6) {
        throw InvalidArgument("fit_rate: need at least 6 samples");
    }
    const auto count = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd A(count, 2);
    Eigen::VectorXd b(count);
    RateFit fit;
    fit.samples = samples;
    fit.r_min = std::numeric_limits<double>::infinity();
    fit.r_max = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        if (!(s.value > 0.0) || !(s.r > 0.0)) {
            throw InvalidArgument("fit_rate: values and radii must be > 0");
        }
        A(i, 0) = std::log(s.r);
        A(i, 1) = 1.0;
        b(i) = std::log(s.value);
        fit.r_min = std::min(fit.r_min, s.r);
        fit.r_max = std::max(fit.r_max, s.r);
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
    fit.slope = coef(0);
    fit.intercept = coef(1);
    const double mean = b.mean();
    const double total = (b.array() - mean).square().sum();
    const double resid = (A * coef - b).squaredNorm();
    fit.r_squared = total > 0.0 ? std::clamp(1.0 - resid / total, 0.0, 1.0) : 1.0;
    return fit;
}

struct SandwichResult {
    double max_violation = 0.0;     ///< max over samples of max(lower - u, u - upper)
    double lower_violation = 0.0;   ///< max(lower - u)
    double upper_violation = 0.0;   ///< max(u - upper)
    std::size_t samples = 0;
};

inline SandwichResult sandwich_check(const Eigen::VectorXd& solution, const Eigen::VectorXd& lower,
                                     const Eigen::VectorXd& upper) {
    if (solution.size() != lower.size() || solution.size() != upper.size()) {
        throw InvalidArgument("sandwich_check: size mismatch");
    }
    SandwichResult r;
    r.samples = static_cast<std::size_t>(solution.size());
    r.lower_violation = -std::numeric_limits<double>::infinity();
    r.upper_violation = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < solution.size(); ++i) {
        r.lower_violation = std::max(r.lower_violation, lower(i) - solution(i));
        r.upper_violation = std::max(r.upper_violation, solution(i) - upper(i));
    }
    if (r.samples == 0) {
        r.lower_violation = r.upper_violation = 0.0;
    }
    r.max_violation = std::max(r.lower_violation, r.upper_violation);
    return r;
}

/// Radial sandwich on the mesh nodes: lower subsolution, upper Phi + C0.
inline SandwichResult sandwich_check(const RadialSolution& sol, const RadialProfileFn& lower,
                                     const RadialProfileFn& upper) {
    const auto count = static_cast<Eigen::Index>(sol.t.size());
    Eigen::VectorXd u(count), lo(count), up(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double s = std::exp(sol.t[ii]);
        u(i) = sol.phi[ii];
        lo(i) = lower(s).phi;
        up(i) = upper(s).phi;
    }
    return sandwich_check(u, lo, up);
}

struct MonotonicityResult {
    bool ok = true;
    double worst_gap = 0.0;   ///< min over j and probes of u^{eps_{j+1}} - u^{eps_j}
};

/// runs[j][i]: value of the run with the j-th largest eps at probe i.
inline MonotonicityResult monotonicity_check(const std::vector<std::vector<double>>& runs, double slack) {
    MonotonicityResult r;
    if (runs.size() < 2) {
        return r;
    }
    r.worst_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < runs.size(); ++j) {
        if (runs[j].size() != runs[j + 1].size()) {
            throw InvalidArgument("monotonicity_check: runs must share probes");
        }
        for (std::size_t i = 0; i < runs[j].size(); ++i) {
            const double gap = runs[j + 1][i] - runs[j][i];
            if (!std::isfinite(gap)) {
                r.ok = false;
                continue;
            }
            r.worst_gap = std::min(r.worst_gap, gap);
        }
    }
    if (!std::isfinite(r.worst_gap)) {
        r.worst_gap = 0.0;
    }
    r.ok = r.ok && r.worst_gap >= -slack;
    return r;
}

/// sup over |z| in [1, 2] of |eps^gamma u^eps(eps z)| for each solved level with 2 eps < R.
struct ScalingDiagnostic {
    std::vector<double> eps;
    std::vector<double> sup;
    double bound = 0.0;   ///< 2x the value at the largest eps
    bool bounded = true;
};

inline ScalingDiagnostic scaling_diagnostic(const GreenLimitReport& report, double gamma, int samples = 33) {
    ScalingDiagnostic d;
    for (const auto& level : report.levels) {
        if (!level.ok || !level.solution || !(2.0 * level.eps < report.config.R)) {
            continue;
        }
        double best = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double z = 1.0 + static_cast<double>(i) / (samples - 1);
            const double r = level.eps * z;
            best = std::max(best, std::pow(level.eps, gamma) * std::abs(level.solution->value_at_radius(r)));
        }
        d.eps.push_back(level.eps);
        d.sup.push_back(best);
    }
    if (!d.sup.empty()) {
        d.bound = 2.0 * d.sup.front();
        d.bounded = std::all_of(d.sup.begin(), d.sup.end(), [&](double v) { return v <= d.bound; });
    }
    return d;
}

/// Values at the active nodes of `dst` from a field on a grid of the same geometry.
inline Eigen::VectorXd restrict_to(const GridField& src, const Grid4& dst) {
    if (src.grid->h() != dst.h() || src.grid->nodes_per_axis() != dst.nodes_per_axis()) {
        throw InvalidArgument("restrict_to: grids differ in geometry");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(dst.active_count()));
    for (std::size_t i = 0; i < dst.active_count(); ++i) {
        v(static_cast<Eigen::Index>(i)) = src.at(dst.active_nodes()[i]);
    }
    return v;
}

/// Discrete harmonic majorant on B_R minus the closed r0-ball: Dirichlet value
/// Phi(r0^2) + C0 inside the r0-ball and the outer boundary data elsewhere.
struct HarmonicMajorant {
    std::shared_ptr<const Grid4> grid;
    GridField field;
    int iterations = 0;
};

inline HarmonicMajorant harmonic_majorant(const DomainSpec& domain, double h, double r0, double inner_value,
                                          const std::function<double(const Eigen::VectorXd&)>& outer) {
    HarmonicMajorant m{std::make_shared<const Grid4>(Grid4::build(domain, r0, h)), {}, 0};
    const double r02 = r0 * r0;
    const auto dirichlet = sample_nodes(*m.grid, m.grid->dirichlet_nodes(), [&](const Eigen::VectorXd& x) {
        return x.squaredNorm() <= r02 ? inner_value : outer(x);
    });
    auto solve = discrete_harmonic(*m.grid, dirichlet);
    m.field = GridField{m.grid.get(), std::move(solve.active), dirichlet};
    m.iterations = solve.iterations;
    return m;
}

}  // namespace hessgreen
