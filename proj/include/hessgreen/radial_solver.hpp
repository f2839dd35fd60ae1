#pragma once

/// Radial punctured Dirichlet problems S_k(mu[u]) = h on B_R \ B_eps, u = u(|z|^2).
///
/// With s = |z|^2, t = log s and the flux w = s^{n-1} phi'(s), the equation
///   (1/k) C(n-1,k-1) m^{k-1} ((n-k) m + k(n-1) phi') = h,   m = (n-1) phi' + s phi''
/// is algebraic in m once phi' is known, and (s^{n-1} phi')' = s^{n-2} m. So
///   dw/dt = s^{n-1} m(phi'),   dphi/dt = s^{2-n} w,
/// with m taken on the admissible root. The two-point problem is solved by Newton
/// on the outer flux, integrating inward with the variational equation. m never has
/// to be recovered from differences of phi, which matters near the puncture where
/// it is 15 orders of magnitude below the individual terms.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "hessgreen/error.hpp"
#include "hessgreen/finite_difference.hpp"
#include "hessgreen/fundamental.hpp"
#include "hessgreen/hessian_operator.hpp"
#include "hessgreen/subsolution.hpp"

namespace hessgreen {

/// Uniform mesh in t = log s on [log eps^2, log R^2] with M intervals.
inline std::vector<double> log_mesh(double eps, double R, int M) {
    if (!(eps > 0.0) || !(R > eps)) {
        throw InvalidArgument("log_mesh: need 0 < eps < R");
    }
    if (M < 1) {
        throw InvalidArgument("log_mesh: need M >= 1");
    }
    const double t0 = 2.0 * std::log(eps);
    const double t1 = 2.0 * std::log(R);
    std::vector<double> t(static_cast<std::size_t>(M) + 1);
    for (int j = 0; j <= M; ++j) {
        t[static_cast<std::size_t>(j)] = t0 + (t1 - t0) * j / M;
    }
    t.back() = t1;
    return t;
}

struct RadialProblem {
    OperatorParams params;          ///< rhs_level is the right-hand side h
    SingularProfile profile;        ///< fixes the weight used for interpolation
    double R = 1.0;
    double eps = 0.5;               ///< puncture radius
    double inner_value = 0.0;       ///< u on |z| = eps
    double outer_value = 0.0;       ///< u on |z| = R
    std::vector<double> mesh;       ///< nodes in t = log s

    int M() const noexcept { return static_cast<int>(mesh.size()) - 1; }

    void validate() const {
        params.validate();
        if (!(eps > 0.0) || !(R > eps)) {
            throw InvalidArgument("RadialProblem: need 0 < eps < R");
        }
        if (!(params.rhs_level > 0.0)) {
            throw InvalidArgument("RadialProblem: rhs_level must be > 0");
        }
        if (!std::isfinite(inner_value) || !std::isfinite(outer_value)) {
            throw InvalidArgument("RadialProblem: boundary values must be finite");
        }
        if (mesh.size() < 33) {
            throw InvalidArgument("RadialProblem: need M >= 32");
        }
        for (std::size_t j = 0; j + 1 < mesh.size(); ++j) {
            if (!(mesh[j + 1] > mesh[j])) {
                throw InvalidArgument("RadialProblem: mesh must be strictly increasing");
            }
        }
        const double tol = 1e-12 * (1.0 + std::abs(std::log(eps)) + std::abs(std::log(R)));
        if (std::abs(mesh.front() - 2.0 * std::log(eps)) > tol || std::abs(mesh.back() - 2.0 * std::log(R)) > tol) {
            throw InvalidArgument("RadialProblem: mesh must span [log eps^2, log R^2]");
        }
    }
};

/// Problem with rhs_level = eps (the approximating problems) and a uniform log mesh.
inline RadialProblem make_radial_problem(const OperatorParams& base, const SingularProfile& profile, double R,
                                         double eps, int M, double inner_value, double outer_value) {
    RadialProblem p;
    p.params = base;
    p.params.rhs_level = eps;
    p.profile = profile;
    p.R = R;
    p.eps = eps;
    p.inner_value = inner_value;
    p.outer_value = outer_value;
    p.mesh = log_mesh(eps, R, M);
    p.validate();
    return p;
}

/// The admissible m solving (1/k) C(n-1,k-1) m^{k-1} ((n-k) m + k(n-1) p) = h, with dm/dp.
struct AdmissibleRoot {
    double m = 0.0;
    double dm_dp = 0.0;
};

/// Empty when no admissible root exists (k = n needs p > 0).
inline std::optional<AdmissibleRoot> admissible_root(double p, int n, int k, double h) {
    if (!std::isfinite(p)) {
        return std::nullopt;
    }
    if (k == 1) {
        return AdmissibleRoot{h / (n - 1) - p, -1.0};
    }
    if (k == n) {
        if (!(p > 0.0)) {
            return std::nullopt;
        }
        const double m = std::pow(h / ((n - 1) * p), 1.0 / (n - 1));
        return AdmissibleRoot{m, -m / ((n - 1) * p)};
    }
    // g(m) = K (n-k) m^{k-1} (m - m0) is increasing on [max(0, m0), inf) and
    // g >= K (n-k) (m - lo)^k there, so the root lies in [lo, lo + (h/(K(n-k)))^{1/k}].
    const double K = binomial(n - 1, k - 1) / k;
    const double m0 = -k * (n - 1) * p / (n - k);
    const double lo0 = std::max(0.0, m0);
    auto g = [&](double m) { return K * (n - k) * std::pow(m, k - 1) * (m - m0); };
    auto dg = [&](double m) {
        return K * (n - k) * ((k - 1) * std::pow(m, k - 2) * (m - m0) + std::pow(m, k - 1));
    };
    double lo = lo0;
    double hi = lo0 + std::pow(h / (K * (n - k)), 1.0 / k);
    double m = hi;
    for (int iter = 0; iter < 200; ++iter) {
        const double gm = g(m) - h;
        if (gm > 0.0) {
            hi = m;
        } else {
            lo = m;
        }
        const double slope = dg(m);
        double next = m - gm / slope;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - m) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next) || hi - lo <= 0.0) {
            m = next;
            break;
        }
        m = next;
    }
    const double dg_dp = K * std::pow(m, k - 1) * k * (n - 1);
    return AdmissibleRoot{m, -dg_dp / dg(m)};
}

/// Whether (m, ..., m, (n-1) p) with m the admissible root is strictly admissible.
/// With S_k = h > 0 fixed, S_j = K_j m^{j-1} ((n-j) m + j(n-1) p) > 0 for j < k
/// follows from m > 0 (k >= 2), and k = n further needs p > 0. Testing these
/// signs directly avoids the cancellation in S_1 when |p| >> h.
inline bool root_admissible(double m, double p, int n, int k) {
    if (!std::isfinite(m) || !std::isfinite(p)) {
        return false;
    }
    if (k >= 2 && !(m > 0.0)) {
        return false;
    }
    return k < n || p > 0.0;
}

struct RadialSolverOptions {
    double tolerance = 1e-10;
    int max_iterations = 100;
    int max_halvings = 40;
    double ode_relative_tolerance = 1e-13;
    double ode_absolute_tolerance = 1e-14;
};

/// Converged radial profile with nodal data and a quintic Hermite evaluator.
class RadialSolution {
public:
    std::vector<double> t;        ///< mesh, t = log s
    std::vector<double> phi;
    std::vector<double> dphi;     ///< d/ds
    std::vector<double> d2phi;
    std::vector<double> flux;     ///< s^{n-1} phi'
    double residual_norm = 0.0;   ///< |inner mismatch| / max(1, |inner value|)
    int newton_iters = 0;
    bool admissible = false;
    std::vector<double> residual_history;
    double weight_rate = 0.0;     ///< c with psi = s^c phi used for interpolation
    int n = 2;

    double s_min() const { return std::exp(t.front()); }
    double s_max() const { return std::exp(t.back()); }

    /// (phi, phi', phi'') at s, interpolating psi = e^{ct} phi with its first two t-derivatives.
    RadialPoint eval(double s) const {
        if (!(s > 0.0)) {
            throw InvalidArgument("RadialSolution::eval: s must be > 0");
        }
        const double tt = std::log(s);
        const double slack = 1e-12 * (1.0 + std::abs(t.front()) + std::abs(t.back()));
        if (tt < t.front() - slack || tt > t.back() + slack) {
            throw InvalidArgument("RadialSolution::eval: s outside the annulus");
        }
        const double tc = std::clamp(tt, t.front(), t.back());
        auto it = std::upper_bound(t.begin(), t.end(), tc);
        std::size_t j = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
        j = std::min(j, t.size() - 2);
        const double h = t[j + 1] - t[j];
        const double u = (tc - t[j]) / h;

        const auto a = psi_data(j);
        const auto b = psi_data(j + 1);
        const double c0 = a[0];
        const double c1 = h * a[1];
        const double c2 = 0.5 * h * h * a[2];
        const double A = b[0] - (c0 + c1 + c2);
        const double B = h * b[1] - (c1 + 2.0 * c2);
        const double C = h * h * b[2] - 2.0 * c2;
        const double c3 = 10.0 * A - 4.0 * B + 0.5 * C;
        const double c4 = -15.0 * A + 7.0 * B - C;
        const double c5 = 6.0 * A - 3.0 * B + 0.5 * C;
        const double psi = c0 + u * (c1 + u * (c2 + u * (c3 + u * (c4 + u * c5))));
        const double psi_u = c1 + u * (2.0 * c2 + u * (3.0 * c3 + u * (4.0 * c4 + u * 5.0 * c5)));
        const double psi_uu = 2.0 * c2 + u * (6.0 * c3 + u * (12.0 * c4 + u * 20.0 * c5));
        const double psi_t = psi_u / h;
        const double psi_tt = psi_uu / (h * h);

        const double c = weight_rate;
        const double decay = std::exp(-c * tc);
        const double phi_v = decay * psi;
        const double phi_t = decay * (psi_t - c * psi);
        const double phi_tt = decay * (psi_tt - 2.0 * c * psi_t + c * c * psi);
        const double sc = std::exp(tc);
        return {sc, phi_v, phi_t / sc, (phi_tt - phi_t) / (sc * sc)};
    }

    double value_at_radius(double r) const { return eval(r * r).phi; }

private:
    /// (psi, psi_t, psi_tt) at node j.
    std::array<double, 3> psi_data(std::size_t j) const {
        const double s = std::exp(t[j]);
        const double phi_t = dphi[j] * s;
        const double phi_tt = d2phi[j] * s * s + phi_t;
        const double c = weight_rate;
        const double grow = std::exp(c * t[j]);
        return {grow * phi[j], grow * (phi_t + c * phi[j]), grow * (phi_tt + 2.0 * c * phi_t + c * c * phi[j])};
    }
};

namespace detail {

/// Outcome of one inward integration from the outer boundary.
struct Shot {
    bool admissible = false;
    double phi_inner = 0.0;
    double dphi_inner = 0.0;            ///< d phi(t_0) / d omega_R
    std::vector<double> omega;           ///< at mesh nodes, ascending t (filled when requested)
    std::vector<double> phi;
};

class RadialFlow {
public:
    using State = std::array<double, 4>;  // omega, d omega/d omega_R, phi, d phi/d omega_R

    RadialFlow(const RadialProblem& problem, double beta) : problem_(problem), beta_(beta) {}

    void operator()(const State& y, State& dy, double t) const {
        const int n = problem_.params.n;
        const double e1 = std::exp((beta_ + n - 1) * t);
        const double p = y[0] / e1;
        const auto root = admissible_root(p, n, problem_.params.k, problem_.params.rhs_level);
        if (!root || !root_admissible(root->m, p, n, problem_.params.k)) {
            throw InadmissiblePoint("radial flow left the admissible cone", {root ? root->m : 0.0, (n - 1) * p});
        }
        const double e2 = std::exp((2 - n - beta_) * t);
        dy[0] = beta_ * y[0] + e1 * root->m;
        dy[1] = (beta_ + root->dm_dp) * y[1];
        dy[2] = e2 * y[0];
        dy[3] = e2 * y[1];
    }

private:
    const RadialProblem& problem_;
    double beta_;
};

inline Shot shoot(const RadialProblem& problem, double beta, double omega_R, const RadialSolverOptions& options,
                  bool keep_nodes) {
    namespace odeint = boost::numeric::odeint;
    using State = RadialFlow::State;
    Shot shot;
    State y{omega_R, 1.0, problem.outer_value, 0.0};
    std::vector<double> times(problem.mesh.rbegin(), problem.mesh.rend());
    std::vector<State> states;
    states.reserve(times.size());
    RadialFlow flow(problem, beta);
    auto stepper = odeint::make_controlled(options.ode_absolute_tolerance, options.ode_relative_tolerance,
                                           odeint::runge_kutta_fehlberg78<State>());
    const double dt0 = -(times.front() - times.back()) / (4.0 * static_cast<double>(times.size()));
    try {
        odeint::integrate_times(stepper, std::ref(flow), y, times.begin(), times.end(), dt0,
                                [&](const State& x, double) { states.push_back(x); });
    } catch (const InadmissiblePoint&) {
        return shot;
    }
    if (states.size() != times.size() || !std::isfinite(states.back()[2])) {
        return shot;
    }
    shot.admissible = true;
    shot.phi_inner = states.back()[2];
    shot.dphi_inner = states.back()[3];
    if (keep_nodes) {
        shot.omega.resize(states.size());
        shot.phi.resize(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            const std::size_t j = states.size() - 1 - i;
            shot.omega[j] = states[i][0];
            shot.phi[j] = states[i][2];
        }
    }
    return shot;
}

/// Exponent beta with omega = e^{beta t} w of unit size for the singular profile.
inline double flux_weight(const RadialProblem& problem) {
    return problem.profile.decay_rate() - (problem.params.n - 2);
}

}  // namespace detail

/// A radial starting guess: any profile evaluator phi(s) with derivatives.
using RadialProfileFn = std::function<RadialPoint(double)>;

/// Node-by-node admissibility of an analytic profile on the problem mesh, up to
/// rounding: S_j(mu) > -tol * S_j(|mu|) for j <= k (all mu_i > -tol |mu| for Log).
/// Profiles such as -|z|^{2-2n} + a|z|^2 are admissible only through a term far
/// below the rounding level of the singular part, so a strict test would reject them.
inline bool profile_admissible(const RadialProfileFn& profile, const RadialProblem& problem, double tol = 1e-12) {
    const auto& p = problem.params;
    for (double tj : problem.mesh) {
        const auto mu = radial_mu(profile(std::exp(tj)), p.n).vector();
        std::vector<double> magnitude(mu.size());
        double largest = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            magnitude[i] = std::abs(mu[i]);
            largest = std::max(largest, magnitude[i]);
        }
        if (p.form == Form::Log) {
            for (double m : mu) {
                if (!(m > -tol * largest)) {
                    return false;
                }
            }
            continue;
        }
        const auto e = elementary_symmetric_all(mu, p.k);
        const auto scale = elementary_symmetric_all(magnitude, p.k);
        for (std::size_t j = 1; j < e.size(); ++j) {
            if (!(e[j] > -tol * scale[j])) {
                return false;
            }
        }
    }
    return true;
}

/// Damped Newton on the outer flux w_R = R^{2(n-1)} phi'(R^2), starting from the
/// given guess. Every trial trajectory is checked for admissibility.
inline RadialSolution solve_radial_from_flux(const RadialProblem& problem, double outer_flux,
                                             const RadialSolverOptions& options = {}) {
    problem.validate();
    const int n = problem.params.n;
    const double beta = detail::flux_weight(problem);
    const double tM = problem.mesh.back();
    double omega = std::exp(beta * tM) * outer_flux;
    const double scale = std::max(1.0, std::abs(problem.inner_value));

    auto shot = detail::shoot(problem, beta, omega, options, false);
    if (!shot.admissible) {
        throw InvalidArgument("solve_radial: the initial flux leaves the admissible cone");
    }
    std::vector<double> history;
    double mismatch = shot.phi_inner - problem.inner_value;
    history.push_back(std::abs(mismatch) / scale);
    int iters = 0;
    const double target = options.tolerance * (1.0 + problem.eps);
    while (history.back() > target) {
        if (iters >= options.max_iterations) {
            throw SolverFailure("solve_radial: no convergence within the iteration limit", history);
        }
        const double step = -mismatch / shot.dphi_inner;
        if (!std::isfinite(step)) {
            throw SolverFailure("solve_radial: singular flux sensitivity", history);
        }
        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= options.max_halvings; ++halving, lambda *= 0.5) {
            auto trial = detail::shoot(problem, beta, omega + lambda * step, options, false);
            if (!trial.admissible) {
                continue;
            }
            const double trial_mismatch = trial.phi_inner - problem.inner_value;
            if (std::abs(trial_mismatch) < std::abs(mismatch)) {
                omega += lambda * step;
                shot = std::move(trial);
                mismatch = trial_mismatch;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw SolverFailure("solve_radial: line search stagnated", history);
        }
        ++iters;
        history.push_back(std::abs(mismatch) / scale);
    }

    shot = detail::shoot(problem, beta, omega, options, true);
    RadialSolution sol;
    sol.n = n;
    sol.t = problem.mesh;
    sol.weight_rate = problem.profile.decay_rate();
    sol.residual_norm = history.back();
    sol.residual_history = history;
    sol.newton_iters = iters;
    sol.admissible = true;
    const std::size_t count = problem.mesh.size();
    sol.phi = shot.phi;
    sol.dphi.resize(count);
    sol.d2phi.resize(count);
    sol.flux.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double tj = problem.mesh[j];
        const double s = std::exp(tj);
        const double w = shot.omega[j] * std::exp(-beta * tj);
        const double p = shot.omega[j] / std::exp((beta + n - 1) * tj);
        const auto root = admissible_root(p, n, problem.params.k, problem.params.rhs_level);
        sol.admissible = sol.admissible && root && root_admissible(root->m, p, n, problem.params.k);
        sol.flux[j] = w;
        sol.dphi[j] = p;
        sol.d2phi[j] = root ? (root->m - (n - 1) * p) / s : std::numeric_limits<double>::quiet_NaN();
    }
    // The boundary values are data; pin them exactly.
    sol.phi.front() = problem.inner_value;
    sol.phi.back() = problem.outer_value;
    return sol;
}

/// Damped Newton started from an init profile, which must be admissible at every
/// node; its outer flux is the starting point.
inline RadialSolution solve_radial(const RadialProblem& problem, const RadialProfileFn& init,
                                   const RadialSolverOptions& options = {}) {
    problem.validate();
    if (!profile_admissible(init, problem)) {
        throw InvalidArgument("solve_radial: init is not admissible at every node");
    }
    const double sR = std::exp(problem.mesh.back());
    return solve_radial_from_flux(problem, std::pow(sR, problem.params.n - 1) * init(sR).dphi, options);
}

/// Profile evaluator backed by a previous solution (restart from a converged run).
inline RadialProfileFn as_profile(const RadialSolution& sol) {
    return [sol](double s) { return sol.eval(s); };
}

/// -(1+c') s^{-gamma/2} + a s + d (or (1+c') log s + a s + d) matching both
/// boundary values, with a as in the ball subsolution. It is a subsolution with
/// S_k >= 1 whenever the singular profile is admissible and 1 + c' > 0.
inline RadialProfileFn matched_profile(const RadialProblem& problem) {
    const double a = unit_quadratic_coefficient(problem.params.n, problem.params.k);
    const auto profile = problem.profile;
    const double s0 = problem.eps * problem.eps;
    const double s1 = problem.R * problem.R;
    const double f0 = profile.eval(s0).phi;
    const double f1 = profile.eval(s1).phi;
    // (1+c') (f0 - f1) + a (s0 - s1) = inner - outer.
    const double scale = (problem.inner_value - problem.outer_value - a * (s0 - s1)) / (f0 - f1);
    const double d = problem.outer_value - scale * f1 - a * s1;
    if (!(scale > 0.0)) {
        throw InvalidArgument("matched_profile: boundary data incompatible with the singular profile");
    }
    return [profile, scale, a, d](double s) {
        auto pt = profile.eval(s);
        pt.phi = scale * pt.phi + a * s + d;
        pt.dphi = scale * pt.dphi + a;
        pt.d2phi = scale * pt.d2phi;
        return pt;
    };
}

/// Per-node finite-difference residual of a nodal profile.
struct RadialResidual {
    std::vector<double> residual;   ///< S_k - h (Root) or log S_k - log h (Log); Dirichlet mismatch at the ends
    std::vector<double> scale;      ///< rounding scale of S_k at the node (radial_sk_scale + h)
    std::vector<bool> admissible;   ///< per node; the ends are always true
};

/// Evaluates the equation on nodal values with order-`order` stencils in t and
/// the chain rule phi' = phi_t/s, phi'' = (phi_tt - phi_t)/s^2.
inline RadialResidual radial_residual(const std::vector<double>& values, const RadialProblem& problem,
                                      int order = 2) {
    if (values.size() != problem.mesh.size()) {
        throw InvalidArgument("radial_residual: profile length does not match the mesh");
    }
    const std::size_t count = values.size();
    const double h = (problem.mesh.back() - problem.mesh.front()) / static_cast<double>(count - 1);
    const auto& p = problem.params;
    RadialResidual r;
    r.residual.assign(count, 0.0);
    r.scale.assign(count, 1.0);
    r.admissible.assign(count, true);
    r.residual.front() = values.front() - problem.inner_value;
    r.residual.back() = values.back() - problem.outer_value;
    for (std::size_t j = 1; j + 1 < count; ++j) {
        const auto st = uniform_stencil(j, count, h, order);
        double phi_t = 0.0;
        double phi_tt = 0.0;
        for (std::size_t l = 0; l < st.d1.size(); ++l) {
            phi_t += st.d1[l] * values[st.first + l];
            phi_tt += st.d2[l] * values[st.first + l];
        }
        const double s = std::exp(problem.mesh[j]);
        const RadialPoint pt{s, values[j], phi_t / s, (phi_tt - phi_t) / (s * s)};
        const double sk = radial_sk(pt, p.n, p.k);
        r.scale[j] = radial_sk_scale(pt, p.n, p.k) + p.rhs_level;
        r.admissible[j] = admissible(radial_mu(pt, p.n), p);
        if (p.form == Form::Log && sk > 0.0) {
            r.residual[j] = std::log(sk) - std::log(p.rhs_level);
        } else {
            r.residual[j] = sk - p.rhs_level;
        }
    }
    return r;
}

}  // namespace hessgreen
