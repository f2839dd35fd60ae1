#pragma once

/// Subsolutions of the punctured Dirichlet problem: the explicit radial one on
/// balls and the quadratic barrier on boxes, plus the Levi-trace check.
///
/// Points are passed in real coordinates x = (x_1, y_1, ..., x_n, y_n), z_j = x_j + i y_j.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgreen/error.hpp"
#include "hessgreen/fundamental.hpp"
#include "hessgreen/hessian_operator.hpp"

namespace hessgreen {

inline Eigen::VectorXcd to_complex(const Eigen::VectorXd& x) {
    if (x.size() % 2 != 0) {
        throw InvalidArgument("to_complex: real dimension must be even");
    }
    Eigen::VectorXcd z(x.size() / 2);
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        z(j) = {x(2 * j), x(2 * j + 1)};
    }
    return z;
}

inline Eigen::VectorXd to_real(const Eigen::VectorXcd& z) {
    Eigen::VectorXd x(2 * z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        x(2 * j) = z(j).real();
        x(2 * j + 1) = z(j).imag();
    }
    return x;
}

inline std::vector<double> as_std(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

/// Ball(0, R) or an axis-aligned box, both containing the puncture at the origin.
struct DomainSpec {
    enum class Shape { Ball, Box };

    Shape shape = Shape::Ball;
    int n = 2;
    double radius = 1.0;
    Eigen::VectorXd lower;  ///< Box only, real coordinates
    Eigen::VectorXd upper;

    static DomainSpec ball(int n, double radius) {
        if (n < 2) {
            throw InvalidArgument("DomainSpec: n must be >= 2");
        }
        if (!(radius > 0.0)) {
            throw InvalidArgument("DomainSpec: ball radius must be > 0");
        }
        DomainSpec d;
        d.shape = Shape::Ball;
        d.n = n;
        d.radius = radius;
        return d;
    }

    static DomainSpec box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
        if (lower.size() != upper.size() || lower.size() < 4 || lower.size() % 2 != 0) {
            throw InvalidArgument("DomainSpec: box corners must have equal even length >= 4");
        }
        for (Eigen::Index i = 0; i < lower.size(); ++i) {
            if (!(lower(i) < 0.0 && upper(i) > 0.0)) {
                throw InvalidArgument("DomainSpec: box must contain the puncture strictly inside");
            }
        }
        DomainSpec d;
        d.shape = Shape::Box;
        d.n = static_cast<int>(lower.size() / 2);
        d.lower = lower;
        d.upper = upper;
        return d;
    }

    /// sigma = |z|^2 - R^2 (Ball only).
    double sigma(const Eigen::VectorXd& x) const { return x.squaredNorm() - radius * radius; }

    bool contains(const Eigen::VectorXd& x) const {
        if (shape == Shape::Ball) {
            return x.squaredNorm() < radius * radius;
        }
        return ((x - lower).array() > 0.0).all() && ((upper - x).array() > 0.0).all();
    }

    double diameter() const {
        return shape == Shape::Ball ? 2.0 * radius : (upper - lower).norm();
    }
};

/// Trace of the Levi form of sigma on the complex tangent space at a boundary point:
/// tr(sigma_{i j-bar}) - (sigma_{i j-bar} nu, nu)/|nu|^2, nu = (d sigma/d z_i).
inline double levi_trace(const DomainSpec& domain, const Eigen::VectorXd& x) {
    if (domain.shape != DomainSpec::Shape::Ball) {
        throw InvalidArgument("levi_trace: unsupported shape (box boundary is not smooth)");
    }
    if (x.size() != 2 * domain.n) {
        throw InvalidArgument("levi_trace: point has wrong dimension");
    }
    const double r2 = domain.radius * domain.radius;
    if (std::abs(domain.sigma(x)) > 1e-10 * r2) {
        throw InvalidArgument("levi_trace: point is not on the boundary");
    }
    const Eigen::VectorXcd z = to_complex(x);
    // sigma = sum |z_i|^2 - R^2: d sigma/d z_i = conj(z_i), sigma_{i j-bar} = delta_ij.
    const Eigen::VectorXcd nu = z.conjugate();
    const Eigen::MatrixXcd hess = Eigen::MatrixXcd::Identity(domain.n, domain.n);
    const double normal_part = (nu.adjoint() * hess * nu)(0, 0).real() / nu.squaredNorm();
    return hess.trace().real() - normal_part;
}

/// Value, real gradient and complex Hessian of a function at one point.
struct PointValue {
    double value = 0.0;
    Eigen::VectorXd gradient;
    HermitianMatrix hessian;
};

/// A globally defined smooth function of the real coordinates.
using SmoothFunction = std::function<PointValue(const Eigen::VectorXd&)>;

struct Subsolution {
    OperatorParams params;
    /// Present for ball subsolutions: u = singular(s) + a s + b.
    std::optional<SingularProfile> singular;
    double a = 0.0;
    double b = 0.0;
    double B = 0.0;
    double d = 0.0;
    /// Level S_k(mu[u]) provably exceeds, when floor_certified.
    double rhs_floor = 0.0;
    /// False when the singular part is not in the closed admissible cone, so the
    /// superadditivity argument behind rhs_floor does not apply.
    bool floor_certified = true;
    SmoothFunction evaluate;

    double value(const Eigen::VectorXd& x) const { return evaluate(x).value; }

    /// Radial profile in s (ball subsolutions only).
    RadialPoint radial(double s) const {
        if (!singular) {
            throw InvalidArgument("Subsolution::radial: not a radial subsolution");
        }
        auto pt = singular->eval(s);
        pt.phi += a * s + b;
        pt.dphi += a;
        return pt;
    }
};

/// a with S_k(mu[a |z|^2]) = 1: ((n-1)^k C(n,k))^{-1/k}.
inline double unit_quadratic_coefficient(int n, int k) {
    return std::pow(std::pow(n - 1.0, k) * binomial(n, k), -1.0 / k);
}

/// PointValue of a radial function phi(|z|^2) at x.
inline PointValue radial_point_value(const RadialPoint& pt, const Eigen::VectorXd& x) {
    PointValue v;
    v.value = pt.phi;
    v.gradient = 2.0 * pt.dphi * x;
    v.hessian = radial_complex_hessian(pt, to_complex(x));
    return v;
}

namespace detail {

inline Subsolution radial_ball_subsolution(double R, const SingularProfile& profile, const OperatorParams& p,
                                           double boundary_constant) {
    if (!(R > 0.0)) {
        throw InvalidArgument("ball_subsolution: R must be > 0");
    }
    p.validate();
    Subsolution u;
    u.params = p;
    u.singular = profile;
    u.a = unit_quadratic_coefficient(p.n, p.k);
    u.b = boundary_constant - profile.eval(R * R).phi - u.a * R * R;
    u.rhs_floor = 1.0;
    if (profile.kind == SingularProfile::Kind::Power) {
        u.floor_certified = branch_admissible({p.n, p.k, profile.gamma, Branch::Generic});
    } else {
        // log s has mu = (0, ..., 0, (n-1)/s) for n = 2, in the closed cone.
        u.floor_certified = p.n == 2;
    }
    const Subsolution snapshot = u;
    u.evaluate = [snapshot](const Eigen::VectorXd& x) {
        const double s = x.squaredNorm();
        return radial_point_value(snapshot.radial(s), x);
    };
    return u;
}

}  // namespace detail

/// u = -|z|^{-gamma} + a|z|^2 + b on the punctured ball, equal to
/// boundary_constant on |z| = R, with S_k(mu[a|z|^2]) = 1.
inline Subsolution ball_subsolution(double R, double gamma, const OperatorParams& p, double boundary_constant) {
    if (!(gamma > 0.0)) {
        throw InvalidArgument("ball_subsolution: gamma must be > 0");
    }
    return detail::radial_ball_subsolution(R, SingularProfile::power(gamma), p, boundary_constant);
}

/// u = log|z|^2 + a|z|^2 + b, the n = 2, k = 2 analogue (the power branch degenerates to gamma = 0).
inline Subsolution ball_log_subsolution(double R, const OperatorParams& p, double boundary_constant) {
    if (p.n != 2 || p.k != 2) {
        throw InvalidArgument("ball_log_subsolution: only for n = 2, k = 2");
    }
    return detail::radial_ball_subsolution(R, SingularProfile::logarithmic(), p, boundary_constant);
}

/// Box sample lattice: samples_per_axis points per real axis, endpoints included.
inline std::vector<Eigen::VectorXd> box_samples(const DomainSpec& domain, int samples_per_axis) {
    if (samples_per_axis < 2) {
        throw InvalidArgument("box_samples: need >= 2 samples per axis");
    }
    const auto dim = domain.lower.size();
    std::vector<Eigen::VectorXd> points;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (;;) {
        Eigen::VectorXd x(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double t = static_cast<double>(idx[static_cast<std::size_t>(i)]) / (samples_per_axis - 1);
            x(i) = domain.lower(i) + t * (domain.upper(i) - domain.lower(i));
        }
        points.push_back(std::move(x));
        Eigen::Index i = 0;
        while (i < dim && ++idx[static_cast<std::size_t>(i)] == samples_per_axis) {
            idx[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == dim) {
            break;
        }
    }
    return points;
}

namespace detail {

/// mu[phi + B |z|^2] = mu[phi] + B (n-1).
inline bool box_level_ok(const HermitianMatrix& phi_hessian, double B, const OperatorParams& p, double h_level) {
    auto mu = mu_of_matrix(phi_hessian).mu.vector();
    for (auto& m : mu) {
        m += B * (p.n - 1);
    }
    return in_gamma_k(mu, p.k) && elementary_symmetric(mu, p.k) >= h_level;
}

}  // namespace detail

/// u = phi + B(|z|^2 - d^2), d = diam(box), with the smallest B (doubling, then
/// bisection to relative 1e-6) such that S_k(mu[u]) >= h_level at every sample.
inline Subsolution box_subsolution(const DomainSpec& domain, const SmoothFunction& boundary_data,
                                   const OperatorParams& p, double h_level, int samples_per_axis = 9) {
    if (domain.shape != DomainSpec::Shape::Box) {
        throw InvalidArgument("box_subsolution: domain must be a box");
    }
    p.validate();
    if (p.n != domain.n) {
        throw InvalidArgument("box_subsolution: operator dimension does not match the domain");
    }
    if (p.k >= p.n) {
        throw InvalidArgument("box_subsolution: requires k < n");
    }
    if (!(h_level >= 0.0)) {
        throw InvalidArgument("box_subsolution: h_level must be >= 0");
    }
    const auto samples = box_samples(domain, samples_per_axis);
    std::vector<HermitianMatrix> hessians;
    hessians.reserve(samples.size());
    for (const auto& x : samples) {
        hessians.push_back(boundary_data(x).hessian);
    }
    auto first_failure = [&](double B) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!detail::box_level_ok(hessians[i], B, p, h_level)) {
                return i;
            }
        }
        return std::nullopt;
    };

    double hi = 1.0;
    std::optional<std::size_t> failure = first_failure(hi);
    while (failure) {
        hi *= 2.0;
        if (hi > std::ldexp(1.0, 60)) {
            throw ConstructionFailure("box_subsolution: B exceeded 2^60", as_std(samples[*failure]));
        }
        failure = first_failure(hi);
    }
    double lo = 0.0;
    if (!first_failure(lo)) {
        hi = 0.0;
    }
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        (first_failure(mid) ? lo : hi) = mid;
    }

    Subsolution u;
    u.params = p;
    u.B = hi;
    u.d = domain.diameter();
    u.rhs_floor = h_level;
    const double B = u.B;
    const double d2 = u.d * u.d;
    const int n = p.n;
    u.evaluate = [boundary_data, B, d2, n](const Eigen::VectorXd& x) {
        PointValue v = boundary_data(x);
        v.value += B * (x.squaredNorm() - d2);
        v.gradient += 2.0 * B * x;
        v.hessian = v.hessian + B * HermitianMatrix::identity(n);
        return v;
    };
    return u;
}

}  // namespace hessgreen
