#pragma once

/// Radially symmetric functions Phi(z) = phi(|z|^2) and the fundamental
/// solutions -|z|^{-gamma} of S_k(mu[Phi]) = 0.
///
/// Everything is parameterized by s = |z|^2; phi' and phi'' are d/ds.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgreen/error.hpp"
#include "hessgreen/hessian_operator.hpp"
#include "hessgreen/symfun.hpp"

namespace hessgreen {

struct RadialPoint {
    double s = 1.0;
    double phi = 0.0;
    double dphi = 0.0;
    double d2phi = 0.0;
};

enum class Branch { Generic, Degenerate };

inline const char* to_string(Branch b) { return b == Branch::Generic ? "generic" : "degenerate"; }

struct GammaBranch {
    int n = 0;
    int k = 0;
    double gamma = 0.0;
    Branch branch = Branch::Generic;
};

struct GammaTable {
    std::vector<GammaBranch> branches;
    std::vector<std::string> diagnostics;
};

inline double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

/// Exponents gamma with S_k(mu[-|z|^{-gamma}]) = 0:
///   Generic    gamma = (2n^2 - 4n + 2k)/(n - k), k < n   (k = 1 gives 2n - 2)
///   Degenerate gamma = 2n - 4,                   k > 1   (mu_1 = ... = mu_{n-1} = 0)
/// A Degenerate exponent <= 0 (n = 2) is omitted with a diagnostic: the ODE
/// solution there is log|z|^2, not a power.
inline GammaTable gamma_exponents(int n, int k) {
    if (n < 2 || k < 1 || k > n) {
        throw InvalidArgument("gamma_exponents: need n >= 2 and 1 <= k <= n");
    }
    GammaTable table;
    if (k < n) {
        const double gamma = static_cast<double>(2 * n * n - 4 * n + 2 * k) / static_cast<double>(n - k);
        table.branches.push_back({n, k, gamma, Branch::Generic});
    }
    if (k > 1) {
        const int gamma = 2 * n - 4;
        if (gamma > 0) {
            table.branches.push_back({n, k, static_cast<double>(gamma), Branch::Degenerate});
        } else {
            table.diagnostics.push_back("degenerate branch rejected: 2n-4 = " + std::to_string(gamma) +
                                        " <= 0; the radial solution of s*phi'' + (n-1)*phi' = 0 is log s");
        }
    }
    return table;
}

/// mu[Phi] = (m, ..., m, (n-1) phi') with m = (n-1) phi' + phi'' s.
inline Spectrum radial_mu(const RadialPoint& pt, int n) {
    if (!(pt.s > 0.0)) {
        throw InvalidArgument("radial_mu: s must be > 0");
    }
    const double m = (n - 1) * pt.dphi + pt.d2phi * pt.s;
    std::vector<double> mu(static_cast<std::size_t>(n), m);
    mu.back() = (n - 1) * pt.dphi;
    return Spectrum(std::move(mu));
}

/// Closed form (1/k) C(n-1,k-1) m^{k-1} ((n-k) phi'' s + n(n-1) phi').
inline double radial_sk(const RadialPoint& pt, int n, int k) {
    if (!(pt.s > 0.0)) {
        throw InvalidArgument("radial_sk: s must be > 0");
    }
    const double m = (n - 1) * pt.dphi + pt.d2phi * pt.s;
    const double linear = (n - k) * pt.d2phi * pt.s + n * (n - 1) * pt.dphi;
    return binomial(n - 1, k - 1) / k * std::pow(m, k - 1) * linear;
}

/// Rounding scale of radial_sk: the same product with every term replaced by its magnitude.
inline double radial_sk_scale(const RadialPoint& pt, int n, int k) {
    const double m = std::abs((n - 1) * pt.dphi) + std::abs(pt.d2phi * pt.s);
    const double linear = std::abs((n - k) * pt.d2phi * pt.s) + std::abs(n * (n - 1) * pt.dphi);
    return binomial(n - 1, k - 1) / k * std::pow(m, k - 1) * linear;
}

/// radial_sk / radial_sk_scale, evaluated after normalizing (phi', phi'' s) to unit
/// size so that steep profiles do not overflow. Zero scale gives 0.
inline double radial_sk_relative(RadialPoint pt, int n, int k) {
    const double w = std::abs(pt.dphi) + std::abs(pt.d2phi * pt.s);
    if (w == 0.0) {
        return 0.0;
    }
    pt.dphi /= w;
    pt.d2phi /= w;
    return radial_sk(pt, n, k) / radial_sk_scale(pt, n, k);
}

/// Phi = -s^{-gamma/2} and its s-derivatives.
inline RadialPoint phi_eval(double gamma, double s) {
    if (!(s > 0.0)) {
        throw InvalidArgument("phi_eval: s must be > 0");
    }
    if (!(gamma > 0.0)) {
        throw InvalidArgument("phi_eval: gamma must be > 0");
    }
    const double half = gamma / 2.0;
    const double p = std::pow(s, -half);
    return {s, -p, half * p / s, -half * (half + 1.0) * p / (s * s)};
}

/// Phi = log s, the radial solution of s*phi'' + phi' = 0 used for n = 2, k = 2.
inline RadialPoint log_phi_eval(double s) {
    if (!(s > 0.0)) {
        throw InvalidArgument("log_phi_eval: s must be > 0");
    }
    return {s, std::log(s), 1.0 / s, -1.0 / (s * s)};
}

/// Dense complex Hessian Phi_{i j-bar} = phi'' conj(z_i) z_j + phi' delta_ij at z, |z|^2 = pt.s.
inline HermitianMatrix radial_complex_hessian(const RadialPoint& pt, const Eigen::VectorXcd& z) {
    const int n = static_cast<int>(z.size());
    HermitianMatrix h(n);
    for (int i = 0; i < n; ++i) {
        h.set_diagonal(i, pt.d2phi * std::norm(z(i)) + pt.dphi);
        for (int j = i + 1; j < n; ++j) {
            h.set(i, j, pt.d2phi * std::conj(z(i)) * z(j));
        }
    }
    return h;
}

/// Whether mu[-|z|^{-gamma}] lies in the closure of Gamma_k (S_j >= 0 for j <= k,
/// up to a relative 1e-12). False for the Generic branch with k > 1, where
/// S_1(mu) < 0: that profile sits in -closure(Gamma_k).
inline bool branch_admissible(const GammaBranch& b) {
    const auto mu = radial_mu(phi_eval(b.gamma, 1.0), b.n);
    std::vector<double> magnitude(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        magnitude[i] = std::abs(mu[i]);
    }
    const auto e = elementary_symmetric_all(mu, b.k);
    const auto scale = elementary_symmetric_all(magnitude, b.k);
    for (int j = 1; j <= b.k; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        if (e[idx] < -1e-12 * scale[idx]) {
            return false;
        }
    }
    return true;
}

/// The singular part of a radial profile: -s^{-gamma/2} or log s.
struct SingularProfile {
    enum class Kind { Power, Log };

    Kind kind = Kind::Power;
    double gamma = 0.0;

    static SingularProfile power(double gamma) {
        if (!(gamma > 0.0)) {
            throw InvalidArgument("SingularProfile: gamma must be > 0");
        }
        return {Kind::Power, gamma};
    }

    static SingularProfile logarithmic() { return {Kind::Log, 0.0}; }

    RadialPoint eval(double s) const { return kind == Kind::Power ? phi_eval(gamma, s) : log_phi_eval(s); }

    /// c with Phi(e^t) = -e^{-ct} (Power, c = gamma/2); 0 for Log.
    double decay_rate() const noexcept { return kind == Kind::Power ? gamma / 2.0 : 0.0; }
};

}  // namespace hessgreen
