#pragma once

/// The form-type Hessian operator F(A) = S_k(mu(A))^{1/k} (Root form) or
/// sum_i log mu_i (Log form, k = n), where mu_i = tr(A) - lambda_i(A).
///
/// Gradients are spectral: diagonalize A, apply the diagonal formula for
/// f_i = dF/dlambda_i, conjugate back. Second derivatives are never formed.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgreen/error.hpp"
#include "hessgreen/symfun.hpp"

namespace hessgreen {

using cdouble = std::complex<double>;

enum class Form { Root, Log };

inline const char* to_string(Form form) { return form == Form::Root ? "root" : "log"; }

/// Dimension, degree, operator form and right-hand-side level of S_k(mu[u]) = h.
struct OperatorParams {
    int n = 2;
    int k = 1;
    Form form = Form::Root;
    double rhs_level = 0.0;

    void validate() const {
        if (n < 2) {
            throw InvalidArgument("OperatorParams: n must be >= 2");
        }
        if (k < 1 || k > n) {
            throw InvalidArgument("OperatorParams: need 1 <= k <= n");
        }
        if (form == Form::Log && k != n) {
            throw InvalidArgument("OperatorParams: Log form requires k = n");
        }
        if (!(rhs_level >= 0.0) || !std::isfinite(rhs_level)) {
            throw InvalidArgument("OperatorParams: rhs_level must be finite and >= 0");
        }
    }

    /// rhs_level = 0 is the homogeneous (degenerate) target.
    bool degenerate() const noexcept { return rhs_level == 0.0; }
};

/// Log for k = n, Root otherwise.
inline OperatorParams default_params(int n, int k, double rhs_level = 0.0) {
    OperatorParams p{n, k, k == n ? Form::Log : Form::Root, rhs_level};
    p.validate();
    return p;
}

/// n x n complex Hermitian matrix. Writes go through set(), which mirrors the
/// entry, so A = A^* holds exactly.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(int n) : a_(Eigen::MatrixXcd::Zero(n, n)) {
        if (n < 1) {
            throw InvalidArgument("HermitianMatrix: dimension must be >= 1");
        }
    }

    /// Builds from the upper triangle of m; the diagonal's imaginary part is dropped.
    static HermitianMatrix from_upper(const Eigen::MatrixXcd& m) {
        if (m.rows() != m.cols()) {
            throw InvalidArgument("HermitianMatrix: matrix must be square");
        }
        HermitianMatrix h(static_cast<int>(m.rows()));
        for (int i = 0; i < m.rows(); ++i) {
            h.set_diagonal(i, m(i, i).real());
            for (int j = i + 1; j < m.cols(); ++j) {
                h.set(i, j, m(i, j));
            }
        }
        return h;
    }

    static HermitianMatrix identity(int n) {
        HermitianMatrix h(n);
        h.a_.setIdentity();
        return h;
    }

    static HermitianMatrix diagonal(std::span<const double> d) {
        HermitianMatrix h(static_cast<int>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) {
            h.a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
        }
        return h;
    }

    /// U diag(d) U^*.
    static HermitianMatrix conjugated_diagonal(const Eigen::MatrixXcd& u, std::span<const double> d) {
        const auto n = static_cast<Eigen::Index>(d.size());
        Eigen::VectorXd dv(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            dv(i) = d[static_cast<std::size_t>(i)];
        }
        const Eigen::MatrixXcd m = u * dv.asDiagonal() * u.adjoint();
        return from_upper(m);
    }

    int dim() const noexcept { return static_cast<int>(a_.rows()); }

    cdouble operator()(int i, int j) const { return a_(i, j); }

    void set(int i, int j, cdouble value) {
        if (i == j) {
            set_diagonal(i, value.real());
            return;
        }
        a_(i, j) = value;
        a_(j, i) = std::conj(value);
    }

    void set_diagonal(int i, double value) { a_(i, i) = value; }

    const Eigen::MatrixXcd& dense() const noexcept { return a_; }

    double trace() const { return a_.diagonal().real().sum(); }

    HermitianMatrix conjugated_by(const Eigen::MatrixXcd& u) const { return from_upper(u * a_ * u.adjoint()); }

    double max_abs_entry() const { return a_.cwiseAbs().maxCoeff(); }

    friend HermitianMatrix operator+(const HermitianMatrix& x, const HermitianMatrix& y) {
        HermitianMatrix r = x;
        r.a_ += y.a_;
        return r;
    }

    friend HermitianMatrix operator-(const HermitianMatrix& x, const HermitianMatrix& y) {
        HermitianMatrix r = x;
        r.a_ -= y.a_;
        return r;
    }

    friend HermitianMatrix operator*(double t, const HermitianMatrix& x) {
        HermitianMatrix r = x;
        r.a_ *= t;
        return r;
    }

private:
    Eigen::MatrixXcd a_;
};

/// Eigenvalues ascending, eigenvectors as columns of a unitary.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Eigen::MatrixXcd unitary;
};

inline SpectralDecomposition decompose(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.dense());
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed on Hermitian matrix with Frobenius norm " +
                             std::to_string(a.dense().norm()));
    }
    SpectralDecomposition d;
    d.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + a.dim());
    d.unitary = solver.eigenvectors();
    return d;
}

/// mu_i = S_1(lambda) - lambda_i.
inline std::vector<double> mu_from_lambda(std::span<const double> lambda) {
    const double s1 = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    std::vector<double> mu(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        mu[i] = s1 - lambda[i];
    }
    return mu;
}

/// lambda_i = S_1(mu)/(n-1) - mu_i.
inline std::vector<double> lambda_from_mu(std::span<const double> mu) {
    if (mu.size() < 2) {
        throw InvalidArgument("lambda_from_mu: n must be >= 2");
    }
    const double s1 = std::accumulate(mu.begin(), mu.end(), 0.0);
    const double trace = s1 / static_cast<double>(mu.size() - 1);
    std::vector<double> lambda(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        lambda[i] = trace - mu[i];
    }
    return lambda;
}

/// mu of A paired index-by-index with the decomposition's eigenvectors
/// (eigenvalues ascending, hence mu descending).
struct MatrixSpectrum {
    Spectrum mu;
    SpectralDecomposition decomposition;
};

inline MatrixSpectrum mu_of_matrix(const HermitianMatrix& a) {
    auto d = decompose(a);
    Spectrum mu(mu_from_lambda(d.eigenvalues));
    return {std::move(mu), std::move(d)};
}

/// Whether mu is strictly admissible for the operator: Gamma_k for Root,
/// all mu_i > 0 for Log.
inline bool admissible(std::span<const double> mu, const OperatorParams& p) {
    if (p.form == Form::Log) {
        return std::all_of(mu.begin(), mu.end(), [](double m) { return m > 0.0; });
    }
    return in_gamma_k(mu, p.k);
}

/// f as a function of mu. Throws InadmissiblePoint outside the cone.
inline double f_of_mu(std::span<const double> mu, const OperatorParams& p) {
    if (!admissible(mu, p)) {
        throw InadmissiblePoint("operator evaluated outside the admissible cone", {mu.begin(), mu.end()});
    }
    if (p.form == Form::Log) {
        double sum = 0.0;
        for (double m : mu) {
            sum += std::log(m);
        }
        return sum;
    }
    return std::pow(elementary_symmetric(mu, p.k), 1.0 / p.k);
}

/// f_i = df/dlambda_i = sum_{j != i} df/dmu_j, with
///   Root: df/dmu_j = (1/k) S_k^{1/k-1} S_{k-1;j},  Log: df/dmu_j = 1/mu_j.
inline std::vector<double> f_partials(std::span<const double> mu, const OperatorParams& p) {
    if (!admissible(mu, p)) {
        throw InadmissiblePoint("operator gradient outside the admissible cone", {mu.begin(), mu.end()});
    }
    const std::size_t n = mu.size();
    std::vector<double> dmu(n);
    if (p.form == Form::Log) {
        for (std::size_t j = 0; j < n; ++j) {
            dmu[j] = 1.0 / mu[j];
        }
    } else {
        const double sk = elementary_symmetric(mu, p.k);
        const double prefactor = std::pow(sk, 1.0 / p.k - 1.0) / p.k;
        for (std::size_t j = 0; j < n; ++j) {
            dmu[j] = prefactor * partial_symmetric(mu, p.k, j);
        }
    }
    const double total = std::accumulate(dmu.begin(), dmu.end(), 0.0);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = total - dmu[i];
    }
    return f;
}

inline double f_value(const HermitianMatrix& a, const OperatorParams& p) {
    p.validate();
    if (a.dim() != p.n) {
        throw InvalidArgument("f_value: matrix dimension does not match n");
    }
    return f_of_mu(mu_of_matrix(a).mu, p);
}

/// Spectral gradient U diag(f) U^*. Written as fbar I + U diag(f - fbar) U^*
/// so that an exactly constant f (k = 1) gives an exactly scalar matrix.
inline HermitianMatrix gradient_from_decomposition(const SpectralDecomposition& d, std::span<const double> f) {
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    std::vector<double> deviation(f.size());
    bool scalar = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
        deviation[i] = f[i] - mean;
        scalar = scalar && deviation[i] == 0.0;
    }
    const int n = static_cast<int>(f.size());
    HermitianMatrix g = scalar ? HermitianMatrix(n) : HermitianMatrix::conjugated_diagonal(d.unitary, deviation);
    for (int i = 0; i < n; ++i) {
        g.set_diagonal(i, g(i, i).real() + mean);
    }
    return g;
}

/// (F^{i j-bar}) = dF/da_{i j-bar}: dF(A)[H] = tr(G H) for Hermitian H.
inline HermitianMatrix f_gradient(const HermitianMatrix& a, const OperatorParams& p) {
    p.validate();
    const auto ms = mu_of_matrix(a);
    const auto f = f_partials(ms.mu, p);
    return gradient_from_decomposition(ms.decomposition, f);
}

/// Root: |tr(G A) - F(A)| (Euler identity of the degree-1 homogeneous f).
/// Log:  |tr(G A) - n|.
inline double trace_identity_residual(const HermitianMatrix& a, const OperatorParams& p) {
    const auto g = f_gradient(a, p);
    const double contraction = (g.dense() * a.dense()).trace().real();
    if (p.form == Form::Log) {
        return std::abs(contraction - static_cast<double>(p.n));
    }
    return std::abs(contraction - f_value(a, p));
}

struct EllipticityReport {
    double ratio = 0.0;               ///< min_i f_i / sum_i f_i
    double total = 0.0;               ///< sum_i f_i
    double closed_form_total = 0.0;   ///< ((n-1)(n-k+1)/k) S_k^{1/k-1} S_{k-1}
    double closed_form_relative_error = 0.0;
};

/// Ellipticity ratio of the Root form for k < n. The k = n equation is not
/// uniformly elliptic and is rejected.
inline EllipticityReport ellipticity_ratio(const HermitianMatrix& a, const OperatorParams& p) {
    p.validate();
    if (p.k >= p.n || p.form != Form::Root) {
        throw InvalidArgument("ellipticity_ratio: unsupported for k = n (not uniformly elliptic)");
    }
    const auto ms = mu_of_matrix(a);
    const auto f = f_partials(ms.mu, p);
    EllipticityReport r;
    r.total = std::accumulate(f.begin(), f.end(), 0.0);
    r.ratio = *std::min_element(f.begin(), f.end()) / r.total;
    const double sk = elementary_symmetric(ms.mu, p.k);
    const double skm1 = elementary_symmetric(ms.mu, p.k - 1);
    r.closed_form_total = static_cast<double>((p.n - 1) * (p.n - p.k + 1)) / p.k * std::pow(sk, 1.0 / p.k - 1.0) * skm1;
    r.closed_form_relative_error = std::abs(r.total - r.closed_form_total) / std::abs(r.closed_form_total);
    return r;
}

/// Largest undivided second central difference of t -> F(A + tH) over the
/// 9-point stencil t_m = -t_max + m t_max/4. Nonpositive for concave F up to rounding.
inline double concavity_probe(const HermitianMatrix& a, const HermitianMatrix& h, const OperatorParams& p,
                              double t_max) {
    if (!(t_max > 0.0)) {
        throw InvalidArgument("concavity_probe: t_max must be positive");
    }
    constexpr int points = 9;
    std::array<double, points> values{};
    for (int m = 0; m < points; ++m) {
        const double t = -t_max + m * t_max / 4.0;
        values[static_cast<std::size_t>(m)] = f_value(a + t * h, p);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m + 1 < points; ++m) {
        worst = std::max(worst, values[m - 1] - 2.0 * values[m] + values[m + 1]);
    }
    return worst;
}

}  // namespace hessgreen
