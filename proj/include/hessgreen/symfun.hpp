#pragma once

/// Elementary symmetric polynomials S_k on R^n, their partials S_{k-1;j},
/// Garding cone membership and the standard identity suite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hessgreen/error.hpp"

namespace hessgreen {

/// An ordered real n-vector (lambda or mu). Never sorted implicitly.
class Spectrum {
public:
    Spectrum() = default;

    explicit Spectrum(std::vector<double> values) : values_(std::move(values)) { validate(); }

    Spectrum(std::initializer_list<double> values) : values_(values) { validate(); }

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    operator std::span<const double>() const noexcept { return values_; }  // NOLINT

    const std::vector<double>& vector() const noexcept { return values_; }

    Spectrum sorted_descending() const {
        auto v = values_;
        std::sort(v.begin(), v.end(), std::greater<>());
        return Spectrum(std::move(v));
    }

    friend bool operator==(const Spectrum&, const Spectrum&) = default;

private:
    void validate() const {
        if (values_.size() < 2) {
            throw InvalidArgument("Spectrum: dimension must be >= 2");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw InvalidArgument("Spectrum: non-finite entry");
            }
        }
    }

    std::vector<double> values_;
};

/// e_0..e_k of mu by the one-pass prefix recurrence, O(nk). Entries with index > n are 0.
inline std::vector<double> elementary_symmetric_all(std::span<const double> mu, int k) {
    if (k < 0) {
        throw InvalidArgument("elementary_symmetric: k must be >= 0");
    }
    std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto top = static_cast<std::size_t>(std::min<std::size_t>(i + 1, static_cast<std::size_t>(k)));
        for (std::size_t j = top; j >= 1; --j) {
            e[j] += mu[i] * e[j - 1];
        }
    }
    return e;
}

/// S_k(mu). S_0 = 1 and S_l = 0 for l > n.
inline double elementary_symmetric(std::span<const double> mu, int k) {
    if (k < 0) {
        throw InvalidArgument("elementary_symmetric: k must be >= 0");
    }
    if (static_cast<std::size_t>(k) > mu.size()) {
        return 0.0;
    }
    return elementary_symmetric_all(mu, k).back();
}

/// S_{k-1;j}(mu) = dS_k/dmu_j = S_{k-1} of mu with entry j removed. j is 0-based.
inline double partial_symmetric(std::span<const double> mu, int k, std::size_t j) {
    if (k < 1 || static_cast<std::size_t>(k) > mu.size()) {
        throw InvalidArgument("partial_symmetric: need 1 <= k <= n");
    }
    if (j >= mu.size()) {
        throw InvalidArgument("partial_symmetric: index out of range");
    }
    std::vector<double> rest;
    rest.reserve(mu.size() - 1);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (i != j) {
            rest.push_back(mu[i]);
        }
    }
    return elementary_symmetric(rest, k - 1);
}

/// S_l of mu with entry j removed, for any l >= 0 (S_{l;j} in the usual notation).
inline double symmetric_without(std::span<const double> mu, int l, std::size_t j) {
    std::vector<double> rest;
    rest.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (i != j) {
            rest.push_back(mu[i]);
        }
    }
    return elementary_symmetric(rest, l);
}

/// Strict membership in Gamma_k = {S_j > 0, j = 1..k}. No tolerance.
inline bool in_gamma_k(std::span<const double> mu, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > mu.size()) {
        throw InvalidArgument("in_gamma_k: need 1 <= k <= n");
    }
    const auto e = elementary_symmetric_all(mu, k);
    for (int j = 1; j <= k; ++j) {
        if (!(e[static_cast<std::size_t>(j)] > 0.0)) {
            return false;
        }
    }
    return true;
}

/// Residuals and ratios of the standard symmetric-polynomial identities at one mu.
struct IdentityReport {
    /// max_i |S_k - S_{k;i} - mu_i S_{k-1;i}| / (1 + |S_k|)
    double p04_relative_residual = 0.0;
    /// S_k^{1/k} / S_{k-1}^{1/(k-1)}; empty for k = 1.
    std::optional<double> p01_ratio;
    /// |sum_i S_{k-1;i} - (n-k+1) S_{k-1}| / (1 + (n-k+1)|S_{k-1}|)
    double p02_relative_residual = 0.0;
    /// S_{k-1;k} / sum_i S_{k-1;i} with mu sorted descending.
    double p03_ratio = 0.0;
};

/// Evaluates the identity suite at mu in Gamma_k. Sorts a copy descending first.
inline IdentityReport identity_suite(std::span<const double> mu_in, int k) {
    const std::size_t n = mu_in.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw InvalidArgument("identity_suite: need 1 <= k <= n");
    }
    if (!in_gamma_k(mu_in, k)) {
        throw ConeViolation("identity_suite: mu is not in Gamma_k", {mu_in.begin(), mu_in.end()});
    }
    std::vector<double> mu(mu_in.begin(), mu_in.end());
    std::sort(mu.begin(), mu.end(), std::greater<>());

    IdentityReport report;
    const double sk = elementary_symmetric(mu, k);
    const double skm1 = elementary_symmetric(mu, k - 1);

    double sum_partials = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double without_k = symmetric_without(mu, k, i);
        const double without_km1 = symmetric_without(mu, k - 1, i);
        const double residual = std::abs(sk - without_k - mu[i] * without_km1);
        report.p04_relative_residual = std::max(report.p04_relative_residual, residual / (1.0 + std::abs(sk)));
        sum_partials += without_km1;
    }

    const double multiplicity = static_cast<double>(n - static_cast<std::size_t>(k) + 1);
    report.p02_relative_residual =
        std::abs(sum_partials - multiplicity * skm1) / (1.0 + multiplicity * std::abs(skm1));

    if (k >= 2) {
        report.p01_ratio = std::pow(sk, 1.0 / k) / std::pow(skm1, 1.0 / (k - 1));
    }
    report.p03_ratio = symmetric_without(mu, k - 1, static_cast<std::size_t>(k - 1)) / sum_partials;
    return report;
}

}  // namespace hessgreen
