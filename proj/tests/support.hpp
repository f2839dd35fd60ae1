#pragma once

// Shared fixtures for the unit tests: random spectra, unitaries, and
// brute-force oracles that are deliberately independent of the library code.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hessgreen/hessian_operator.hpp"
#include "hessgreen/symfun.hpp"

namespace testsupport {

/// S_k by enumerating all k-subsets (bitmasks). Fine for n <= 16.
inline double brute_force_sk(const std::vector<double>& mu, int k) {
    if (k == 0) {
        return 1.0;
    }
    const int n = static_cast<int>(mu.size());
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) {
            continue;
        }
        double prod = 1.0;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                prod *= mu[static_cast<std::size_t>(i)];
            }
        }
        total += prod;
    }
    return total;
}

inline bool brute_force_in_cone(const std::vector<double>& mu, int k) {
    for (int j = 1; j <= k; ++j) {
        if (!(brute_force_sk(mu, j) > 0.0)) {
            return false;
        }
    }
    return true;
}

/// Gaussian sample rejected until it lies in Gamma_k.
inline std::vector<double> sample_cone(std::mt19937_64& rng, int n, int k) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (;;) {
        for (auto& m : mu) {
            m = normal(rng);
        }
        if (brute_force_in_cone(mu, k)) {
            return mu;
        }
    }
}

/// Haar-ish unitary from the QR factorization of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g(i, j) = {normal(rng), normal(rng)};
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

inline hessgreen::HermitianMatrix random_hermitian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    hessgreen::HermitianMatrix h(n);
    for (int i = 0; i < n; ++i) {
        h.set_diagonal(i, normal(rng));
        for (int j = i + 1; j < n; ++j) {
            h.set(i, j, {normal(rng), normal(rng)});
        }
    }
    return h;
}

/// A = U diag(lambda(mu)) U^* with mu sampled in Gamma_k.
inline hessgreen::HermitianMatrix random_admissible(std::mt19937_64& rng, int n, int k) {
    const auto mu = sample_cone(rng, n, k);
    const auto lambda = hessgreen::lambda_from_mu(mu);
    return hessgreen::HermitianMatrix::conjugated_diagonal(random_unitary(rng, n), lambda);
}

}  // namespace testsupport
