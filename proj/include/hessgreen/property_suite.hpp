#pragma once

/// Randomised property checks over the symmetric-function, operator and
/// fundamental-solution layers. The S_k evaluator is injectable so a corrupted
/// recurrence can be shown to fail the suite.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgreen/fundamental.hpp"
#include "hessgreen/hessian_operator.hpp"
#include "hessgreen/symfun.hpp"

namespace hessgreen {

using SkFunction = std::function<double(std::span<const double>, int)>;

inline SkFunction library_sk() {
    return [](std::span<const double> mu, int k) { return elementary_symmetric(mu, k); };
}

/// The recurrence with its sign flipped: e_j <- e_j - mu_i e_{j-1}, i.e. (-1)^k S_k.
inline SkFunction negated_sign_sk() {
    return [](std::span<const double> mu, int k) {
        std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
        e[0] = 1.0;
        for (double m : mu) {
            for (int j = k; j >= 1; --j) {
                e[static_cast<std::size_t>(j)] -= m * e[static_cast<std::size_t>(j - 1)];
            }
        }
        return e[static_cast<std::size_t>(k)];
    };
}

struct CheckResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    double worst = 0.0;        ///< worst residual (or worst ratio for floors)
    double tolerance = 0.0;
    bool pass = true;
    std::vector<std::string> failing;   ///< first few failing cases
};

struct PropertySuiteConfig {
    int n_max = 6;
    std::size_t samples = 10000;        ///< identity-suite cone samples
    std::uint64_t seed = 42;
    SkFunction sk = library_sk();
    std::size_t operator_samples() const { return (samples + 9) / 10; }
    std::size_t ellipticity_samples() const { return samples * 10; }
};

namespace detail {

inline void record(CheckResult& c, bool ok, const std::string& label) {
    ++c.cases;
    if (!ok) {
        ++c.failures;
        c.pass = false;
        if (c.failing.size() < 8) {
            c.failing.push_back(label);
        }
    }
}

inline std::string describe(const std::vector<double>& mu) {
    std::string s = "mu=(";
    for (std::size_t i = 0; i < mu.size(); ++i) {
        s += (i ? "," : "") + std::to_string(mu[i]);
    }
    return s + ")";
}

inline std::vector<double> without(std::span<const double> mu, std::size_t i) {
    std::vector<double> r;
    r.reserve(mu.size() - 1);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (j != i) {
            r.push_back(mu[j]);
        }
    }
    return r;
}

/// Gaussian vectors rejected until in Gamma_k.
inline std::vector<double> sample_gamma_k(std::mt19937_64& rng, int n, int k) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (;;) {
        for (auto& m : mu) {
            m = normal(rng);
        }
        if (in_gamma_k(mu, k)) {
            return mu;
        }
    }
}

inline Eigen::MatrixXcd haar_unitary(std::mt19937_64& rng, int n) {
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

inline HermitianMatrix gaussian_hermitian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    HermitianMatrix h(n);
    for (int i = 0; i < n; ++i) {
        h.set_diagonal(i, normal(rng));
        for (int j = i + 1; j < n; ++j) {
            h.set(i, j, {normal(rng), normal(rng)});
        }
    }
    return h;
}

/// Operator cases (n, k, form) with n in {2, 3, 4}, every k, Log added for k = n.
inline std::vector<OperatorParams> operator_cases() {
    std::vector<OperatorParams> cases;
    for (int n = 2; n <= 4; ++n) {
        for (int k = 1; k <= n; ++k) {
            cases.push_back({n, k, Form::Root, 0.0});
            if (k == n) {
                cases.push_back({n, k, Form::Log, 0.0});
            }
        }
    }
    return cases;
}

inline HermitianMatrix admissible_matrix(std::mt19937_64& rng, const OperatorParams& p) {
    std::vector<double> mu = sample_gamma_k(rng, p.n, p.form == Form::Log ? p.n : p.k);
    return HermitianMatrix::conjugated_diagonal(haar_unitary(rng, p.n), lambda_from_mu(mu));
}

}  // namespace detail

/// (p04) S_k = S_{k;i} + mu_i S_{k-1;i} and (p02) sum_i S_{k-1;i} = (n-k+1) S_{k-1},
/// relative residuals <= 1e-10, plus Schur monotonicity mu_i >= mu_j => S_{k-1;i} <= S_{k-1;j},
/// all evaluated with the injected S_k over samples cycling through 2 <= n <= n_max, 1 <= k <= n.
inline std::vector<CheckResult> check_identities(const PropertySuiteConfig& cfg) {
    CheckResult p04{"identity_p04", 0, 0, 0.0, 1e-10, true, {}};
    CheckResult p02{"identity_p02", 0, 0, 0.0, 1e-10, true, {}};
    CheckResult schur{"schur_monotonicity", 0, 0, 0.0, 1e-12, true, {}};
    std::vector<std::pair<int, int>> pairs;
    for (int n = 2; n <= cfg.n_max; ++n) {
        for (int k = 1; k <= n; ++k) {
            pairs.emplace_back(n, k);
        }
    }
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t s = 0; s < cfg.samples && !pairs.empty(); ++s) {
        const auto [n, k] = pairs[s % pairs.size()];
        const auto mu = detail::sample_gamma_k(rng, n, k);
        const double sk = cfg.sk(mu, k);
        const double skm1 = cfg.sk(mu, k - 1);
        double worst04 = 0.0;
        double sum = 0.0;
        std::vector<double> partial(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const auto rest = detail::without(mu, i);
            const double a = cfg.sk(rest, k);
            const double b = cfg.sk(rest, k - 1);
            partial[i] = b;
            worst04 = std::max(worst04, std::abs(sk - a - mu[i] * b) / (1.0 + std::abs(sk)));
            sum += b;
        }
        const double mult = n - k + 1.0;
        const double res02 = std::abs(sum - mult * skm1) / (1.0 + mult * std::abs(skm1));
        p04.worst = std::max(p04.worst, worst04);
        p02.worst = std::max(p02.worst, res02);
        const std::string label = "n=" + std::to_string(n) + " k=" + std::to_string(k) + " " + detail::describe(mu);
        detail::record(p04, worst04 <= p04.tolerance, label);
        detail::record(p02, res02 <= p02.tolerance, label);

        double worst_schur = 0.0;
        double scale = 0.0;
        for (double v : partial) {
            scale = std::max(scale, std::abs(v));
        }
        for (std::size_t i = 0; i < mu.size(); ++i) {
            for (std::size_t j = 0; j < mu.size(); ++j) {
                if (mu[i] >= mu[j]) {
                    worst_schur = std::max(worst_schur, (partial[i] - partial[j]) / (1.0 + scale));
                }
            }
        }
        schur.worst = std::max(schur.worst, worst_schur);
        detail::record(schur, worst_schur <= schur.tolerance, label);
    }
    return {p04, p02, schur};
}

/// Injected S_k against subset enumeration on Gaussian vectors (not only cone samples).
inline CheckResult check_enumeration(const PropertySuiteConfig& cfg) {
    CheckResult c{"sk_vs_enumeration", 0, 0, 0.0, 1e-12, true, {}};
    std::mt19937_64 rng(cfg.seed + 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t count = (cfg.samples + 9) / 10;
    for (std::size_t s = 0; s < count; ++s) {
        const int n = 2 + static_cast<int>(s % static_cast<std::size_t>(std::max(1, cfg.n_max - 1)));
        std::vector<double> mu(static_cast<std::size_t>(n));
        for (auto& m : mu) {
            m = normal(rng);
        }
        for (int k = 0; k <= n; ++k) {
            double total = 0.0;
            double magnitude = 0.0;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                if (std::popcount(mask) != k) {
                    continue;
                }
                double prod = 1.0;
                for (int i = 0; i < n; ++i) {
                    if (mask & (1u << i)) {
                        prod *= mu[static_cast<std::size_t>(i)];
                    }
                }
                total += prod;
                magnitude += std::abs(prod);
            }
            const double rel = std::abs(cfg.sk(mu, k) - total) / (1.0 + magnitude);
            c.worst = std::max(c.worst, rel);
            detail::record(c, rel <= c.tolerance, "k=" + std::to_string(k) + " " + detail::describe(mu));
        }
    }
    return c;
}

/// f_gradient against central differences along real and imaginary entry
/// perturbations (relative 1e-5), and the trace identity (1e-8). Samples whose
/// difference stencil leaves the cone are redrawn.
inline std::vector<CheckResult> check_linearization(std::size_t samples, std::uint64_t seed) {
    CheckResult grad{"gradient_fd", 0, 0, 0.0, 1e-5, true, {}};
    CheckResult trace{"trace_identity", 0, 0, 0.0, 1e-8, true, {}};
    const auto cases = detail::operator_cases();
    std::mt19937_64 rng(seed + 2);
    for (std::size_t s = 0; grad.cases < samples && s < 100 * samples; ++s) {
        const auto p = cases[s % cases.size()];
        const auto a = detail::admissible_matrix(rng, p);
        const auto g = f_gradient(a, p);
        const int n = p.n;
        double scale = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                scale = std::max(scale, std::abs(g(i, j)));
            }
        }
        const double step = 1e-6 * std::max(1.0, a.max_abs_entry());
        double worst = 0.0;
        bool inside = true;
        auto diff = [&](const HermitianMatrix& e) {
            const auto plus = a + step * e;
            const auto minus = a - step * e;
            if (!admissible(mu_of_matrix(plus).mu, p) || !admissible(mu_of_matrix(minus).mu, p)) {
                inside = false;
                return 0.0;
            }
            return (f_value(plus, p) - f_value(minus, p)) / (2.0 * step);
        };
        for (int i = 0; i < n && inside; ++i) {
            for (int j = i; j < n && inside; ++j) {
                HermitianMatrix e(n);
                if (i == j) {
                    e.set_diagonal(i, 1.0);
                    worst = std::max(worst, std::abs(diff(e) - g(i, i).real()));
                } else {
                    e.set(i, j, {1.0, 0.0});
                    worst = std::max(worst, std::abs(diff(e) - 2.0 * g(i, j).real()));
                    HermitianMatrix ei(n);
                    ei.set(i, j, {0.0, 1.0});
                    // tr(G E) = 2 Im G_ij for e_ij = i.
                    worst = std::max(worst, std::abs(diff(ei) - 2.0 * g(i, j).imag()));
                }
            }
        }
        if (!inside) {
            continue;
        }
        const double rel = worst / scale;
        grad.worst = std::max(grad.worst, rel);
        const std::string label = "n=" + std::to_string(n) + " k=" + std::to_string(p.k) + " form=" + to_string(p.form);
        detail::record(grad, rel <= grad.tolerance, label);

        const double tr = trace_identity_residual(a, p) / std::max(1.0, std::abs(f_value(a, p)));
        trace.worst = std::max(trace.worst, tr);
        detail::record(trace, tr <= trace.tolerance, label);
    }
    return {grad, trace};
}

/// Second differences of t -> F(A + tH) on segments shrunk until admissible: <= 1e-6 (1 + |F(A)|).
inline CheckResult check_concavity(std::size_t samples, std::uint64_t seed) {
    CheckResult c{"concavity", 0, 0, 0.0, 1e-6, true, {}};
    const auto cases = detail::operator_cases();
    std::mt19937_64 rng(seed + 3);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto p = cases[s % cases.size()];
        const auto a = detail::admissible_matrix(rng, p);
        const auto h = detail::gaussian_hermitian(rng, p.n);
        double t = 1.0;
        for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
            bool ok = true;
            for (int m = -4; m <= 4 && ok; ++m) {
                ok = admissible(mu_of_matrix(a + (t * m / 4.0) * h).mu, p);
            }
            if (ok) {
                break;
            }
        }
        const double probe = concavity_probe(a, h, p, t) / (1.0 + std::abs(f_value(a, p)));
        c.worst = std::max(c.worst, probe);
        detail::record(c, probe <= c.tolerance,
                       "n=" + std::to_string(p.n) + " k=" + std::to_string(p.k) + " form=" + to_string(p.form));
    }
    return c;
}

/// min_i f_i / sum_i f_i >= 0.01 over Gamma_k samples, n <= 4, k < n. `worst` is the smallest ratio.
inline CheckResult check_ellipticity(std::size_t samples, std::uint64_t seed, double floor = 0.01) {
    CheckResult c{"ellipticity_floor", 0, 0, 1.0, floor, true, {}};
    std::vector<std::pair<int, int>> pairs;
    for (int n = 2; n <= 4; ++n) {
        for (int k = 1; k < n; ++k) {
            pairs.emplace_back(n, k);
        }
    }
    std::mt19937_64 rng(seed + 4);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto [n, k] = pairs[s % pairs.size()];
        const auto mu = detail::sample_gamma_k(rng, n, k);
        const auto f = f_partials(mu, {n, k, Form::Root, 0.0});
        double total = 0.0;
        double lo = f.front();
        for (double v : f) {
            total += v;
            lo = std::min(lo, v);
        }
        const double ratio = lo / total;
        c.worst = std::min(c.worst, ratio);
        detail::record(c, ratio >= floor, "n=" + std::to_string(n) + " k=" + std::to_string(k) + " " + detail::describe(mu));
    }
    if (c.cases == 0) {
        c.worst = 0.0;
    }
    return c;
}

/// |S_k(mu[Phi])| / (C(n,k) max|mu|^k) <= 1e-10 with the injected S_k, for every branch of
/// gamma_exponents(n, k), 2 <= n <= n_max, at `radii` log-spaced s in [1e-4, 1e2].
inline CheckResult check_fundamental(const PropertySuiteConfig& cfg, int radii = 50) {
    CheckResult c{"fundamental_residual", 0, 0, 0.0, 1e-10, true, {}};
    if (cfg.samples == 0) {
        return c;
    }
    for (int n = 2; n <= cfg.n_max; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (const auto& b : gamma_exponents(n, k).branches) {
                for (int i = 0; i < radii; ++i) {
                    const double s = std::pow(10.0, -4.0 + 6.0 * i / (radii - 1));
                    auto mu = radial_mu(phi_eval(b.gamma, s), n).vector();
                    double mx = 0.0;
                    for (double m : mu) {
                        mx = std::max(mx, std::abs(m));
                    }
                    for (double& m : mu) {
                        m /= mx;
                    }
                    const double rel = std::abs(cfg.sk(mu, k)) / binomial(n, k);
                    c.worst = std::max(c.worst, rel);
                    detail::record(c, rel <= c.tolerance,
                                   "n=" + std::to_string(n) + " k=" + std::to_string(k) + " gamma=" +
                                       std::to_string(b.gamma) + " s=" + std::to_string(s));
                }
            }
        }
    }
    return c;
}

struct PropertySuiteReport {
    std::vector<CheckResult> checks;
    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
};

inline PropertySuiteReport run_property_suite(const PropertySuiteConfig& cfg) {
    if (cfg.n_max < 2 || cfg.n_max > 12) {
        throw InvalidArgument("run_property_suite: n_max must lie in [2, 12]");
    }
    PropertySuiteReport r;
    for (auto& c : check_identities(cfg)) {
        r.checks.push_back(std::move(c));
    }
    r.checks.push_back(check_enumeration(cfg));
    for (auto& c : check_linearization(cfg.operator_samples(), cfg.seed)) {
        r.checks.push_back(std::move(c));
    }
    r.checks.push_back(check_concavity(cfg.operator_samples(), cfg.seed));
    r.checks.push_back(check_ellipticity(cfg.ellipticity_samples(), cfg.seed));
    r.checks.push_back(check_fundamental(cfg));
    return r;
}

}  // namespace hessgreen
