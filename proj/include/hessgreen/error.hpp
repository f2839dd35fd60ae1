#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hessgreen {

/// Precondition or argument-range violation.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A spectrum that was required to lie in an open Garding cone does not.
class ConeViolation : public std::domain_error {
public:
    ConeViolation(const std::string& what, std::vector<double> mu)
        : std::domain_error(what), mu_(std::move(mu)) {}

    const std::vector<double>& mu() const noexcept { return mu_; }

private:
    std::vector<double> mu_;
};

/// Operator evaluated at a matrix whose mu-spectrum is outside the admissible cone.
/// Solvers catch this to drive step damping.
class InadmissiblePoint : public ConeViolation {
public:
    using ConeViolation::ConeViolation;
};

/// Eigensolver breakdown, linear-solver stagnation and similar.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Newton driver gave up. Carries the max-norm residual after every iteration.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}

    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Subsolution construction could not reach the requested level.
class ConstructionFailure : public std::runtime_error {
public:
    ConstructionFailure(const std::string& what, std::vector<double> point)
        : std::runtime_error(what), point_(std::move(point)) {}

    /// Real coordinates of the sample point that violated the bound.
    const std::vector<double>& point() const noexcept { return point_; }

private:
    std::vector<double> point_;
};

/// Grid invariant broken (stencil reaches an unused node, puncture too close to the box).
class GridConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hessgreen
