#pragma once

// JSON views of the library's reports (stable key order).

#include <cmath>
#include <vector>

#include <json.hpp>

#include "hessgreen/diagnostics.hpp"
#include "hessgreen/green_limit.hpp"
#include "hessgreen/grid_solver.hpp"
#include "hessgreen/property_suite.hpp"

namespace hessgreen::report {

using json = nlohmann::ordered_json;

/// Non-finite doubles become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) {
        a.push_back(number(x));
    }
    return a;
}

inline json to_json(const CheckResult& c) {
    return json{{"name", c.name},         {"cases", c.cases},         {"failures", c.failures},
                {"worst", number(c.worst)}, {"tolerance", c.tolerance}, {"pass", c.pass},
                {"failing", c.failing}};
}

inline json to_json(const RateFit& f) {
    json samples = json::array();
    for (const auto& s : f.samples) {
        samples.push_back(json{{"r", s.r}, {"value", number(s.value)}});
    }
    return json{{"window", json::array({f.r_min, f.r_max})},
                {"slope", number(f.slope)},
                {"intercept", number(f.intercept)},
                {"r_squared", number(f.r_squared)},
                {"samples", samples}};
}

inline json to_json(const SolveReport& r) {
    return json{{"converged", r.converged},
                {"iterations", r.iterations},
                {"residual_history", numbers(r.residual_history)},
                {"linear_iterations", r.linear_iterations},
                {"linear_errors", numbers(r.linear_errors)},
                {"halvings", r.halvings},
                {"all_iterates_admissible", r.all_iterates_admissible},
                {"active_nodes", r.active_nodes},
                {"dirichlet_nodes", r.dirichlet_nodes}};
}

inline json to_json(const GreenLevel& l) {
    return json{{"eps", l.eps},
                {"ok", l.ok},
                {"failure", l.failure},
                {"inner_value", number(l.inner_value)},
                {"outer_value", number(l.outer_value)},
                {"newton_iters", l.newton_iters},
                {"residual_norm", number(l.residual_norm)},
                {"residual_history", l.solution ? numbers(l.solution->residual_history) : json::array()},
                {"C0", number(l.C0)},
                {"sandwich_violation", number(l.sandwich_violation)}};
}

inline json to_json(const ScalingDiagnostic& d) {
    return json{{"eps", d.eps}, {"sup", numbers(d.sup)}, {"bound", number(d.bound)}, {"bounded", d.bounded}};
}

}  // namespace hessgreen::report
