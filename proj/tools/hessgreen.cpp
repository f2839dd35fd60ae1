// hessgreen: command-line front end for the k-Hessian Green-function solvers.
//
// Exit codes: 0 success, 1 numerical or diagnostic failure, 2 configuration error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hessgreen/diagnostics.hpp"
#include "hessgreen/fundamental.hpp"
#include "hessgreen/green_limit.hpp"
#include "hessgreen/grid_solver.hpp"
#include "hessgreen/io.hpp"
#include "hessgreen/property_suite.hpp"
#include "hessgreen/radial_solver.hpp"
#include "report_json.hpp"

namespace {

using namespace hessgreen;
using report::json;
using report::number;
using report::numbers;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open " + path);
    }
    out << text;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("not a number list: " + text);
        }
    }
    return values;
}

Form parse_form(const std::string& form, int k, int n) {
    if (form == "auto") {
        return k == n ? Form::Log : Form::Root;
    }
    if (form == "root") {
        return Form::Root;
    }
    if (form == "log") {
        return Form::Log;
    }
    throw ConfigError("form must be auto, root or log");
}

// ---------------------------------------------------------------------------
// Radial commands

struct RadialOptions {
    int n = 3;
    int k = 2;
    std::string form = "auto";
    double gamma = 0.0;
    bool log_profile = false;
    double R = 1.0;
    double boundary = 0.0;
    std::string inner = "subsolution";
    double eps = 0.2;            // radial-solve
    double eps0 = 0.2;           // radial-green: eps_j = eps0 2^{-j}
    int levels = 7;
    std::string probes = "0.3,0.5,0.7";
    int M = 512;
    int terms = 2;
    double window_min = 0.02;
    double window_max = 0.1;
    int rate_samples = 10;
    double limit_tolerance = 1e-4;
    std::uint64_t seed = 42;
    std::string csv;
    std::string json_path;
};

void add_radial_options(CLI::App* cmd, RadialOptions& o, bool green) {
    cmd->add_option("--n", o.n, "complex dimension")->capture_default_str();
    cmd->add_option("--k", o.k, "Hessian degree")->capture_default_str();
    cmd->add_option("--form", o.form, "auto, root or log")->capture_default_str();
    cmd->add_option("--gamma", o.gamma, "singular exponent (a branch of the gamma table)");
    cmd->add_flag("--log-profile", o.log_profile, "use log|z|^2 (n = 2, k = 2)");
    cmd->add_option("--R", o.R, "ball radius")->capture_default_str();
    cmd->add_option("--boundary", o.boundary, "boundary constant on |z| = R")->capture_default_str();
    cmd->add_option("--inner", o.inner, "inner data: subsolution or exact")->capture_default_str();
    cmd->add_option("--M", o.M, "log-mesh intervals")->capture_default_str();
    cmd->add_option("--seed", o.seed, "seed (recorded; the radial path is deterministic)")->capture_default_str();
    cmd->add_option("--csv", o.csv, "CSV output path");
    cmd->add_option("--json", o.json_path, "JSON report path (stdout when empty)");
    if (green) {
        cmd->add_option("--eps0", o.eps0, "largest eps")->capture_default_str();
        cmd->add_option("--levels", o.levels, "number of eps levels, eps_j = eps0 2^-j")->capture_default_str();
        cmd->add_option("--probes", o.probes, "comma-separated probe radii")->capture_default_str();
        cmd->add_option("--terms", o.terms, "Richardson correction terms")->capture_default_str();
        cmd->add_option("--window-min", o.window_min, "rate window start")->capture_default_str();
        cmd->add_option("--window-max", o.window_max, "rate window end")->capture_default_str();
        cmd->add_option("--rate-samples", o.rate_samples, "radii per rate fit")->capture_default_str();
        cmd->add_option("--limit-tolerance", o.limit_tolerance, "exact-data limit tolerance")->capture_default_str();
    } else {
        cmd->add_option("--eps", o.eps, "puncture radius and right-hand side")->capture_default_str();
    }
}

json radial_config_json(const RadialOptions& o, bool green) {
    json j{{"n", o.n},           {"k", o.k},
           {"form", o.form},     {"gamma", o.log_profile ? json(nullptr) : json(o.gamma)},
           {"log_profile", o.log_profile},
           {"R", o.R},           {"boundary", o.boundary},
           {"inner", o.inner},   {"M", o.M},
           {"seed", o.seed}};
    if (green) {
        j["eps0"] = o.eps0;
        j["levels"] = o.levels;
        j["probes"] = numbers(parse_list(o.probes));
        j["terms"] = o.terms;
        j["window"] = json::array({o.window_min, o.window_max});
        j["rate_samples"] = o.rate_samples;
        j["limit_tolerance"] = o.limit_tolerance;
    } else {
        j["eps"] = o.eps;
    }
    return j;
}

/// Validated Green-limit configuration from the options.
GreenLimitConfig green_config(const RadialOptions& o, const std::vector<double>& eps) {
    if (o.n < 2 || o.k < 1 || o.k > o.n) {
        throw ConfigError("need n >= 2 and 1 <= k <= n");
    }
    OperatorParams p{o.n, o.k, parse_form(o.form, o.k, o.n), 0.0};
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    GreenLimitConfig cfg;
    cfg.params = p;
    if (o.log_profile) {
        if (o.n != 2 || o.k != 2) {
            throw ConfigError("--log-profile requires n = 2, k = 2");
        }
        cfg.profile = SingularProfile::logarithmic();
    } else {
        const auto table = gamma_exponents(o.n, o.k);
        bool found = false;
        for (const auto& b : table.branches) {
            found = found || std::abs(b.gamma - o.gamma) <= 1e-9 * b.gamma;
        }
        if (!found) {
            std::string msg = "gamma " + std::to_string(o.gamma) + " is not a branch of the table for (n, k)";
            for (const auto& d : table.diagnostics) {
                msg += "; " + d;
            }
            throw ConfigError(msg);
        }
        cfg.profile = SingularProfile::power(o.gamma);
    }
    if (o.inner == "subsolution") {
        cfg.inner = InnerData::Subsolution;
    } else if (o.inner == "exact") {
        cfg.inner = InnerData::ExactHomogeneous;
    } else {
        throw ConfigError("inner must be subsolution or exact");
    }
    if (o.M < 32) {
        throw ConfigError("M must be >= 32");
    }
    cfg.R = o.R;
    cfg.boundary_constant = o.boundary;
    cfg.eps_schedule = eps;
    cfg.M = o.M;
    cfg.extrapolation_terms = o.terms;
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

int cmd_radial_solve(const RadialOptions& o) {
    auto cfg = green_config(o, {o.eps});
    const auto setup = green_level_setup(cfg, o.eps);
    json j{{"command", "radial-solve"}, {"config", radial_config_json(o, false)}};
    try {
        const auto sol = solve_radial(setup.problem, setup.lower, cfg.solver);
        j["converged"] = true;
        j["admissible"] = sol.admissible;
        j["newton_iters"] = sol.newton_iters;
        j["residual_norm"] = number(sol.residual_norm);
        j["residual_history"] = numbers(sol.residual_history);
        j["inner_value"] = setup.problem.inner_value;
        j["outer_value"] = setup.problem.outer_value;
        if (!o.csv.empty()) {
            std::vector<std::vector<double>> rows;
            for (std::size_t q = 0; q < sol.t.size(); ++q) {
                const double s = std::exp(sol.t[q]);
                rows.push_back({s, std::sqrt(s), sol.phi[q], sol.dphi[q], sol.d2phi[q]});
            }
            write_csv(o.csv, {"s", "r", "u", "du_ds", "d2u_ds2"}, rows);
        }
        emit(j, o.json_path);
        return sol.admissible ? kExitOk : kExitFailure;
    } catch (const SolverFailure& e) {
        j["converged"] = false;
        j["failure"] = e.what();
        j["residual_history"] = numbers(e.residual_history());
        emit(j, o.json_path);
        return kExitFailure;
    }
}

struct GreenOutcome {
    json j;
    bool pass = false;
};

GreenOutcome run_green(const RadialOptions& o, const std::string& command) {
    if (o.levels < 1) {
        throw ConfigError("levels must be >= 1");
    }
    std::vector<double> eps;
    for (int j = 0; j < o.levels; ++j) {
        eps.push_back(o.eps0 * std::pow(0.5, j));
    }
    auto cfg = green_config(o, eps);
    cfg.probe_radii = parse_list(o.probes);
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (o.rate_samples < 6) {
        throw ConfigError("rate-samples must be >= 6");
    }
    const auto rep = green_limit(cfg);

    json j{{"command", command}, {"config", radial_config_json(o, true)}};
    j["limit_exponent"] = rep.exponent;
    json levels = json::array();
    for (const auto& l : rep.levels) {
        levels.push_back(report::to_json(l));
    }
    j["levels"] = levels;

    bool pass = rep.all_solved;
    json probes = json::array();
    double worst_limit_error = 0.0;
    for (std::size_t i = 0; i < cfg.probe_radii.size(); ++i) {
        json pj{{"r", cfg.probe_radii[i]},
                {"values", numbers(rep.values[i])},
                {"cauchy", numbers(rep.cauchy[i])},
                {"extrapolated", number(rep.extrapolated[i])}};
        if (!rep.reference.empty()) {
            const double err = std::abs(rep.extrapolated[i] - rep.reference[i]);
            pj["reference"] = rep.reference[i];
            pj["error"] = number(err);
            worst_limit_error = std::isfinite(err) ? std::max(worst_limit_error, err)
                                                   : std::numeric_limits<double>::infinity();
        }
        probes.push_back(pj);
    }
    j["probes"] = probes;
    if (!rep.reference.empty()) {
        const bool ok = worst_limit_error <= o.limit_tolerance;
        j["limit_check"] = json{{"worst_error", number(worst_limit_error)}, {"tolerance", o.limit_tolerance}, {"pass", ok}};
        pass = pass && ok;
    }
    j["monotonicity"] = json{{"pass", rep.monotonicity_ok},
                             {"worst_gap", number(rep.worst_monotonicity_gap)},
                             {"slack", cfg.monotonicity_slack}};
    j["sandwich"] = json{{"pass", rep.sandwich_ok},
                         {"worst_violation", number(rep.worst_sandwich_violation)},
                         {"tolerance", cfg.sandwich_tolerance}};
    pass = pass && rep.monotonicity_ok && rep.sandwich_ok;

    // Rates on the finest solved level.
    const GreenLevel* finest = nullptr;
    for (const auto& l : rep.levels) {
        if (l.ok) {
            finest = &l;
        }
    }
    json rates{{"level_eps", finest ? json(finest->eps) : json(nullptr)}};
    if (cfg.profile.kind == SingularProfile::Kind::Log) {
        rates["note"] = "log profile: no power-law exponent";
    } else if (!finest || !(o.window_min > std::sqrt(finest->solution->s_min())) || !(o.window_max < o.R) ||
               !(o.window_min < o.window_max)) {
        rates["note"] = "window not inside the finest solved annulus";
        pass = false;
    } else {
        const auto radii = log_spaced(o.window_min, o.window_max, o.rate_samples);
        const double g = cfg.profile.gamma;
        const auto value = fit_rate(sphere_profile(*finest->solution, radii, Quantity::Value));
        const auto grad = fit_rate(sphere_profile(*finest->solution, radii, Quantity::Gradient));
        const auto hess = fit_rate(sphere_profile(*finest->solution, radii, Quantity::HessianNorm));
        const bool value_ok = std::abs(value.slope + g) <= 0.05 * g;
        const bool grad_ok = std::abs(grad.slope + g + 1.0) <= 0.05 * (g + 1.0);
        rates["value"] = report::to_json(value);
        rates["value_expected"] = -g;
        rates["value_pass"] = value_ok;
        rates["gradient"] = report::to_json(grad);
        rates["gradient_expected"] = -(g + 1.0);
        rates["gradient_pass"] = grad_ok;
        rates["hessian"] = report::to_json(hess);
        pass = pass && value_ok && grad_ok;
        j["scaling"] = report::to_json(scaling_diagnostic(rep, g));
    }
    j["rates"] = rates;
    j["pass"] = pass;

    if (!o.csv.empty()) {
        std::vector<std::vector<double>> rows;
        for (const auto& l : rep.levels) {
            if (!l.ok) {
                continue;
            }
            const auto& sol = *l.solution;
            for (std::size_t q = 0; q < sol.t.size(); ++q) {
                const double s = std::exp(sol.t[q]);
                rows.push_back({l.eps, std::sqrt(s), sol.phi[q], sol.dphi[q]});
            }
        }
        write_csv(o.csv, {"eps", "r", "u", "du_ds"}, rows);
    }
    return {j, pass};
}

// ---------------------------------------------------------------------------
// Grid command

struct GridOptions {
    int k = 1;
    double eps = 0.25;
    double h = 0.0625;
    double R = 1.0;
    double boundary = 0.0;
    std::string data = "auto";
    std::string init = "data";
    std::string dump;
    std::string csv;
    std::string json_path;
};

int cmd_grid_solve(const GridOptions& o) {
    if (o.k != 1 && o.k != 2) {
        throw ConfigError("grid-solve: k must be 1 or 2 (n = 2)");
    }
    if (!(o.h > 0.0) || std::abs(o.R / o.h - std::round(o.R / o.h)) > 1e-9 * (o.R / o.h)) {
        throw ConfigError("grid-solve: h must divide R");
    }
    if (!(o.eps > 0.0) || !(o.eps < o.R)) {
        throw ConfigError("grid-solve: need 0 < eps < R");
    }
    if (o.data != "auto" && o.data != "subsolution" && o.data != "manufactured") {
        throw ConfigError("grid-solve: data must be auto, subsolution or manufactured");
    }
    if (o.init != "data" && o.init != "perturbed") {
        throw ConfigError("grid-solve: init must be data or perturbed");
    }
    const auto p = default_params(2, o.k, o.eps);
    // The -|z|^{-2} part of the k = 1 subsolution has a negative discrete Laplacian
    // near the puncture, so k = 1 defaults to the manufactured data.
    const std::string data_kind = o.data != "auto" ? o.data : (o.k == 1 ? "manufactured" : "subsolution");
    std::function<double(const Eigen::VectorXd&)> data;
    if (data_kind == "subsolution") {
        const auto sub = grid_ball_subsolution(o.k, o.R, o.boundary);
        data = [sub](const Eigen::VectorXd& x) { return sub.value(x); };
    } else {
        data = manufactured_solution(o.k, o.eps);
    }
    const auto grid = Grid4::build(DomainSpec::ball(2, o.R), o.eps, o.h);
    auto init = make_field(grid, data, data);
    const Eigen::VectorXd data_active = init.active;
    if (o.init == "perturbed") {
        init.active += sample_nodes(grid, grid.active_nodes(), shell_perturbation(o.R, o.eps, 0.01));
    }

    json j{{"command", "grid-solve"},
           {"config", json{{"n", 2},
                           {"k", o.k},
                           {"form", to_string(p.form)},
                           {"eps", o.eps},
                           {"h", o.h},
                           {"R", o.R},
                           {"boundary", o.boundary},
                           {"data", data_kind},
                           {"init", o.init}}},
           {"grid", json{{"nodes_per_axis", grid.nodes_per_axis()},
                         {"active", grid.active_count()},
                         {"dirichlet", grid.dirichlet_count()}}}};
    try {
        const auto sol = solve_grid(init, p);
        j["report"] = report::to_json(sol.report);
        const Eigen::VectorXd diff = sol.field.active - data_active;
        if (data_kind == "subsolution") {
            j["comparison_min_gap"] = diff.minCoeff();
        } else {
            j["manufactured_max_error"] = diff.cwiseAbs().maxCoeff();
        }
        if (!o.dump.empty()) {
            write_field_dump(o.dump, sol.field);
        }
        if (!o.csv.empty()) {
            write_csv(o.csv, {"x1", "y1", "u", "kind"}, grid_slice(sol.field));
        }
        emit(j, o.json_path);
        return kExitOk;
    } catch (const SolverFailure& e) {
        j["failure"] = e.what();
        j["residual_history"] = numbers(e.residual_history());
        emit(j, o.json_path);
        return kExitFailure;
    }
}

// ---------------------------------------------------------------------------
// Config files: keys of a JSON object become --key value flags placed before
// the command-line flags, so explicit flags win.

std::vector<std::string> config_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path);
    }
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    std::vector<std::string> args;
    for (const auto& [key, value] : cfg.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                args.push_back("--" + key);
            }
            continue;
        }
        args.push_back("--" + key);
        if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
            }
            args.push_back(joined);
        } else {
            args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return args;
}

/// argv with "--config PATH" expanded in place after the command name.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> in(argv + 1, argv + argc);
    std::vector<std::string> out;
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == "--config" && i + 1 < in.size()) {
            path = in[++i];
        } else if (in[i].rfind("--config=", 0) == 0) {
            path = in[i].substr(9);
        } else {
            rest.push_back(in[i]);
        }
    }
    if (path.empty() || rest.empty()) {
        return rest;
    }
    out.push_back(rest.front());
    for (auto& a : config_arguments(path)) {
        out.push_back(std::move(a));
    }
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hessgreen: Green functions of complex k-Hessian equations"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_help_all_flag("--help-all");
    std::string config_path;

    int result = kExitOk;

    // gamma
    int g_n = 3;
    int g_k = 2;
    std::string g_json;
    auto* gamma = app.add_subcommand("gamma", "print the exponent table");
    gamma->add_option("--n", g_n, "complex dimension")->capture_default_str();
    gamma->add_option("--k", g_k, "Hessian degree")->capture_default_str();
    gamma->add_option("--json", g_json, "JSON output path");

    // verify
    PropertySuiteConfig v_cfg;
    std::size_t v_samples = v_cfg.samples;
    bool v_canary = false;
    std::string v_json;
    auto* verify = app.add_subcommand("verify", "run the property suite");
    verify->add_option("--n-max", v_cfg.n_max, "largest n")->capture_default_str();
    verify->add_option("--samples", v_samples, "cone samples for the identity checks")->capture_default_str();
    verify->add_option("--seed", v_cfg.seed, "random seed")->capture_default_str();
    verify->add_flag("--canary", v_canary, "evaluate with a sign-corrupted S_k recurrence (must fail)");
    verify->add_option("--json", v_json, "JSON report path (stdout when empty)");

    // fundamental-check
    int f_nmax = 6;
    int f_radii = 50;
    std::string f_json;
    auto* fundamental = app.add_subcommand("fundamental-check", "S_k residuals of the fundamental solutions");
    fundamental->add_option("--n-max", f_nmax, "largest n")->capture_default_str();
    fundamental->add_option("--radii", f_radii, "log-spaced s samples in [1e-4, 1e2]")->capture_default_str();
    fundamental->add_option("--json", f_json, "JSON report path (stdout when empty)");

    RadialOptions rs;
    auto* radial_solve = app.add_subcommand("radial-solve", "solve one radial approximating problem");
    add_radial_options(radial_solve, rs, false);

    RadialOptions rg;
    auto* radial_green = app.add_subcommand("radial-green", "eps -> 0 Green limit on a ball");
    add_radial_options(radial_green, rg, true);

    RadialOptions rr;
    auto* rates = app.add_subcommand("rates", "blow-up exponent fits of a radial Green run");
    add_radial_options(rates, rr, true);

    GridOptions go;
    auto* grid = app.add_subcommand("grid-solve", "finite-difference solve on an n = 2 grid");
    grid->set_help_flag("--help", "print this help message and exit");
    grid->add_option("--k", go.k, "1 or 2")->capture_default_str();
    grid->add_option("--eps", go.eps, "puncture radius and right-hand side")->capture_default_str();
    grid->add_option("--h", go.h, "grid spacing")->capture_default_str();
    grid->add_option("--R", go.R, "ball radius")->capture_default_str();
    grid->add_option("--boundary", go.boundary, "boundary constant")->capture_default_str();
    grid->add_option("--data", go.data, "auto (manufactured for k = 1, subsolution for k = 2), subsolution or manufactured")->capture_default_str();
    grid->add_option("--init", go.init, "data or perturbed")->capture_default_str();
    grid->add_option("--dump", go.dump, "binary field dump path");
    grid->add_option("--csv", go.csv, "CSV slice path");
    grid->add_option("--json", go.json_path, "JSON report path (stdout when empty)");

    for (auto* sub : app.get_subcommands({})) {
        sub->add_option("--config", config_path, "JSON config file; flags override it");
    }

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (*gamma) {
            if (g_n < 2 || g_k < 1 || g_k > g_n) {
                throw ConfigError("need n >= 2 and 1 <= k <= n");
            }
            const auto table = gamma_exponents(g_n, g_k);
            json rows = json::array();
            for (const auto& b : table.branches) {
                std::cout << to_string(b.branch) << ": " << b.gamma << "\n";
                rows.push_back(json{{"branch", to_string(b.branch)}, {"gamma", b.gamma}});
            }
            for (const auto& d : table.diagnostics) {
                std::cout << "note: " << d << "\n";
            }
            if (!g_json.empty()) {
                emit(json{{"n", g_n}, {"k", g_k}, {"branches", rows}, {"diagnostics", table.diagnostics}}, g_json);
            }
        } else if (*verify) {
            v_cfg.samples = v_samples;
            if (v_canary) {
                v_cfg.sk = negated_sign_sk();
            }
            const auto rep = run_property_suite(v_cfg);
            json checks = json::array();
            for (const auto& c : rep.checks) {
                checks.push_back(report::to_json(c));
            }
            emit(json{{"command", "verify"},
                      {"config", json{{"n_max", v_cfg.n_max},
                                      {"samples", v_cfg.samples},
                                      {"seed", v_cfg.seed},
                                      {"canary", v_canary}}},
                      {"checks", checks},
                      {"pass", rep.pass()}},
                 v_json);
            result = rep.pass() ? kExitOk : kExitFailure;
        } else if (*fundamental) {
            if (f_nmax < 2 || f_radii < 2) {
                throw ConfigError("need n-max >= 2 and radii >= 2");
            }
            PropertySuiteConfig cfg;
            cfg.n_max = f_nmax;
            const auto c = check_fundamental(cfg, f_radii);
            json branches = json::array();
            for (int n = 2; n <= f_nmax; ++n) {
                for (int k = 1; k <= n; ++k) {
                    for (const auto& b : gamma_exponents(n, k).branches) {
                        branches.push_back(json{{"n", n},
                                                {"k", k},
                                                {"branch", to_string(b.branch)},
                                                {"gamma", b.gamma},
                                                {"admissible", branch_admissible(b)}});
                    }
                }
            }
            emit(json{{"command", "fundamental-check"},
                      {"config", json{{"n_max", f_nmax}, {"radii", f_radii}}},
                      {"branches", branches},
                      {"check", report::to_json(c)},
                      {"pass", c.pass}},
                 f_json);
            result = c.pass ? kExitOk : kExitFailure;
        } else if (*radial_solve) {
            result = cmd_radial_solve(rs);
        } else if (*radial_green) {
            auto out = run_green(rg, "radial-green");
            emit(out.j, rg.json_path);
            result = out.pass ? kExitOk : kExitFailure;
        } else if (*rates) {
            auto out = run_green(rr, "rates");
            json j{{"command", "rates"}, {"config", out.j["config"]}, {"rates", out.j["rates"]}};
            if (out.j.contains("scaling")) {
                j["scaling"] = out.j["scaling"];
            }
            const bool ok = out.j["rates"].value("value_pass", false) && out.j["rates"].value("gradient_pass", false);
            j["pass"] = ok;
            emit(j, rr.json_path);
            result = ok ? kExitOk : kExitFailure;
        } else if (*grid) {
            result = cmd_grid_solve(go);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return result;
}
