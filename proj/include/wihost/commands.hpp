/*
* Copyright (C) 2026 The wihost Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#pragma once

#include "wihost/analysis.hpp"
#include "wihost/config.hpp"
#include "wihost/csv.hpp"
#include "wihost/error.hpp"
#include "wihost/periodic.hpp"
#include "wihost/reproduction.hpp"
#include "wihost/svg.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wihost::cli
{

enum ExitCode : int
{
    Ok = 0,
    ConfigError = 2,
    NumericalFailure = 3,
    InvariantViolation = 4,
};

inline int exit_code_for(ErrorCode code)
{
    return is_numerical(code) ? NumericalFailure : ConfigError;
}

/// Runs `body`, turning a library error into one "error: <Category>: <message>" line on `err`.
inline int guarded(const std::function<int()>& body, std::ostream& err = std::cerr)
{
    try {
        return body();
    }
    catch (const Error& e) {
        err << "error: " << e.category() << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    catch (const std::exception& e) {
        err << "error: IoError: " << e.what() << "\n";
        return ConfigError;
    }
}

namespace detail
{

inline const std::vector<State>& require_initial_conditions(const RunConfig& cfg, const char* command)
{
    if (cfg.initial_conditions.empty()) {
        throw Error(ErrorCode::ValidationError,
                    std::string("run.initial_conditions: ") + command + " needs at least one initial condition");
    }
    return cfg.initial_conditions;
}

inline std::string require_path(const std::string& flag, const std::string& fallback, const char* name)
{
    const std::string path = flag.empty() ? fallback : flag;
    if (path.empty()) {
        throw Error(ErrorCode::ValidationError, std::string(name) + ": no output path given");
    }
    return path;
}

/// "out/run.csv", 2 -> "out/run_ic2.csv"
inline std::string with_suffix(const std::string& path, const std::string& suffix)
{
    const std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path() / (p.stem().string() + suffix + p.extension().string());
    return out.string();
}

inline svg::Series column(const Trajectory& traj, int x_index, int y_index, std::string label)
{
    svg::Series s;
    s.label = std::move(label);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const StateVector v = traj.states[i].vector();
        s.x.push_back(x_index < 0 ? traj.times[i] : v[x_index]);
        s.y.push_back(v[y_index]);
    }
    return s;
}

} // namespace detail

struct SimulateOptions {
    std::optional<double> t_end; ///< defaults to the configured horizon
    std::string out;
    std::string svg;
    double grid_step{0.5};
};

/**
 * @brief Trajectories for every configured initial condition, sampled on a uniform grid.
 *
 * With one initial condition the CSV goes to `out`; with several, to `<stem>_ic<k><ext>`
 * (k counted from 1). The SVG shows T, E, I and V in a 2x2 grid.
 */
inline int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opts, std::ostream& out = std::cout)
{
    const auto& ics = detail::require_initial_conditions(cfg, "simulate");
    const double t_end = opts.t_end.value_or(cfg.horizon);
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw Error(ErrorCode::ValidationError, "--t-end: must be finite and > 0");
    }
    if (!(opts.grid_step > 0.0) || !std::isfinite(opts.grid_step)) {
        throw Error(ErrorCode::ValidationError, "--grid-step: must be finite and > 0");
    }
    const std::string csv_path = detail::require_path(opts.out, cfg.csv_out, "--out");
    const std::string svg_path = opts.svg.empty() ? cfg.svg_out : opts.svg;

    std::vector<Trajectory> runs;
    for (const State& x0 : ics) {
        runs.push_back(simulate(cfg.model, x0, t_end, cfg.integrator, opts.grid_step));
    }
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const std::string path =
            runs.size() == 1 ? csv_path : detail::with_suffix(csv_path, "_ic" + std::to_string(k + 1));
        trajectory_table(runs[k]).write(path);
        out << "wrote " << path << " (" << runs[k].times.size() << " rows)\n";
    }
    if (!svg_path.empty()) {
        const char* names[] = {"T", "E", "I", "V"};
        const char* titles[] = {"Uninfected target cells T", "Latently infected cells E",
                                "Productively infected cells I", "Free virus V"};
        std::vector<svg::Panel> panels;
        for (int c = 0; c < 4; ++c) {
            svg::Panel panel{titles[c], "t (hours)", names[c], {}};
            for (std::size_t k = 0; k < runs.size(); ++k) {
                const State& s = ics[k];
                panel.series.push_back(detail::column(
                    runs[k], -1, c,
                    "(" + format_number(s.t_cells) + ", " + format_number(s.e_cells) + ", " +
                        format_number(s.i_cells) + ", " + format_number(s.virus) + ")"));
            }
            panels.push_back(std::move(panel));
        }
        svg::write(svg_path, panels, 2);
        out << "wrote " << svg_path << "\n";
    }
    return Ok;
}

struct R0Options {
    double tol{1e-8};
};

/// Human-readable lines followed by one JSON line with the same numbers.
inline int cmd_r0(const RunConfig& cfg, const R0Options& opts, std::ostream& out = std::cout)
{
    if (!(opts.tol > 0.0)) {
        throw Error(ErrorCode::ValidationError, "--tol: must be > 0");
    }
    const R0Result r = r0_periodic(cfg.model, opts.tol);
    const double autonomous = r0_autonomous(cfg.model);
    out << "R0 = " << format_number(r.value) << "\n"
        << "method = " << to_string(r.method) << "\n"
        << "rho_FG = " << format_number(r.rho_at_one) << "\n";
    if (!r.no_infection()) {
        out << "bracket = [" << format_number(r.lambda_lo) << ", " << format_number(r.lambda_hi) << "]\n"
            << "rho_bracket = [" << format_number(r.rho_lo) << ", " << format_number(r.rho_hi) << "]\n";
    }
    out << "iterations = " << r.iterations << "\n"
        << "evaluations = " << r.evaluations << "\n"
        << "R0_time_averaged = " << format_number(autonomous) << "\n";

    nlohmann::json j;
    j["R0"] = r.value;
    j["method"] = std::string(to_string(r.method));
    j["rho_FG"] = r.rho_at_one;
    j["bracket"] = {r.lambda_lo, r.lambda_hi};
    j["rho_bracket"] = {r.rho_lo, r.rho_hi};
    j["iterations"] = r.iterations;
    j["evaluations"] = r.evaluations;
    j["tol"] = opts.tol;
    j["R0_time_averaged"] = autonomous;
    j["period"] = cfg.model.period();
    out << j.dump() << "\n";
    return Ok;
}

struct OrbitOptions {
    double transient{2000.0};
    double newton_tol{1e-10};
    std::string out;
    std::string svg_prefix;
};

/**
 * @brief Warm start from the first initial condition, Newton shooting, one period of samples.
 *
 * Writes `out` (t,T,E,I,V), `<stem>_multipliers<ext>` and, with `svg_prefix`, the phase
 * planes `<prefix>_I_V.svg`, `<prefix>_T_V.svg`, `<prefix>_E_V.svg`.
 */
inline int cmd_orbit(const RunConfig& cfg, const OrbitOptions& opts, std::ostream& out = std::cout)
{
    const auto& ics = detail::require_initial_conditions(cfg, "orbit");
    if (!(opts.transient >= 0.0) || !std::isfinite(opts.transient)) {
        throw Error(ErrorCode::ValidationError, "--transient: must be finite and >= 0");
    }
    if (!(opts.newton_tol > 0.0)) {
        throw Error(ErrorCode::ValidationError, "--newton-tol: must be > 0");
    }
    const std::string csv_path = detail::require_path(opts.out, cfg.csv_out, "--out");

    State guess = ics.front();
    if (opts.transient >= cfg.model.period()) {
        guess = warm_start(cfg.model, guess, opts.transient, cfg.integrator);
    }
    NewtonOptions newton;
    newton.tolerance = opts.newton_tol;
    const PeriodicOrbit orbit = find_periodic_orbit(cfg.model, guess, IntegratorConfig::precise(), newton);

    trajectory_table(orbit.samples).write(csv_path);
    const std::string mult_path = detail::with_suffix(csv_path, "_multipliers");
    CsvTable mult({"index", "real", "imag", "modulus"});
    for (std::size_t i = 0; i < orbit.floquet_multipliers.size(); ++i) {
        const auto m = orbit.floquet_multipliers[i];
        mult.add({std::to_string(i + 1), format_number(m.real()), format_number(m.imag()),
                  format_number(std::abs(m))});
    }
    mult.write(mult_path);

    const State& x = orbit.initial_state;
    out << "orbit start = (" << format_number(x.t_cells) << ", " << format_number(x.e_cells) << ", "
        << format_number(x.i_cells) << ", " << format_number(x.virus) << ")\n"
        << "newton residual = " << format_number(orbit.newton_residual) << " after " << orbit.newton_iterations
        << " iterations\n"
        << "closure defect = " << format_number(orbit.closure_defect) << "\n"
        << "stable = " << (orbit.stable ? "yes" : "no") << ", margin = " << format_number(orbit.stability_margin)
        << "\n"
        << "wrote " << csv_path << "\n"
        << "wrote " << mult_path << "\n";

    if (!opts.svg_prefix.empty()) {
        struct Plane {
            int x;
            const char* name;
            const char* title;
        };
        const Plane planes[] = {{kI, "I", "Limit cycle, I-V plane"},
                                {kT, "T", "Limit cycle, T-V plane"},
                                {kE, "E", "Limit cycle, E-V plane"}};
        for (const Plane& pl : planes) {
            svg::Panel panel{pl.title, pl.name, "V", {detail::column(orbit.samples, pl.x, kV, "")}};
            const std::string path = opts.svg_prefix + "_" + pl.name + "_V.svg";
            svg::write(path, {panel});
            out << "wrote " << path << "\n";
        }
    }
    return Ok;
}

struct SweepOptions {
    std::string param;
    std::vector<double> values;
    std::string out;
};

/// CSV columns: value, R0, rho_FG, method, regime, status ("ok" or the error line).
inline int cmd_sweep(const RunConfig& cfg, const SweepOptions& opts, std::ostream& out = std::cout)
{
    if (opts.param.empty()) {
        throw Error(ErrorCode::ValidationError, "--param: required");
    }
    const std::string csv_path = detail::require_path(opts.out, cfg.csv_out, "--out");
    // classification needs a long window; a short simulate-style horizon falls back to 200 periods
    const double period = cfg.model.period();
    const double horizon = cfg.horizon >= 50.0 * period ? cfg.horizon : 200.0 * period;
    const auto rows = sweep(cfg.model, opts.param, opts.values, horizon, cfg.initial_conditions, cfg.integrator);
    CsvTable table({"value", "R0", "rho_FG", "method", "regime", "status"});
    std::size_t failed = 0;
    for (const SweepRow& row : rows) {
        std::string status = row.valid && row.error.empty() ? "ok" : row.error;
        for (char& ch : status) {
            if (ch == ',' || ch == '\n') {
                ch = ';';
            }
        }
        failed += status != "ok";
        const bool ok = status == "ok";
        table.add({format_number(row.value), format_number(row.r0), format_number(row.rho_infection),
                   ok ? std::string(to_string(row.method)) : "", ok ? std::string(to_string(row.regime)) : "",
                   status});
    }
    table.write(csv_path);
    out << "wrote " << csv_path << " (" << rows.size() << " values, " << failed << " failed, horizon "
        << format_number(horizon) << " h)\n";
    return Ok;
}

/// Positivity and boundedness check of every configured initial condition over the horizon.
inline int cmd_validate(const RunConfig& cfg, std::ostream& out = std::cout)
{
    const auto& ics = detail::require_initial_conditions(cfg, "validate");
    bool ok = true;
    for (std::size_t k = 0; k < ics.size(); ++k) {
        const Trajectory traj = simulate(cfg.model, ics[k], cfg.horizon, cfg.integrator);
        const InvariantLog log = monitor_invariants(traj, cfg.model, cfg.integrator.abs_tol);
        const bool good = log.positivity_violations == 0 && log.bounded;
        ok = ok && good;
        out << "ic " << k + 1 << ": violations = " << log.positivity_violations
            << ", worst undershoot = " << format_number(log.worst_undershoot)
            << ", bound = " << format_number(log.bound_estimate) << ", bounded = " << (log.bounded ? "yes" : "no")
            << (good ? "" : "  VIOLATION") << "\n";
    }
    out << (ok ? "invariants hold" : "invariant violation") << " (" << ics.size() << " trajectories, horizon "
        << format_number(cfg.horizon) << " h)\n";
    return ok ? Ok : InvariantViolation;
}

} // namespace wihost::cli
