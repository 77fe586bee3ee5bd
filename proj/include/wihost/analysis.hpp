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

#include "wihost/error.hpp"
#include "wihost/integrate.hpp"
#include "wihost/model.hpp"
#include "wihost/periodic.hpp"
#include "wihost/reproduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace wihost
{

enum class Regime
{
    Extinction,
    Persistence,
    Indeterminate,
};

constexpr std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::Extinction:
        return "Extinction";
    case Regime::Persistence:
        return "Persistence";
    case Regime::Indeterminate:
        return "Indeterminate";
    }
    return "Unknown";
}

/// Positivity and boundedness record of one trajectory.
struct InvariantLog {
    std::size_t positivity_violations{};
    double worst_undershoot{}; ///< most negative component seen, 0 when there is none
    double bound_estimate{};   ///< max of W over the whole trajectory
    double first_half_max{};
    double second_half_max{};
    bool bounded{};
};

/**
 * @brief Scans a trajectory for negative components below -abs_tol and tracks
 * W(t) = T + E + I + (delta + d(t)) / (2p) V.
 *
 * bounded is true iff the maximum of W over the second half of the time span exceeds the
 * maximum over the first half by at most 1%.
 */
inline InvariantLog monitor_invariants(const Trajectory& traj, const ModelParameters& params, double abs_tol = 1e-9)
{
    if (traj.params_hash != params.hash()) {
        throw Error(ErrorCode::ParamsMismatch, "monitor_invariants: trajectory was generated from other parameters");
    }
    InvariantLog log;
    if (traj.times.empty()) {
        log.bounded = true;
        return log;
    }
    const double t_mid = 0.5 * (traj.times.front() + traj.times.back());
    log.first_half_max = -std::numeric_limits<double>::infinity();
    log.second_half_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const State& s = traj.states[i];
        for (double v : {s.t_cells, s.e_cells, s.i_cells, s.virus}) {
            if (v < -abs_tol) {
                ++log.positivity_violations;
                log.worst_undershoot = std::min(log.worst_undershoot, v);
            }
        }
        const double w = s.t_cells + s.e_cells + s.i_cells + (params.delta + params.d(t)) / (2.0 * params.p) * s.virus;
        if (t <= t_mid) {
            log.first_half_max = std::max(log.first_half_max, w);
        }
        if (t >= t_mid) {
            log.second_half_max = std::max(log.second_half_max, w);
        }
    }
    log.bound_estimate = std::max(log.first_half_max, log.second_half_max);
    log.bounded = std::isfinite(log.bound_estimate) && log.second_half_max <= 1.01 * log.first_half_max;
    return log;
}

struct ClassificationThresholds {
    double extinction_eps{1e-8};
    double tstar_eps{1e-4};
    double persistence_min_floor{1e-6};
    double floor_stability{0.05};
    int stability_periods{10};
    int samples_per_period{240};
};

/// Long-run summary of one simulated initial condition.
struct TrajectoryEvidence {
    State initial;
    bool failed{};
    std::string error;
    double final_infection_max{}; ///< sup of max(E, I, V) over the final period
    double tstar_distance{};      ///< sup of |T - T*| over the final period
    double floor{};               ///< inf of min(E, I, V) over the final period
    double floor_variation{};     ///< (max - min) / max of the per-period floors, last periods
    InvariantLog invariants;
    Regime regime{Regime::Indeterminate};
};

struct ClassificationReport {
    R0Result r0;
    Regime regime{Regime::Indeterminate};
    std::vector<TrajectoryEvidence> evidence;
    double horizon{};
    double persistence_eta{}; ///< measured floor; 0 unless the regime is Persistence
};

namespace detail
{

inline TrajectoryEvidence assess(const ModelParameters& params, const VirusFreeSolution& t_star, const State& x0,
                                 double horizon, const IntegratorConfig& cfg, const ClassificationThresholds& th)
{
    TrajectoryEvidence ev;
    ev.initial = x0;
    try {
        const double period = params.period();
        const Trajectory traj = simulate(params, x0, horizon, cfg, period / th.samples_per_period);
        ev.invariants = monitor_invariants(traj, params, cfg.abs_tol);

        const double final_start = horizon - period;
        std::vector<double> floors(static_cast<std::size_t>(th.stability_periods),
                                   std::numeric_limits<double>::infinity());
        ev.floor = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const double t = traj.times[i];
            const State& s = traj.states[i];
            const auto back = static_cast<long>(std::floor((horizon - t) / period));
            if (back >= 0 && back < th.stability_periods) {
                floors[static_cast<std::size_t>(back)] = std::min(floors[static_cast<std::size_t>(back)], s.infection_min());
            }
            if (t >= final_start) {
                ev.final_infection_max = std::max(ev.final_infection_max, s.infection_max());
                ev.tstar_distance = std::max(ev.tstar_distance, std::abs(s.t_cells - t_star(t)));
                ev.floor = std::min(ev.floor, s.infection_min());
            }
        }
        const auto [lo, hi] = std::minmax_element(floors.begin(), floors.end());
        ev.floor_variation = *hi > 0.0 ? (*hi - *lo) / *hi : std::numeric_limits<double>::infinity();

        if (ev.final_infection_max < th.extinction_eps && ev.tstar_distance < th.tstar_eps) {
            ev.regime = Regime::Extinction;
        }
        else if (ev.floor > th.persistence_min_floor && ev.floor_variation < th.floor_stability) {
            ev.regime = Regime::Persistence;
        }
        else {
            ev.regime = Regime::Indeterminate;
        }
    }
    catch (const Error& e) {
        ev.failed = true;
        ev.error = std::string(e.category()) + ": " + e.what();
        ev.regime = Regime::Indeterminate;
    }
    return ev;
}

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads. body must not throw.
template <class Body>
void parallel_for(std::size_t n, Body&& body)
{
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                body(i);
            }
        });
    }
}

} // namespace detail

/**
 * @brief Computes R0 and decides the long-run regime from simulations of several
 * initial conditions.
 *
 * Extinction: every trajectory ends with max(E, I, V) < extinction_eps and |T - T*| < tstar_eps
 * over the final period. Persistence: every trajectory keeps min(E, I, V) above
 * persistence_min_floor over the final period, with per-period floors stable over the last
 * stability_periods periods. Anything else, including disagreement or a failed run, is
 * Indeterminate.
 */
inline ClassificationReport classify(const ModelParameters& params, const std::vector<State>& initial_conditions,
                                     double horizon, const IntegratorConfig& cfg = IntegratorConfig::simulation(),
                                     const ClassificationThresholds& th = {})
{
    params.validate();
    if (initial_conditions.size() < 3) {
        throw Error(ErrorCode::ValidationError, "classify: at least 3 initial conditions are required");
    }
    for (const State& x : initial_conditions) {
        if (!x.positive()) {
            throw Error(ErrorCode::ValidationError, "classify: initial conditions must be strictly positive");
        }
    }
    const double period = params.period();
    if (horizon < 50.0 * period) {
        throw Error(ErrorCode::ValidationError, "classify: horizon must cover at least 50 periods");
    }

    ClassificationReport report;
    report.horizon = horizon;
    report.r0 = r0_periodic(params);
    const VirusFreeSolution t_star = virus_free_numeric(params);

    report.evidence.resize(initial_conditions.size());
    detail::parallel_for(initial_conditions.size(), [&](std::size_t i) {
        report.evidence[i] = detail::assess(params, t_star, initial_conditions[i], horizon, cfg, th);
    });

    const Regime first = report.evidence.front().regime;
    const bool agree = std::all_of(report.evidence.begin(), report.evidence.end(),
                                   [&](const TrajectoryEvidence& ev) { return ev.regime == first; });
    report.regime = agree ? first : Regime::Indeterminate;
    if (report.regime == Regime::Persistence) {
        report.persistence_eta = std::numeric_limits<double>::infinity();
        for (const auto& ev : report.evidence) {
            report.persistence_eta = std::min(report.persistence_eta, ev.floor);
        }
    }
    return report;
}

/// Sweepable parameter names: mu|beta|d . mean|amplitude, and k, delta, p, c, c1, c2.
inline void set_parameter(ModelParameters& params, std::string_view name, double value)
{
    if (name.starts_with("scalars.")) {
        name.remove_prefix(8);
    }
    if (name == "mu.mean") params.mu.mean = value;
    else if (name == "mu.amplitude") params.mu.amplitude = value;
    else if (name == "beta.mean") params.beta.mean = value;
    else if (name == "beta.amplitude") params.beta.amplitude = value;
    else if (name == "d.mean") params.d.mean = value;
    else if (name == "d.amplitude") params.d.amplitude = value;
    else if (name == "k") params.k = value;
    else if (name == "delta") params.delta = value;
    else if (name == "p") params.p = value;
    else if (name == "c") params.c = value;
    else if (name == "c1") params.c1 = value;
    else if (name == "c2") params.c2 = value;
    else {
        throw Error(ErrorCode::ValidationError, "sweep: unknown parameter '" + std::string(name) + "'");
    }
}

struct SweepRow {
    double value{};
    bool valid{true};
    std::string error; ///< "Category: message" when the row failed
    double r0{std::numeric_limits<double>::quiet_NaN()};
    double rho_infection{std::numeric_limits<double>::quiet_NaN()}; ///< rho(Phi_{F-G}(P))
    R0Method method{R0Method::PeriodicBisection};
    Regime regime{Regime::Indeterminate};
};

/**
 * @brief One independent classification per value of `param_name`, ordered by value.
 *
 * Values that violate a parameter invariant produce a row marked invalid with an
 * InvalidSweepValue error; the sweep continues.
 */
inline std::vector<SweepRow> sweep(const ModelParameters& base, std::string_view param_name,
                                   const std::vector<double>& values, double horizon,
                                   const std::vector<State>& initial_conditions,
                                   const IntegratorConfig& cfg = IntegratorConfig::simulation(),
                                   const ClassificationThresholds& th = {})
{
    {
        ModelParameters probe = base;
        set_parameter(probe, param_name, 0.0); // rejects unknown names up front
    }
    std::vector<double> sorted = values;
    std::stable_sort(sorted.begin(), sorted.end());

    std::vector<SweepRow> rows(sorted.size());
    detail::parallel_for(sorted.size(), [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = sorted[i];
        ModelParameters params = base;
        set_parameter(params, param_name, sorted[i]);
        try {
            params.validate();
        }
        catch (const Error& e) {
            row.valid = false;
            row.error = std::string(to_string(ErrorCode::InvalidSweepValue)) + ": " + e.what();
            return;
        }
        try {
            const ClassificationReport report = classify(params, initial_conditions, horizon, cfg, th);
            row.r0 = report.r0.value;
            row.rho_infection = report.r0.rho_at_one;
            row.method = report.r0.method;
            row.regime = report.regime;
        }
        catch (const Error& e) {
            row.error = std::string(e.category()) + ": " + e.what();
        }
    });
    return rows;
}

} // namespace wihost
