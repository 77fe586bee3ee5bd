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
#include "wihost/linalg.hpp"
#include "wihost/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace wihost
{

/**
 * @brief Healthy-cell density T*(t) of the virus-free periodic solution (T*(t), 0, 0, 0).
 *
 * Holds a uniform sampling of one period, endpoints included. Values between samples are
 * obtained by cubic Hermite interpolation using the exact derivative mu(t) - d(t) T.
 */
struct VirusFreeSolution {
    std::uint64_t params_hash{};
    double period{};
    SinusoidalCoefficient mu;
    SinusoidalCoefficient d;
    double t_star_initial{};
    std::vector<double> times;
    std::vector<double> values;

    double slope(double t, double value) const
    {
        return mu(t) - d(t) * value;
    }

    /// T*(t) for any real t (periodic extension).
    double operator()(double t) const
    {
        const std::size_t n = values.size() - 1;
        double s = std::fmod(t, period);
        if (s < 0.0) {
            s += period;
        }
        const double h = period / static_cast<double>(n);
        std::size_t j = static_cast<std::size_t>(s / h);
        if (j >= n) {
            j = n - 1;
        }
        const double ta = times[j];
        const double tb = times[j + 1];
        const double ya = values[j];
        const double yb = values[j + 1];
        const double theta = (s - ta) / h;
        const double h00 = (1.0 + 2.0 * theta) * (1.0 - theta) * (1.0 - theta);
        const double h10 = theta * (1.0 - theta) * (1.0 - theta);
        const double h01 = theta * theta * (3.0 - 2.0 * theta);
        const double h11 = theta * theta * (theta - 1.0);
        return h00 * ya + h10 * h * slope(ta, ya) + h01 * yb + h11 * h * slope(tb, yb);
    }

    /// |T*(P) - T*(0)|
    double periodicity_defect() const
    {
        return std::abs(values.back() - values.front());
    }
};

namespace detail
{

// 5-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 5> gl_nodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                                0.9061798459386640};
inline constexpr std::array<double, 5> gl_weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                  0.4786286704993665, 0.2369268850561891};

template <class Fn>
double gauss_legendre(Fn&& fn, double a, double b)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < gl_nodes.size(); ++i) {
        sum += gl_weights[i] * fn(mid + half * gl_nodes[i]);
    }
    return half * sum;
}

/**
 * Evaluates T(t) = exp(-D(t)) (int_0^t mu(s) exp(D(s)) ds + T0), D(t) = int_0^t d, by
 * composite Gauss-Legendre quadrature of both nested integrals on a uniform partition.
 */
class VariationOfConstants
{
public:
    VariationOfConstants(const SinusoidalCoefficient& mu, const SinusoidalCoefficient& d, double period,
                         std::size_t n_quad)
        : m_mu(mu)
        , m_d(d)
        , m_h(period / static_cast<double>(n_quad))
        , m_decay(n_quad + 1, 0.0)
        , m_inflow(n_quad + 1, 0.0)
    {
        for (std::size_t j = 0; j < n_quad; ++j) {
            const double a = node(j);
            const double b = node(j + 1);
            m_decay[j + 1] = m_decay[j] + gauss_legendre(m_d, a, b);
            m_inflow[j + 1] = m_inflow[j] + gauss_legendre([&](double s) { return m_mu(s) * std::exp(decay_from(j, s)); }, a, b);
        }
    }

    double decay(double t) const
    {
        return decay_from(locate(t), t);
    }

    double inflow(double t) const
    {
        const std::size_t j = locate(t);
        return m_inflow[j] + gauss_legendre([&](double s) { return m_mu(s) * std::exp(decay_from(j, s)); }, node(j), t);
    }

private:
    double node(std::size_t j) const
    {
        return m_h * static_cast<double>(j);
    }

    std::size_t locate(double t) const
    {
        const std::size_t n = m_decay.size() - 1;
        auto j = static_cast<std::size_t>(std::max(0.0, t) / m_h);
        return j >= n ? n - 1 : j;
    }

    double decay_from(std::size_t j, double t) const
    {
        return m_decay[j] + gauss_legendre(m_d, node(j), t);
    }

    SinusoidalCoefficient m_mu;
    SinusoidalCoefficient m_d;
    double m_h;
    std::vector<double> m_decay;
    std::vector<double> m_inflow;
};

inline VirusFreeSolution make_virus_free(const ModelParameters& params)
{
    VirusFreeSolution sol;
    sol.params_hash = params.hash();
    sol.period = params.period();
    sol.mu = params.mu;
    sol.d = params.d;
    return sol;
}

inline std::vector<double> uniform_grid(double t0, double t1, std::size_t intervals)
{
    std::vector<double> grid(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        grid[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(intervals);
    }
    grid.back() = t1;
    return grid;
}

} // namespace detail

inline constexpr std::size_t default_virus_free_samples = 1024;

/**
 * @brief T*(t) from the variation-of-constants formula, evaluated by composite quadrature.
 *
 * T*(0) = exp(-D(P)) int_0^P mu exp(D) / (1 - exp(-D(P))), D(t) = int_0^t d.
 */
inline VirusFreeSolution virus_free_closed_form(const ModelParameters& params, std::size_t n_quad = 256,
                                                std::size_t samples = default_virus_free_samples)
{
    params.validate();
    if (n_quad < 64) {
        throw Error(ErrorCode::ValidationError, "virus_free_closed_form: n_quad must be >= 64");
    }
    if (samples < 2) {
        throw Error(ErrorCode::ValidationError, "virus_free_closed_form: need at least 2 samples");
    }
    const double period = params.period();
    const detail::VariationOfConstants quad(params.mu, params.d, period, n_quad);
    const double total_decay = quad.decay(period);
    if (!(total_decay > 0.0)) {
        throw Error(ErrorCode::DegenerateDecay, "virus_free_closed_form: integral of d over one period is not positive");
    }
    const double damping = std::exp(-total_decay);
    const double t0_value = damping * quad.inflow(period) / (1.0 - damping);

    VirusFreeSolution sol = detail::make_virus_free(params);
    sol.t_star_initial = t0_value;
    sol.times = detail::uniform_grid(0.0, period, samples);
    sol.values.reserve(sol.times.size());
    for (double t : sol.times) {
        sol.values.push_back(std::exp(-quad.decay(t)) * (quad.inflow(t) + t0_value));
    }
    return sol;
}

/**
 * @brief T*(t) as the fixed point of the period map of T' = mu(t) - d(t) T.
 *
 * The period map is affine, T(P) = a + b T(0), so two integrations (from 0 and from 1)
 * determine it and the fixed point a / (1 - b) exactly.
 */
inline VirusFreeSolution virus_free_numeric(const ModelParameters& params,
                                            const IntegratorConfig& cfg = IntegratorConfig::precise(),
                                            std::size_t samples = default_virus_free_samples)
{
    params.validate();
    if (samples < 2) {
        throw Error(ErrorCode::ValidationError, "virus_free_numeric: need at least 2 samples");
    }
    const double period = params.period();
    auto field = [&](double t, const Vector<1>& y) -> Vector<1> {
        return Vector<1>{params.mu(t) - params.d(t) * y[0]};
    };
    const double offset = integrate<1>(field, 0.0, period, Vector<1>{0.0}, cfg).final_state[0];
    const double gain = integrate<1>(field, 0.0, period, Vector<1>{1.0}, cfg).final_state[0] - offset;
    if (!(gain < 1.0)) {
        throw Error(ErrorCode::DegenerateDecay, "virus_free_numeric: period map of the T equation is not contracting");
    }
    const double t0_value = offset / (1.0 - gain);

    VirusFreeSolution sol = detail::make_virus_free(params);
    sol.t_star_initial = t0_value;
    sol.times = detail::uniform_grid(0.0, period, samples);
    const auto run = integrate<1>(field, 0.0, period, Vector<1>{t0_value}, cfg, sol.times);
    sol.values.reserve(run.states.size());
    for (const auto& v : run.states) {
        sol.values.push_back(v[0]);
    }
    return sol;
}

/// Projection used by simulations: round-off negatives in [-abs_tol, 0) become 0; anything
/// below -abs_tol is left in place so the invariant monitor can see it.
struct ClampRoundoff {
    double abs_tol{};

    template <class V>
    bool operator()(double, V& y) const
    {
        bool changed = false;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y[i] < 0.0 && y[i] >= -abs_tol) {
                y[i] = 0.0;
                changed = true;
            }
        }
        return changed;
    }
};

/**
 * @brief Simulates the full model from `x0` at t0 = 0 until `t_end`.
 *
 * With grid_step > 0 the trajectory is sampled on the grid 0, grid_step, ..., t_end;
 * otherwise at every accepted step.
 */
inline Trajectory simulate(const ModelParameters& params, const State& x0, double t_end,
                           const IntegratorConfig& cfg = IntegratorConfig::simulation(), double grid_step = 0.0)
{
    params.validate();
    std::vector<double> grid;
    if (grid_step > 0.0) {
        const auto n = static_cast<std::size_t>(std::floor(t_end / grid_step + 1e-9));
        grid.reserve(n + 2);
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = grid_step * static_cast<double>(i);
            if (t <= t_end) {
                grid.push_back(t);
            }
        }
        if (grid.back() != t_end) {
            grid.push_back(t_end);
        }
    }
    auto field = [&](double t, const StateVector& x) -> StateVector {
        return rhs(t, x, params);
    };
    const auto sol = integrate<4>(field, 0.0, t_end, x0.vector(), cfg, grid, ClampRoundoff{cfg.abs_tol});
    Trajectory traj;
    traj.params_hash = params.hash();
    traj.times = sol.times;
    traj.states.reserve(sol.states.size());
    for (const auto& x : sol.states) {
        traj.states.push_back(State::from(x));
    }
    return traj;
}

/// Raw solution of the model at t1 from x0 at t0, without any clamping.
inline StateVector flow(const ModelParameters& params, const StateVector& x0, double t0, double t1,
                        const IntegratorConfig& cfg)
{
    auto field = [&](double t, const StateVector& x) -> StateVector {
        return rhs(t, x, params);
    };
    return integrate<4>(field, t0, t1, x0, cfg).final_state;
}

/// Time-P map of the model started at t = 0, with round-off clamping.
inline State poincare_map(const ModelParameters& params, const State& x0,
                          const IntegratorConfig& cfg = IntegratorConfig::precise())
{
    params.validate();
    StateVector x = flow(params, x0.vector(), 0.0, params.period(), cfg);
    ClampRoundoff{cfg.abs_tol}(0.0, x);
    return State::from(x);
}

struct VariationalResult {
    StateVector end_state;
    Matrix4 monodromy;
};

/**
 * @brief Integrates the state together with its variational equation Z' = J(t, u(t)) Z,
 * Z(0) = I, over one period. The returned matrix is the derivative of the Poincare map at x0.
 */
inline VariationalResult variational_monodromy(const ModelParameters& params, const StateVector& x0,
                                               const IntegratorConfig& cfg = IntegratorConfig::precise())
{
    auto field = [&](double t, const Vector<20>& y) -> Vector<20> {
        const StateVector x = y.head<4>();
        const Eigen::Map<const Matrix4> z(y.data() + 4);
        Vector<20> dy;
        dy.head<4>() = rhs(t, x, params);
        Eigen::Map<Matrix4>(dy.data() + 4) = jacobian(t, x, params) * z;
        return dy;
    };
    Vector<20> y0;
    y0.head<4>() = x0;
    Eigen::Map<Matrix4>(y0.data() + 4) = Matrix4::Identity();
    const Vector<20> y1 = integrate<20>(field, 0.0, params.period(), y0, cfg).final_state;
    return {y1.head<4>(), Eigen::Map<const Matrix4>(y1.data() + 4)};
}

/// Eigenvalues of a monodromy matrix, sorted by modulus descending.
template <class Derived>
std::vector<std::complex<double>> floquet_multipliers(const Eigen::MatrixBase<Derived>& monodromy)
{
    return sorted_eigenvalues(monodromy);
}

/// One period of a periodic solution of the full model.
struct PeriodicOrbit {
    State initial_state;
    Trajectory samples;
    double newton_residual{};
    int newton_iterations{};
    Matrix4 monodromy;
    std::vector<std::complex<double>> floquet_multipliers;
    bool stable{};
    double stability_margin{}; ///< 1 - max |multiplier|
    double closure_defect{};   ///< sup-norm distance between the samples at t = 0 and t = P
};

struct NewtonOptions {
    double tolerance{1e-10};
    int max_iterations{50};
    int max_halvings{8};
    double boundary_eps{1e-10};
    std::size_t samples_per_period{256};
};

/// State at the last multiple of the period not exceeding `transient`, starting from x0.
inline State warm_start(const ModelParameters& params, const State& x0, double transient = 2000.0,
                        const IntegratorConfig& cfg = IntegratorConfig::simulation())
{
    params.validate();
    const double period = params.period();
    const double t_end = period * std::floor(transient / period);
    if (!(t_end > 0.0)) {
        return x0;
    }
    StateVector x = x0.vector();
    auto field = [&](double t, const StateVector& y) -> StateVector {
        return rhs(t, y, params);
    };
    x = integrate<4>(field, 0.0, t_end, x, cfg, {}, ClampRoundoff{cfg.abs_tol}).final_state;
    return State::from(x);
}

/**
 * @brief Newton shooting for a fixed point of the Poincare map.
 *
 * Solves g(x) = Q(x) - x = 0 with Jacobian Phi(P; x) - I from the variational equation. Steps
 * are halved (up to max_halvings times) until the sup-norm residual decreases.
 *
 * @throws Error NewtonDiverged if no decreasing step is found or iterations run out,
 *         ConvergedToBoundary if the fixed point has a component below boundary_eps.
 */
inline PeriodicOrbit find_periodic_orbit(const ModelParameters& params, const State& guess,
                                         const IntegratorConfig& cfg = IntegratorConfig::precise(),
                                         const NewtonOptions& opts = {})
{
    params.validate();
    if (!guess.positive()) {
        throw Error(ErrorCode::ValidationError, "find_periodic_orbit: guess must be strictly positive");
    }

    StateVector x = guess.vector();
    VariationalResult shot = variational_monodromy(params, x, cfg);
    StateVector g = shot.end_state - x;
    double residual = g.lpNorm<Eigen::Infinity>();
    int iterations = 0;

    while (!(residual < opts.tolerance)) {
        if (iterations >= opts.max_iterations) {
            throw Error(ErrorCode::NewtonDiverged, "find_periodic_orbit: no convergence after " +
                                                       std::to_string(iterations) + " iterations, residual " +
                                                       std::to_string(residual));
        }
        ++iterations;
        const StateVector dx = (shot.monodromy - Matrix4::Identity()).partialPivLu().solve(-g);
        bool accepted = false;
        double step = 1.0;
        for (int halving = 0; halving <= opts.max_halvings && !accepted; ++halving, step *= 0.5) {
            const StateVector candidate = x + step * dx;
            try {
                VariationalResult trial = variational_monodromy(params, candidate, cfg);
                const StateVector g_trial = trial.end_state - candidate;
                const double r_trial = g_trial.lpNorm<Eigen::Infinity>();
                if (r_trial < residual) {
                    x = candidate;
                    shot = std::move(trial);
                    g = g_trial;
                    residual = r_trial;
                    accepted = true;
                }
            }
            catch (const Error& e) {
                if (!is_numerical(e.code())) {
                    throw;
                }
            }
        }
        if (!accepted) {
            throw Error(ErrorCode::NewtonDiverged,
                        "find_periodic_orbit: residual did not decrease (" + std::to_string(residual) + ")");
        }
    }

    if (x.minCoeff() < opts.boundary_eps) {
        throw Error(ErrorCode::ConvergedToBoundary,
                    "find_periodic_orbit: fixed point lies on the boundary (virus-free orbit)");
    }

    PeriodicOrbit orbit;
    orbit.initial_state = State::from(x);
    orbit.newton_residual = residual;
    orbit.newton_iterations = iterations;
    orbit.monodromy = shot.monodromy;
    orbit.floquet_multipliers = floquet_multipliers(shot.monodromy);
    const double max_modulus = std::abs(orbit.floquet_multipliers.front());
    orbit.stable = max_modulus < 1.0;
    orbit.stability_margin = 1.0 - max_modulus;

    const double period = params.period();
    const auto grid = detail::uniform_grid(0.0, period, opts.samples_per_period);
    auto field = [&](double t, const StateVector& y) -> StateVector {
        return rhs(t, y, params);
    };
    const auto run = integrate<4>(field, 0.0, period, x, cfg, grid);
    orbit.samples.params_hash = params.hash();
    orbit.samples.times = run.times;
    for (const auto& s : run.states) {
        orbit.samples.states.push_back(State::from(s));
    }
    orbit.closure_defect = (run.states.back() - run.states.front()).lpNorm<Eigen::Infinity>();
    return orbit;
}

} // namespace wihost
