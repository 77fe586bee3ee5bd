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

#include <Eigen/Core>
#include <boost/container_hash/hash.hpp>
#include <numbers>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wihost
{

// Time is measured in hours everywhere; rates are per hour.

using StateVector = Eigen::Vector4d;
using Matrix4     = Eigen::Matrix4d;

/// Component indices of StateVector.
enum Compartment : int
{
    kT = 0,
    kE = 1,
    kI = 2,
    kV = 3,
};

/**
 * @brief Periodic rate of the form mean + amplitude * sin(angular_frequency * t).
 */
struct SinusoidalCoefficient {
    double mean{};
    double amplitude{};
    double angular_frequency{};

    double operator()(double t) const
    {
        return mean + amplitude * std::sin(angular_frequency * t);
    }

    double period() const
    {
        return 2.0 * std::numbers::pi / angular_frequency;
    }

    /// Integral of the coefficient over [0, t], exact.
    double integral(double t) const
    {
        return mean * t + amplitude * (1.0 - std::cos(angular_frequency * t)) / angular_frequency;
    }

    bool is_zero() const
    {
        return mean == 0.0 && amplitude == 0.0;
    }

    bool operator==(const SinusoidalCoefficient&) const = default;
};

inline double coefficient_at(const SinusoidalCoefficient& coeff, double t)
{
    return coeff(t);
}

/**
 * @brief Throws ValidationError naming `key` if the coefficient is not strictly positive
 * for all t. With `allow_zero`, the identically-zero coefficient is also accepted.
 */
inline void validate(const SinusoidalCoefficient& coeff, std::string_view key, bool allow_zero = false)
{
    auto fail = [&](std::string_view field, const std::string& why) {
        throw Error(ErrorCode::ValidationError, std::string(key) + "." + std::string(field) + ": " + why);
    };
    if (!std::isfinite(coeff.angular_frequency) || coeff.angular_frequency <= 0.0) {
        fail("angular_frequency", "must be finite and > 0");
    }
    if (allow_zero && coeff.is_zero()) {
        return;
    }
    if (!std::isfinite(coeff.mean) || coeff.mean <= 0.0) {
        fail("mean", "must be finite and > 0");
    }
    if (!std::isfinite(coeff.amplitude) || coeff.amplitude < 0.0) {
        fail("amplitude", "must be finite and >= 0");
    }
    if (coeff.amplitude >= coeff.mean) {
        fail("amplitude", "must be < mean so the rate stays positive");
    }
}

/**
 * @brief Parameters of the within-host model with Crowley-Martin incidence.
 *
 * mu, beta and d are periodic with one common angular frequency; the common period is
 * derived from it. Call validate() before handing a hand-built set to the numerics;
 * every library entry point validates again.
 */
struct ModelParameters {
    SinusoidalCoefficient mu;   ///< target cell supply
    SinusoidalCoefficient beta; ///< maximal infection rate
    SinusoidalCoefficient d;    ///< natural cell death rate
    double k{};                 ///< exposed -> infectious transition
    double delta{};             ///< infection-induced death of I
    double p{};                 ///< virion production by I
    double c{};                 ///< virion clearance
    double c1{};                ///< saturation in target cells
    double c2{};                ///< saturation (interference) in virions

    double angular_frequency() const
    {
        return mu.angular_frequency;
    }

    double period() const
    {
        return mu.period();
    }

    bool autonomous() const
    {
        return mu.amplitude == 0.0 && beta.amplitude == 0.0 && d.amplitude == 0.0;
    }

    void validate() const
    {
        wihost::validate(mu, "mu");
        wihost::validate(beta, "beta", /*allow_zero=*/true);
        wihost::validate(d, "d");
        if (beta.angular_frequency != mu.angular_frequency || d.angular_frequency != mu.angular_frequency) {
            throw Error(ErrorCode::ValidationError,
                        "scalars.angular_frequency: mu, beta and d must share one angular frequency");
        }
        auto positive = [](double value, std::string_view key) {
            if (!std::isfinite(value) || value <= 0.0) {
                throw Error(ErrorCode::ValidationError, "scalars." + std::string(key) + ": must be finite and > 0");
            }
        };
        auto nonnegative = [](double value, std::string_view key) {
            if (!std::isfinite(value) || value < 0.0) {
                throw Error(ErrorCode::ValidationError, "scalars." + std::string(key) + ": must be finite and >= 0");
            }
        };
        positive(k, "k");
        positive(delta, "delta");
        positive(p, "p");
        positive(c, "c");
        nonnegative(c1, "c1");
        nonnegative(c2, "c2");
    }

    /// Identifier of this exact parameter set (stable within one build).
    std::uint64_t hash() const
    {
        std::size_t seed = 0;
        for (double v : {mu.mean, mu.amplitude, mu.angular_frequency, beta.mean, beta.amplitude,
                         beta.angular_frequency, d.mean, d.amplitude, d.angular_frequency, k, delta, p, c, c1, c2}) {
            boost::hash_combine(seed, v);
        }
        return static_cast<std::uint64_t>(seed);
    }

    bool operator==(const ModelParameters&) const = default;
};

/// Densities of healthy (T), exposed (E), infectious (I) cells and free virions (V).
struct State {
    double t_cells{};
    double e_cells{};
    double i_cells{};
    double virus{};

    StateVector vector() const
    {
        return {t_cells, e_cells, i_cells, virus};
    }

    static State from(const StateVector& x)
    {
        return {x[kT], x[kE], x[kI], x[kV]};
    }

    bool nonnegative() const
    {
        return t_cells >= 0.0 && e_cells >= 0.0 && i_cells >= 0.0 && virus >= 0.0;
    }

    bool positive() const
    {
        return t_cells > 0.0 && e_cells > 0.0 && i_cells > 0.0 && virus > 0.0;
    }

    double infection_max() const
    {
        return std::max({e_cells, i_cells, virus});
    }

    double infection_min() const
    {
        return std::min({e_cells, i_cells, virus});
    }

    bool operator==(const State&) const = default;
};

/// Time-stamped states of one integration run.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::uint64_t params_hash{};
};

/// Crowley-Martin incidence beta*T*V / ((1 + c1*T)(1 + c2*V)).
inline double incidence(double beta_t, double t_cells, double virus, double c1, double c2)
{
    return beta_t * t_cells * virus / ((1.0 + c1 * t_cells) * (1.0 + c2 * virus));
}

inline StateVector rhs(double t, const StateVector& x, const ModelParameters& params)
{
    const double mu_t   = params.mu(t);
    const double beta_t = params.beta(t);
    const double d_t    = params.d(t);
    const double inc    = incidence(beta_t, x[kT], x[kV], params.c1, params.c2);
    return {mu_t - inc - d_t * x[kT], inc - (params.k + d_t) * x[kE], params.k * x[kE] - (params.delta + d_t) * x[kI],
            params.p * x[kI] - params.c * x[kV]};
}

inline StateVector rhs(double t, const State& state, const ModelParameters& params)
{
    return rhs(t, state.vector(), params);
}

/// Analytic Jacobian of rhs with respect to (T, E, I, V).
inline Matrix4 jacobian(double t, const StateVector& x, const ModelParameters& params)
{
    const double beta_t = params.beta(t);
    const double d_t    = params.d(t);
    const double sat_t  = 1.0 + params.c1 * x[kT];
    const double sat_v  = 1.0 + params.c2 * x[kV];
    const double dinc_dt = beta_t * x[kV] / (sat_t * sat_t * sat_v);
    const double dinc_dv = beta_t * x[kT] / (sat_t * sat_v * sat_v);

    Matrix4 jac = Matrix4::Zero();
    jac(kT, kT) = -dinc_dt - d_t;
    jac(kT, kV) = -dinc_dv;
    jac(kE, kT) = dinc_dt;
    jac(kE, kE) = -(params.k + d_t);
    jac(kE, kV) = dinc_dv;
    jac(kI, kE) = params.k;
    jac(kI, kI) = -(params.delta + d_t);
    jac(kV, kI) = params.p;
    jac(kV, kV) = -params.c;
    return jac;
}

inline Matrix4 jacobian(double t, const State& state, const ModelParameters& params)
{
    return jacobian(t, state.vector(), params);
}

} // namespace wihost
