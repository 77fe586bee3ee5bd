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
#include "wihost/periodic.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace wihost
{

using Matrix3 = Eigen::Matrix3d;

/**
 * @brief Infection subsystem linearized at the virus-free periodic solution.
 *
 * Infection compartments are ordered (E, I, V). F(t) holds new infections, G(t) transitions:
 *
 *     F(t) = [[0, 0, beta(t) T*(t) / (1 + c1 T*(t))], [0, 0, 0], [0, 0, 0]]
 *     G(t) = [[k + d(t), 0, 0], [-k, delta + d(t), 0], [0, -p, c]]
 */
struct LinearizedSystem {
    ModelParameters params;
    VirusFreeSolution t_star;
    double period{};

    Matrix3 F(double t) const
    {
        const double ts = t_star(t);
        Matrix3 f = Matrix3::Zero();
        f(0, 2) = params.beta(t) * ts / (1.0 + params.c1 * ts);
        return f;
    }

    Matrix3 G(double t) const
    {
        const double d_t = params.d(t);
        Matrix3 g = Matrix3::Zero();
        g(0, 0) = params.k + d_t;
        g(1, 0) = -params.k;
        g(1, 1) = params.delta + d_t;
        g(2, 1) = -params.p;
        g(2, 2) = params.c;
        return g;
    }
};

inline LinearizedSystem build_linearization(const ModelParameters& params, const VirusFreeSolution& t_star)
{
    params.validate();
    if (t_star.params_hash != params.hash()) {
        throw Error(ErrorCode::ParamsMismatch, "build_linearization: virus-free solution belongs to other parameters");
    }
    return {params, t_star, params.period()};
}

template <int N>
struct MonodromyResult {
    Matrix<N> matrix;
    double spectral_radius{};
    std::vector<std::complex<double>> eigenvalues;
    StepStats stats;
};

/// Fundamental matrix of z' = A(t) z after one period, with its spectrum.
template <int N, class MatrixFn>
MonodromyResult<N> monodromy(MatrixFn&& a_of_t, double period, const IntegratorConfig& cfg = IntegratorConfig::precise())
{
    const auto sol = integrate_matrix<N>(a_of_t, 0.0, period, Matrix<N>::Identity(), cfg);
    MonodromyResult<N> out;
    out.matrix = sol.end_matrix;
    out.eigenvalues = sorted_eigenvalues(out.matrix);
    out.spectral_radius = std::abs(out.eigenvalues.front());
    out.stats = sol.stats;
    return out;
}

enum class R0Method
{
    PeriodicBisection,
    AutonomousClosedForm,
    NoInfection,
};

constexpr std::string_view to_string(R0Method method)
{
    switch (method) {
    case R0Method::PeriodicBisection:
        return "periodic-bisection";
    case R0Method::AutonomousClosedForm:
        return "autonomous-closed-form";
    case R0Method::NoInfection:
        return "no-infection";
    }
    return "unknown";
}

struct R0Result {
    double value{};
    R0Method method{R0Method::PeriodicBisection};
    double lambda_lo{};
    double lambda_hi{};
    double rho_lo{}; ///< h(lambda_lo) >= 1
    double rho_hi{}; ///< h(lambda_hi) <= 1
    int iterations{};  ///< bisection steps
    int evaluations{}; ///< monodromy integrations
    double rho_at_one{}; ///< spectral radius of the monodromy of F - G

    bool no_infection() const
    {
        return method == R0Method::NoInfection;
    }

    /// sign(R0 - 1) == sign(rho(Phi_{F-G}(P)) - 1)
    bool floquet_consistent() const
    {
        auto sign = [](double x) {
            return (x > 0.0) - (x < 0.0);
        };
        return sign(value - 1.0) == sign(rho_at_one - 1.0);
    }
};

/**
 * @brief R0 as the root lambda0 of h(lambda) = rho(Phi_{F/lambda - G}(P)) = 1.
 *
 * h is nonincreasing in lambda. The root is bracketed by doubling or halving lambda from 1
 * and then bisected until the bracket is narrower than `tol`; the midpoint is returned.
 *
 * @throws Error BracketFailure if no bracket is found within `max_doublings` steps.
 */
template <class FFn, class GFn>
R0Result r0_from_matrices(FFn&& f_of_t, GFn&& g_of_t, double period, double tol = 1e-8,
                          const IntegratorConfig& cfg = IntegratorConfig::precise(), int max_doublings = 60)
{
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::ValidationError, "r0: tol must be > 0");
    }
    R0Result out;
    auto h = [&](double lambda) {
        ++out.evaluations;
        auto a = [&](double t) -> Matrix3 {
            return f_of_t(t) / lambda - g_of_t(t);
        };
        return monodromy<3>(a, period, cfg).spectral_radius;
    };

    out.rho_at_one = h(1.0);
    double lo = 1.0, hi = 1.0, rho_lo = out.rho_at_one, rho_hi = out.rho_at_one;
    bool bracketed = false;
    if (out.rho_at_one >= 1.0) {
        for (int i = 0; i < max_doublings; ++i) {
            hi = 2.0 * lo;
            rho_hi = h(hi);
            if (rho_hi <= 1.0) {
                bracketed = true;
                break;
            }
            lo = hi;
            rho_lo = rho_hi;
        }
    }
    else {
        for (int i = 0; i < max_doublings; ++i) {
            lo = 0.5 * hi;
            rho_lo = h(lo);
            if (rho_lo >= 1.0) {
                bracketed = true;
                break;
            }
            hi = lo;
            rho_hi = rho_lo;
        }
    }
    if (!bracketed) {
        throw Error(ErrorCode::BracketFailure, "r0: no bracket of rho = 1 found within " +
                                                   std::to_string(max_doublings) + " doublings");
    }

    while (hi - lo >= tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break; // bracket at floating-point resolution
        }
        const double rho_mid = h(mid);
        ++out.iterations;
        if (rho_mid >= 1.0) {
            lo = mid;
            rho_lo = rho_mid;
        }
        else {
            hi = mid;
            rho_hi = rho_mid;
        }
    }
    out.value = 0.5 * (lo + hi);
    out.lambda_lo = lo;
    out.lambda_hi = hi;
    out.rho_lo = rho_lo;
    out.rho_hi = rho_hi;
    out.method = R0Method::PeriodicBisection;
    return out;
}

/// Spectral radius of the monodromy of F - G over one period.
inline double infection_monodromy_radius(const LinearizedSystem& lin,
                                         const IntegratorConfig& cfg = IntegratorConfig::precise())
{
    auto a = [&](double t) -> Matrix3 {
        return lin.F(t) - lin.G(t);
    };
    return monodromy<3>(a, lin.period, cfg).spectral_radius;
}

/**
 * @brief Basic reproduction number of the periodic model.
 *
 * With beta identically zero there is no infection term: R0 is reported as 0 with
 * method NoInfection instead of running the bracket search.
 */
inline R0Result r0_periodic(const ModelParameters& params, double tol = 1e-8,
                            const IntegratorConfig& cfg = IntegratorConfig::precise())
{
    params.validate();
    const LinearizedSystem lin = build_linearization(params, virus_free_numeric(params, cfg));
    if (params.beta.is_zero()) {
        R0Result out;
        out.method = R0Method::NoInfection;
        out.value = 0.0;
        out.rho_at_one = infection_monodromy_radius(lin, cfg);
        out.evaluations = 1;
        return out;
    }
    return r0_from_matrices([&](double t) { return lin.F(t); }, [&](double t) { return lin.G(t); }, lin.period, tol,
                            cfg);
}

/// p beta k mu / (c (d + delta)(d + k)(d + c1 mu)) for constant coefficients.
inline double r0_autonomous(double mu, double beta, double d, double k, double delta, double p, double c, double c1)
{
    return p * beta * k * mu / (c * (d + delta) * (d + k) * (d + c1 * mu));
}

/// Closed form evaluated at the coefficient means (exact when the amplitudes are zero).
inline double r0_autonomous(const ModelParameters& params)
{
    return r0_autonomous(params.mu.mean, params.beta.mean, params.d.mean, params.k, params.delta, params.p, params.c,
                         params.c1);
}

} // namespace wihost
