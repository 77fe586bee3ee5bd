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
// Independent reference computations for the test suites. Nothing here calls into the
// integrator or the eigen-solver used by the library.
#pragma once

#include "wihost/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>

namespace wihost::oracle
{

/// exp(A) by scaling and squaring of a truncated Taylor series.
inline Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a)
{
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.125) {
        ++squarings;
    }
    const Eigen::MatrixXd scaled = a / std::ldexp(1.0, squarings);
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd term = result;
    for (int n = 1; n <= 24; ++n) {
        term = term * scaled / static_cast<double>(n);
        result += term;
    }
    for (int i = 0; i < squarings; ++i) {
        result = result * result;
    }
    return result;
}

/// Dominant eigenvalue modulus of a nonnegative matrix by power iteration.
inline double power_iteration(const Eigen::MatrixXd& m, int iterations = 10000)
{
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
    double estimate = 0.0;
    for (int i = 0; i < iterations; ++i) {
        const Eigen::VectorXd w = m * v;
        estimate = w.norm() / v.norm();
        v = w / w.norm();
    }
    return estimate;
}

/// Model right-hand side written out component by component.
inline std::array<double, 4> rhs_by_hand(double t, double T, double E, double I, double V, const ModelParameters& p)
{
    const double mu = p.mu.mean + p.mu.amplitude * std::sin(p.mu.angular_frequency * t);
    const double beta = p.beta.mean + p.beta.amplitude * std::sin(p.beta.angular_frequency * t);
    const double d = p.d.mean + p.d.amplitude * std::sin(p.d.angular_frequency * t);
    const double inc = beta * T * V / ((1.0 + p.c1 * T) * (1.0 + p.c2 * V));
    return {mu - inc - d * T, inc - p.k * E - d * E, p.k * E - p.delta * I - d * I, p.p * I - p.c * V};
}

/// Central finite-difference Jacobian of the library rhs.
inline Matrix4 finite_difference_jacobian(double t, const StateVector& x, const ModelParameters& p, double step = 1e-6)
{
    Matrix4 jac;
    for (int j = 0; j < 4; ++j) {
        StateVector xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        jac.col(j) = (rhs(t, xp, p) - rhs(t, xm, p)) / (2.0 * step);
    }
    return jac;
}

/**
 * Interior equilibrium of the time-invariant model (coefficient means), by bisection on T.
 * E, I, V follow from T through the steady-state relations of the E, I, V equations.
 */
inline StateVector endemic_equilibrium(const ModelParameters& p)
{
    const double mu = p.mu.mean, beta = p.beta.mean, d = p.d.mean;
    auto others = [&](double T) {
        const double E = (mu - d * T) / (p.k + d);
        const double I = p.k * E / (p.delta + d);
        const double V = p.p * I / p.c;
        return StateVector{T, E, I, V};
    };
    auto mismatch = [&](double T) {
        const StateVector x = others(T);
        return beta * T * x[3] / ((1.0 + p.c1 * T) * (1.0 + p.c2 * x[3])) - (mu - d * T);
    };
    double lo = 1e-14;
    double hi = mu / d * (1.0 - 1e-9);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mismatch(mid) < 0.0 ? lo : hi) = mid;
    }
    return others(0.5 * (lo + hi));
}

/// Random valid parameter set around the circadian magnitudes, 24 h period.
inline ModelParameters random_parameters(std::mt19937_64& rng, bool periodic)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto between = [&](double a, double b) {
        return a + (b - a) * unit(rng);
    };
    auto log_between = [&](double a, double b) {
        return std::exp(between(std::log(a), std::log(b)));
    };
    const double omega = 2.0 * M_PI / 24.0;
    ModelParameters p;
    p.mu = {between(0.05, 0.2), 0.0, omega};
    p.d = {between(0.005, 0.05), 0.0, omega};
    p.beta = {1.0, 0.0, omega};
    p.k = between(0.05, 0.5);
    p.delta = between(0.02, 0.3);
    p.p = between(0.1, 1.0);
    p.c = between(0.05, 0.5);
    p.c1 = between(0.0, 0.3);
    p.c2 = between(0.0, 0.3);
    if (periodic) {
        p.mu.amplitude = p.mu.mean * between(0.0, 0.9);
        p.d.amplitude = p.d.mean * between(0.0, 0.9);
    }
    // Pick beta so that the time-averaged R0 lands log-uniformly in [0.1, 10].
    const double target = log_between(0.1, 10.0);
    const double r_unit = p.p * p.k * p.mu.mean /
                          (p.c * (p.d.mean + p.delta) * (p.d.mean + p.k) * (p.d.mean + p.c1 * p.mu.mean));
    p.beta.mean = target / r_unit;
    if (periodic) {
        p.beta.amplitude = p.beta.mean * between(0.0, 0.9);
    }
    return p;
}

} // namespace wihost::oracle
