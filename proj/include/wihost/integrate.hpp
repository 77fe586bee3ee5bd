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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace wihost
{

template <int N>
using Vector = Eigen::Matrix<double, N, 1>;

template <int N>
using Matrix = Eigen::Matrix<double, N, N>;

/**
 * @brief Step-size control settings of the adaptive Runge-Kutta integrator.
 */
struct IntegratorConfig {
    double rel_tol{1e-6};
    double abs_tol{1e-9};
    double initial_step{1e-2};
    double max_step{1.0};
    std::size_t max_steps{2'000'000};

    /// Tolerances for plain simulation.
    static IntegratorConfig simulation()
    {
        return {};
    }

    /// Tolerances for monodromy matrices, R0 and periodic orbits.
    static IntegratorConfig precise()
    {
        return {1e-9, 1e-12, 1e-3, 0.5, 2'000'000};
    }

    void validate() const
    {
        auto fail = [](const std::string& msg) {
            throw Error(ErrorCode::ValidationError, "integrator." + msg);
        };
        if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
            fail("rel_tol: must be finite and > 0");
        }
        if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) {
            fail("abs_tol: must be finite and > 0");
        }
        if (!(initial_step > 0.0) || !std::isfinite(initial_step)) {
            fail("initial_step: must be finite and > 0");
        }
        if (!(max_step >= initial_step) || !std::isfinite(max_step)) {
            fail("max_step: must be finite and >= initial_step");
        }
        if (max_steps == 0) {
            fail("max_steps: must be > 0");
        }
    }

    bool operator==(const IntegratorConfig&) const = default;
};

struct StepStats {
    std::size_t accepted{};
    std::size_t rejected{};

    std::size_t steps() const
    {
        return accepted + rejected;
    }
};

/// Samples and end state of one integration run.
template <int N>
struct Solution {
    std::vector<double> times;
    std::vector<Vector<N>> states;
    Vector<N> final_state;
    StepStats stats;
};

template <int N>
struct MatrixSolution {
    Matrix<N> end_matrix;
    StepStats stats;
};

/// Projection hook that leaves every accepted state unchanged.
struct NoProjection {
    template <class V>
    bool operator()(double, V&) const
    {
        return false;
    }
};

namespace detail
{

// Dormand-Prince 5(4) tableau with Hairer's 4th-order continuous extension.
struct DormandPrince {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                            a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                            b6 = 11.0 / 84.0;

    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

template <class V>
bool all_finite(const V& v)
{
    return v.allFinite();
}

} // namespace detail

/**
 * @brief Integrates y' = f(t, y) from t0 to t1 with an embedded Dormand-Prince 5(4) pair.
 *
 * Local error is measured in the RMS norm of err_i / (abs_tol + rel_tol * max(|y_i|, |y1_i|))
 * and the step is adapted with a proportional-integral controller.
 *
 * If `output_times` is empty, every accepted step end is recorded. Otherwise the solution is
 * sampled exactly at those times (which must be nondecreasing and inside [t0, t1]) using the
 * continuous extension. t0 and t1 are always part of the returned samples.
 *
 * `project(t, y)` is called on every accepted state and every dense sample and may modify it
 * (returning true if it did). It is how simulations clamp round-off negativity.
 *
 * @throws Error StepLimitExceeded, NonFiniteState
 */
template <int N, class RHS, class Projector = NoProjection>
Solution<N> integrate(RHS&& f, double t0, double t1, const Vector<N>& y0, const IntegratorConfig& cfg,
                      std::span<const double> output_times = {}, Projector project = {})
{
    using DP = detail::DormandPrince;
    cfg.validate();
    if (!(t1 > t0)) {
        throw Error(ErrorCode::ValidationError, "integrate: t1 must be greater than t0");
    }
    if (!detail::all_finite(y0)) {
        throw Error(ErrorCode::NonFiniteState, "integrate: initial state is not finite");
    }
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < t0 || output_times[i] > t1 || (i > 0 && output_times[i] < output_times[i - 1])) {
            throw Error(ErrorCode::ValidationError, "integrate: output times must be nondecreasing within [t0, t1]");
        }
    }

    constexpr double safety = 0.9;
    constexpr double min_factor = 0.2;
    constexpr double max_factor = 5.0;
    constexpr double alpha = 0.7 / 5.0;
    constexpr double beta = 0.4 / 5.0;

    const bool dense = !output_times.empty();
    std::size_t next_out = 0;
    while (next_out < output_times.size() && output_times[next_out] == t0) {
        ++next_out;
    }

    Solution<N> sol;
    Vector<N> y = y0;
    project(t0, y);
    sol.times.push_back(t0);
    sol.states.push_back(y);

    double t = t0;
    double h = std::min({cfg.initial_step, cfg.max_step, t1 - t0});
    double err_prev = 1.0;
    bool prev_rejected = false;

    Vector<N> k1 = f(t, y);
    if (!detail::all_finite(k1)) {
        throw Error(ErrorCode::NonFiniteState, "integrate: vector field is not finite at t = " + std::to_string(t));
    }
    Vector<N> k2, k3, k4, k5, k6, k7, y1, tmp;

    while (t < t1) {
        if (sol.stats.steps() >= cfg.max_steps) {
            throw Error(ErrorCode::StepLimitExceeded,
                        "integrate: " + std::to_string(cfg.max_steps) + " steps reached at t = " + std::to_string(t));
        }
        const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        bool last = false;
        if (t + h >= t1 || t1 - (t + h) <= h_min) {
            h = t1 - t;
            last = true;
        }

        tmp = y + h * DP::a21 * k1;
        k2 = f(t + DP::c2 * h, tmp);
        tmp = y + h * (DP::a31 * k1 + DP::a32 * k2);
        k3 = f(t + DP::c3 * h, tmp);
        tmp = y + h * (DP::a41 * k1 + DP::a42 * k2 + DP::a43 * k3);
        k4 = f(t + DP::c4 * h, tmp);
        tmp = y + h * (DP::a51 * k1 + DP::a52 * k2 + DP::a53 * k3 + DP::a54 * k4);
        k5 = f(t + DP::c5 * h, tmp);
        tmp = y + h * (DP::a61 * k1 + DP::a62 * k2 + DP::a63 * k3 + DP::a64 * k4 + DP::a65 * k5);
        k6 = f(t + h, tmp);
        y1 = y + h * (DP::b1 * k1 + DP::b3 * k3 + DP::b4 * k4 + DP::b5 * k5 + DP::b6 * k6);
        const double t_new = last ? t1 : t + h;
        k7 = f(t_new, y1);

        const Vector<N> err_vec = h * (DP::e1 * k1 + DP::e3 * k3 + DP::e4 * k4 + DP::e5 * k5 + DP::e6 * k6 + DP::e7 * k7);
        const Vector<N> scale = (cfg.abs_tol + cfg.rel_tol * y.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
        const double err = std::sqrt((err_vec.array() / scale.array()).square().mean());

        if (!std::isfinite(err) || !detail::all_finite(y1) || !detail::all_finite(k7)) {
            ++sol.stats.rejected;
            h *= 0.25;
            prev_rejected = true;
            if (h < h_min) {
                throw Error(ErrorCode::NonFiniteState, "integrate: state became non-finite near t = " + std::to_string(t));
            }
            continue;
        }

        if (err <= 1.0) {
            ++sol.stats.accepted;
            if (dense) {
                // Continuous extension coefficients for this step.
                const Vector<N> ydiff = y1 - y;
                const Vector<N> bspl = h * k1 - ydiff;
                const Vector<N> r4 = ydiff - h * k7 - bspl;
                const Vector<N> r5 =
                    h * (DP::d1 * k1 + DP::d3 * k3 + DP::d4 * k4 + DP::d5 * k5 + DP::d6 * k6 + DP::d7 * k7);
                while (next_out < output_times.size() && output_times[next_out] < t_new) {
                    const double theta = (output_times[next_out] - t) / h;
                    const double theta1 = 1.0 - theta;
                    Vector<N> sample = y + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
                    project(output_times[next_out], sample);
                    sol.times.push_back(output_times[next_out]);
                    sol.states.push_back(sample);
                    ++next_out;
                }
            }
            t = t_new;
            y = y1;
            if (project(t, y)) {
                k7 = f(t, y);
            }
            k1 = k7;
            if (dense) {
                // Requested times landing exactly on the step end.
                while (next_out < output_times.size() && output_times[next_out] == t && t < t1) {
                    sol.times.push_back(t);
                    sol.states.push_back(y);
                    ++next_out;
                }
            }
            else if (t < t1) {
                sol.times.push_back(t);
                sol.states.push_back(y);
            }

            const double err_c = std::max(err, 1e-10);
            double factor = safety * std::pow(err_c, -alpha) * std::pow(err_prev, beta);
            factor = std::clamp(factor, min_factor, max_factor);
            if (prev_rejected) {
                factor = std::min(factor, 1.0);
            }
            err_prev = std::max(err, 1e-4);
            prev_rejected = false;
            h = std::min(h * factor, cfg.max_step);
        }
        else {
            ++sol.stats.rejected;
            prev_rejected = true;
            h *= std::max(min_factor, safety * std::pow(err, -0.2));
            if (h < h_min) {
                throw Error(ErrorCode::StepLimitExceeded, "integrate: step size underflow at t = " + std::to_string(t));
            }
        }
    }

    // Remaining requested times equal to t1.
    while (next_out < output_times.size()) {
        ++next_out;
    }
    sol.times.push_back(t1);
    sol.states.push_back(y);
    sol.final_state = y;
    return sol;
}

/**
 * @brief Solves M' = A(t) M from M(t0) = M0. With M0 = I the result is the fundamental
 * matrix (evolution operator) over [t0, t1].
 */
template <int N, class MatrixFn>
MatrixSolution<N> integrate_matrix(MatrixFn&& a_of_t, double t0, double t1, const Matrix<N>& m0,
                                   const IntegratorConfig& cfg)
{
    constexpr int NN = N * N;
    auto field = [&](double t, const Vector<NN>& y) -> Vector<NN> {
        const Eigen::Map<const Matrix<N>> m(y.data());
        Vector<NN> dy;
        Eigen::Map<Matrix<N>>(dy.data()) = a_of_t(t) * m;
        return dy;
    };
    Vector<NN> y0;
    Eigen::Map<Matrix<N>>(y0.data()) = m0;
    const auto sol = integrate<NN>(field, t0, t1, y0, cfg);

    MatrixSolution<N> out;
    out.end_matrix = Eigen::Map<const Matrix<N>>(sol.final_state.data());
    out.stats = sol.stats;
    if (!out.end_matrix.allFinite()) {
        throw Error(ErrorCode::NonFiniteState, "integrate_matrix: end matrix is not finite");
    }
    return out;
}

} // namespace wihost
