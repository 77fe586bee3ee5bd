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
#include "oracles.hpp"

#include "wihost/integrate.hpp"
#include "wihost/periodic.hpp"
#include "wihost/presets.hpp"
#include "wihost/reproduction.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace wihost;

namespace
{

IntegratorConfig tight()
{
    return {1e-11, 1e-14, 1e-3, 0.5, 1'000'000};
}

auto decay = [](double, const Vector<1>& y) -> Vector<1> {
    return -y;
};

} // namespace

TEST(Integrate, ScalarExponentialDecay)
{
    const auto sol = integrate<1>(decay, 0.0, 1.0, Vector<1>{1.0}, tight());
    EXPECT_NEAR(sol.final_state[0], std::exp(-1.0), 1e-8);
    EXPECT_EQ(sol.times.front(), 0.0);
    EXPECT_EQ(sol.times.back(), 1.0);
    EXPECT_GT(sol.stats.accepted, 0u);
}

TEST(Integrate, FixedPointStaysPut)
{
    auto field = [](double, const Vector<1>& y) -> Vector<1> {
        return Vector<1>{0.1 - 0.01 * y[0]};
    };
    const auto sol = integrate<1>(field, 0.0, 100.0, Vector<1>{10.0}, IntegratorConfig::simulation());
    EXPECT_NEAR(sol.final_state[0], 10.0, 1e-12);
}

TEST(Integrate, FullModelStepHalvingConsistency)
{
    const ModelParameters p = presets::fig1();
    auto field = [&](double t, const StateVector& x) -> StateVector {
        return rhs(t, x, p);
    };
    const StateVector x0{10.0, 1.0, 1.0, 1.0};
    IntegratorConfig cfg = IntegratorConfig::precise();
    const StateVector a = integrate<4>(field, 0.0, 240.0, x0, cfg).final_state;
    cfg.rel_tol /= 2.0;
    cfg.abs_tol /= 2.0;
    cfg.initial_step /= 2.0;
    cfg.max_step /= 2.0;
    const StateVector b = integrate<4>(field, 0.0, 240.0, x0, cfg).final_state;
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(a[i], b[i], 1e-6 * std::abs(b[i]));
    }
}

TEST(Integrate, HalvingTolerancesMovesResultLessThanTenTolerances)
{
    const ModelParameters p = presets::fig2();
    auto field = [&](double t, const StateVector& x) -> StateVector {
        return rhs(t, x, p);
    };
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 15.0);
    for (int trial = 0; trial < 10; ++trial) {
        const StateVector x0{u(rng), u(rng), u(rng), u(rng)};
        IntegratorConfig cfg = IntegratorConfig::simulation();
        const StateVector a = integrate<4>(field, 0.0, 240.0, x0, cfg).final_state;
        const double tol = cfg.rel_tol;
        cfg.rel_tol /= 2.0;
        cfg.abs_tol /= 2.0;
        const StateVector b = integrate<4>(field, 0.0, 240.0, x0, cfg).final_state;
        for (int i = 0; i < 4; ++i) {
            EXPECT_LT(std::abs(a[i] - b[i]), 10.0 * tol * std::max(1.0, std::abs(b[i])));
        }
    }
}

TEST(Integrate, DenseOutputHitsRequestedTimes)
{
    std::vector<double> grid;
    for (int i = 0; i <= 70; ++i) {
        grid.push_back(0.1 * i + 0.05 * (i % 3)); // irregular but nondecreasing
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::remove_if(grid.begin(), grid.end(), [](double t) { return t > 7.0; }), grid.end());
    IntegratorConfig cfg = IntegratorConfig::precise();
    cfg.max_step = 5.0;
    const auto sol = integrate<1>(decay, 0.0, 7.0, Vector<1>{1.0}, cfg, grid);
    ASSERT_GE(sol.times.size(), grid.size());
    EXPECT_EQ(sol.times.front(), 0.0);
    EXPECT_EQ(sol.times.back(), 7.0);
    std::size_t j = 0;
    for (double t : grid) {
        while (j < sol.times.size() && sol.times[j] != t) {
            ++j;
        }
        ASSERT_LT(j, sol.times.size()) << "missing sample at " << t;
        EXPECT_NEAR(sol.states[j][0], std::exp(-t), 1e-8) << "t = " << t;
    }
    for (std::size_t i = 1; i < sol.times.size(); ++i) {
        EXPECT_GE(sol.times[i], sol.times[i - 1]);
    }
}

TEST(Integrate, StepLimitExceeded)
{
    IntegratorConfig cfg = IntegratorConfig::precise();
    cfg.max_steps = 5;
    try {
        integrate<1>(decay, 0.0, 100.0, Vector<1>{1.0}, cfg);
        FAIL() << "expected StepLimitExceeded";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StepLimitExceeded);
    }
}

TEST(Integrate, NonFiniteState)
{
    auto bad = [](double, const Vector<1>& y) -> Vector<1> {
        return Vector<1>{y[0] > 5.0 ? std::numeric_limits<double>::quiet_NaN() : y[0]};
    };
    try {
        integrate<1>(bad, 0.0, 10.0, Vector<1>{1.0}, IntegratorConfig::simulation());
        FAIL() << "expected NonFiniteState";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFiniteState);
    }
    EXPECT_THROW(integrate<1>(decay, 0.0, 1.0, Vector<1>{std::nan("")}, IntegratorConfig::simulation()), Error);
}

TEST(Integrate, RejectsBadArguments)
{
    EXPECT_THROW(integrate<1>(decay, 1.0, 1.0, Vector<1>{1.0}, IntegratorConfig::simulation()), Error);
    IntegratorConfig cfg;
    cfg.rel_tol = 0.0;
    EXPECT_THROW(integrate<1>(decay, 0.0, 1.0, Vector<1>{1.0}, cfg), Error);
    cfg = {};
    cfg.max_step = cfg.initial_step / 2.0;
    EXPECT_THROW(cfg.validate(), Error);
    const std::vector<double> outside{0.5, 2.0};
    EXPECT_THROW(integrate<1>(decay, 0.0, 1.0, Vector<1>{1.0}, IntegratorConfig::simulation(), outside), Error);
}

TEST(Integrate, ClampProjectionRemovesRoundoffOnly)
{
    ClampRoundoff clamp{1e-9};
    Vector<3> y{-5e-10, -1e-3, 2.0};
    EXPECT_TRUE(clamp(0.0, y));
    EXPECT_EQ(y[0], 0.0);
    EXPECT_EQ(y[1], -1e-3);
    EXPECT_EQ(y[2], 2.0);
    EXPECT_FALSE(clamp(0.0, y));
}

TEST(IntegrateMatrix, ConstantDiagonal)
{
    const Matrix3 a = -Matrix3::Identity();
    const auto sol = integrate_matrix<3>([&](double) { return a; }, 0.0, 24.0, Matrix3::Identity(),
                                         IntegratorConfig::precise());
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(sol.end_matrix(i, j), i == j ? std::exp(-24.0) : 0.0, 1e-10);
        }
    }
}

TEST(IntegrateMatrix, MatchesMatrixExponential)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.15, 0.15);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix3 a;
        for (int i = 0; i < 9; ++i) {
            a.data()[i] = u(rng);
        }
        a -= 0.1 * Matrix3::Identity();
        const double span = 3.0;
        const auto sol = integrate_matrix<3>([&](double) { return a; }, 1.0, 1.0 + span, Matrix3::Identity(),
                                             IntegratorConfig::precise());
        const Eigen::MatrixXd ref = oracle::matrix_exponential(a * span);
        EXPECT_LT((sol.end_matrix - ref).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(IntegrateMatrix, ColumnsMatchVectorIntegration)
{
    const ModelParameters p = presets::fig1();
    const LinearizedSystem lin = build_linearization(p, virus_free_numeric(p));
    auto minus_g = [&](double t) -> Matrix3 {
        return -lin.G(t);
    };
    const IntegratorConfig cfg = IntegratorConfig::precise();
    const auto sol = integrate_matrix<3>(minus_g, 0.0, lin.period, Matrix3::Identity(), cfg);
    for (int j = 0; j < 3; ++j) {
        auto field = [&](double t, const Vector<3>& y) -> Vector<3> {
            return minus_g(t) * y;
        };
        const Vector<3> col = integrate<3>(field, 0.0, lin.period, Vector<3>::Unit(j), cfg).final_state;
        EXPECT_LT((sol.end_matrix.col(j) - col).cwiseAbs().maxCoeff(), 1e-9) << "column " << j;
    }
}
