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

#include "wihost/model.hpp"

#include <numbers>
#include <vector>

namespace wihost::presets
{

/// Circadian forcing, 24 h period.
inline constexpr double circadian_frequency = 2.0 * std::numbers::pi / 24.0;

/// Periodic coefficients used for the circadian scenarios:
/// mu = 0.1 + 0.05 sin, beta = 0.3 + 0.1 sin, d = 0.01 + 0.005 sin.
inline ModelParameters circadian_base()
{
    ModelParameters p;
    p.mu = {0.1, 0.05, circadian_frequency};
    p.beta = {0.3, 0.1, circadian_frequency};
    p.d = {0.01, 0.005, circadian_frequency};
    p.c1 = 0.1;
    p.c2 = 0.1;
    p.k = 0.2;
    p.p = 0.5;
    return p;
}

/// delta = 0.09, c = 0.18 scenario.
inline ModelParameters fig1()
{
    ModelParameters p = circadian_base();
    p.delta = 0.09;
    p.c = 0.18;
    return p;
}

/// fig1() with beta scaled down 100-fold, which puts R0 well below one.
inline ModelParameters fig1_extinction()
{
    ModelParameters p = fig1();
    p.beta.mean /= 100.0;
    p.beta.amplitude /= 100.0;
    return p;
}

/// delta = 0.1, c = 0.1 scenario (persistent infection).
inline ModelParameters fig2()
{
    ModelParameters p = circadian_base();
    p.delta = 0.1;
    p.c = 0.1;
    return p;
}

/// Copy with all amplitudes set to zero (time-averaged model).
inline ModelParameters autonomous(ModelParameters p)
{
    p.mu.amplitude = 0.0;
    p.beta.amplitude = 0.0;
    p.d.amplitude = 0.0;
    return p;
}

/// Initial conditions used by the time-series scenarios.
inline std::vector<State> initial_conditions()
{
    return {{10.0, 1.0, 1.0, 1.0}, {5.0, 2.0, 0.5, 3.0}, {20.0, 0.1, 0.1, 0.1}, {2.0, 0.5, 2.0, 1.0}};
}

} // namespace wihost::presets
