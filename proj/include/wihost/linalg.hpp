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

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <vector>

namespace wihost
{

/// Eigenvalues of a small real matrix, sorted by modulus (then real, then imaginary part) descending.
template <class Derived>
std::vector<std::complex<double>> sorted_eigenvalues(const Eigen::MatrixBase<Derived>& m)
{
    using Plain = typename Derived::PlainObject;
    Eigen::EigenSolver<Plain> solver(m.eval(), /*computeEigenvectors=*/false);
    const auto& ev = solver.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (std::abs(a) != std::abs(b)) {
            return std::abs(a) > std::abs(b);
        }
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
    return out;
}

/// Largest eigenvalue modulus.
template <class Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& m)
{
    const auto ev = sorted_eigenvalues(m);
    return ev.empty() ? 0.0 : std::abs(ev.front());
}

} // namespace wihost
