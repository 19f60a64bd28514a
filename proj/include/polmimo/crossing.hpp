// SPDX-License-Identifier: Apache-2.0
//
// polmimo - dual-polarized Ricean MIMO channel modelling and analysis
// Copyright (C) 2026 The polmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

#include <array>
#include <functional>
#include <vector>

namespace polmimo
{

/// Eigenvalue data of a single-stream SP setup against a two-stream DP setup.
struct CrossingSpec
{
    double lambda_sp1 = 0.0;
    std::array<double, 2> lambda_dp{};
    std::array<double, 2> lambda_q_dp{};
    double w_sp = 0.0; ///< nats
    double w_dp = 0.0; ///< nats

    double lambda_sum() const noexcept { return lambda_dp[0] * lambda_q_dp[0] + lambda_dp[1] * lambda_q_dp[1]; }
    double lambda_prod() const noexcept
    {
        return lambda_dp[0] * lambda_q_dp[0] * lambda_dp[1] * lambda_q_dp[1];
    }
    double alpha() const;
    /// Throws std::invalid_argument on non-positive eigenvalues or powers, or negative w.
    void validate() const;
};

/// Either a positive crossing SNR (linear) or "DP always better".
struct CrossingResult
{
    bool always_dp = true;
    double rho = 0.0;
    bool tangency = false; ///< discriminant vanished: the curves touch rather than cross

    static CrossingResult dp_always() { return {}; }
    static CrossingResult at(double rho, bool tangency = false) { return {false, rho, tangency}; }
};

/// Crossing of the two Jensen curves: (lambda_sp1 - lambda_sum) / lambda_prod when positive.
CrossingResult rho_cp_jensen(const CrossingSpec &spec);

/// Positive root of lambda_prod rho^2 + (lambda_sum - alpha lambda_sp1) rho + 1 - alpha = 0
/// with alpha = exp(w_dp - w_sp).
CrossingResult rho_cp_lower_bound(const CrossingSpec &spec);

using Curve = std::function<double(double)>;

/// All roots of a - b on the ascending grid, each bisected to 1e-9 relative width.
/// An exact zero on the grid is a root only where the sign flips across it; identical
/// curves give no roots. Throws NumericalError on
/// a non-finite evaluation.
std::vector<double> numeric_crossing(const Curve &a, const Curve &b, const std::vector<double> &rho_grid);

double db_to_linear(double db);
double linear_to_db(double linear);

} // namespace polmimo
