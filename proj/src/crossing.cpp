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
#include "polmimo/crossing.hpp"

#include "polmimo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace polmimo
{

double CrossingSpec::alpha() const { return std::exp(w_dp - w_sp); }

void CrossingSpec::validate() const
{
    if (!(lambda_sp1 > 0.0) || !(lambda_dp[0] > 0.0) || !(lambda_dp[1] > 0.0))
        throw std::invalid_argument("CrossingSpec: transmit eigenvalues must be positive");
    if (!(lambda_q_dp[0] > 0.0) || !(lambda_q_dp[1] > 0.0) ||
        std::abs(lambda_q_dp[0] + lambda_q_dp[1] - 1.0) > 1e-10)
        throw std::invalid_argument("CrossingSpec: DP stream powers must be positive and sum to 1");
    if (!(w_sp >= 0.0) || !(w_dp >= 0.0) || !std::isfinite(w_sp) || !std::isfinite(w_dp))
        throw std::invalid_argument("CrossingSpec: w terms must be finite and non-negative");
}

CrossingResult rho_cp_jensen(const CrossingSpec &spec)
{
    spec.validate();
    const double num = spec.lambda_sp1 - spec.lambda_sum();
    if (!(num > 0.0))
        return CrossingResult::dp_always();
    return CrossingResult::at(num / spec.lambda_prod());
}

CrossingResult rho_cp_lower_bound(const CrossingSpec &spec)
{
    spec.validate();
    const double alpha = spec.alpha();
    const double prod = spec.lambda_prod();
    const double half = (spec.lambda_sp1 * alpha - spec.lambda_sum()) / (2.0 * prod);
    const double disc = half * half + (alpha - 1.0) / prod;
    const double scale = half * half + std::abs(alpha - 1.0) / prod;
    const bool tangent = std::abs(disc) <= 1e-12 * scale;
    if (disc < 0.0 && !tangent)
        return CrossingResult::dp_always();
    const double rho = half + std::sqrt(std::max(disc, 0.0));
    if (!(rho > 0.0))
        return CrossingResult::dp_always();
    return CrossingResult::at(rho, tangent);
}

namespace
{

double checked(const Curve &a, const Curve &b, double rho)
{
    const double va = a(rho), vb = b(rho);
    if (!std::isfinite(va) || !std::isfinite(vb))
    {
        std::ostringstream os;
        os.precision(17);
        os << "numeric_crossing: non-finite curve value at rho = " << rho;
        throw NumericalError(os.str());
    }
    return va - vb;
}

double bisect(const Curve &a, const Curve &b, double x0, double x1, double f0)
{
    while (x1 - x0 > 1e-9 * std::max(std::abs(x0), std::abs(x1)))
    {
        const double mid = 0.5 * (x0 + x1);
        if (mid <= x0 || mid >= x1)
            break;
        const double fm = checked(a, b, mid);
        if (fm == 0.0)
            return mid;
        if ((fm < 0.0) == (f0 < 0.0))
        {
            x0 = mid;
            f0 = fm;
        }
        else
            x1 = mid;
    }
    return 0.5 * (x0 + x1);
}

} // namespace

std::vector<double> numeric_crossing(const Curve &a, const Curve &b, const std::vector<double> &rho_grid)
{
    if (rho_grid.size() < 2)
        throw std::invalid_argument("numeric_crossing: grid needs at least two points");
    for (std::size_t i = 1; i < rho_grid.size(); ++i)
        if (!(rho_grid[i] > rho_grid[i - 1]))
            throw std::invalid_argument("numeric_crossing: grid must be strictly ascending");

    // Exact zeros on the grid only count when the sign differs on both sides of them,
    // so touching or identical curves yield no root.
    std::vector<double> roots;
    double lo = rho_grid[0];
    double f_lo = checked(a, b, lo);
    std::optional<double> first_zero;
    if (f_lo == 0.0)
        first_zero = lo;
    for (std::size_t i = 1; i < rho_grid.size(); ++i)
    {
        const double hi = rho_grid[i];
        const double f_hi = checked(a, b, hi);
        if (f_hi == 0.0)
        {
            if (!first_zero)
                first_zero = hi;
            continue;
        }
        if (f_lo != 0.0 && (f_lo < 0.0) != (f_hi < 0.0))
        {
            if (first_zero)
                roots.push_back(*first_zero);
            else
                roots.push_back(bisect(a, b, lo, hi, f_lo));
        }
        first_zero.reset();
        lo = hi;
        f_lo = f_hi;
    }
    return roots;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

} // namespace polmimo
