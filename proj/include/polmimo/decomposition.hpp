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

#include "polmimo/channel_model.hpp"
#include "polmimo/stats.hpp"

#include <cstdint>
#include <vector>

namespace polmimo
{

/// Split R = r_bar + r_tilde of one region.
struct DecompositionResult
{
    ComplexMatrix r_bar;
    ComplexMatrix r_tilde;
    RealVector coefficients;                  ///< c_k, length n_dp
    std::vector<ComplexVector> eigenvectors;  ///< unit-norm u_k, length n_dp
    RealVector raw_eigenvalues;               ///< signed square roots of the R_bar^2 eigenvalues
    Index n_dp = 0;
};

/// R tr(R) + R^2 - T, Hermitian symmetrized.
ComplexMatrix dominant_square(const SecondOrderStats &stats);

/// Extracts n_dp dominant directions (SP forces n_dp = 1, DP accepts 1..4) and picks
/// each weight as large as possible while the remaining scatter stays PSD.
DecompositionResult decompose(const SecondOrderStats &stats, Index n_dp, LayoutMode mode);

/// Mean over each pair's sub-links of [r_bar]_ii / [r_tilde]_ii. Absent pairs are NaN.
PairKFactors decomposition_kfactors(const DecompositionResult &result, const PolarizationLayout &layout);

/// Draws `count` channels sum_k sqrt(c_k) u_k e^{j phi_k} + r_tilde^{1/2} g with
/// independent uniform phases. Returned with n_time = count, n_freq = 1.
SnapshotSet regenerate(const DecompositionResult &result, const PolarizationLayout &layout, Index count,
                       std::uint64_t seed);

} // namespace polmimo
