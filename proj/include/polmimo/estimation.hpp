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

#include <vector>

namespace polmimo
{

struct NormalizedRegion
{
    SnapshotSet snapshots;
    double scale = 1.0;
};

/// Scales the region so that the mean co-polarized power equals the number of
/// co-polarized sub-links. Throws DegenerateInputError when that power is zero.
NormalizedRegion normalize_region(const SnapshotSet &snapshots);

/// Sample means (divisor n) of h h^H, ||h||^2 h h^H and H^T H^*, each Hermitian
/// symmetrized. Needs at least two snapshots.
SecondOrderStats estimate_moments(const SnapshotSet &snapshots);

/// Greenstein moment-method K-factor of a scalar gain series. Returns 0 when the
/// power variance exceeds the squared mean power and infinity for constant power.
double moment_method_kfactor(const std::vector<Complex> &gains);

/// Moment-method estimate per sub-link, averaged over the sub-links of each pair.
PairKFactors greenstein_kfactors(const SnapshotSet &snapshots);

} // namespace polmimo
