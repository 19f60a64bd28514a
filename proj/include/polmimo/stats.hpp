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

#include "polmimo/matrix_kit.hpp"

#include <cstddef>

namespace polmimo
{

/// Moment triple of one stationarity region.
///
///   r    = E{h h^H}          with h = vec(H), size N_TX N_RX
///   r_tx = E{H^T H^*}        size N_TX
///   t    = E{(h h^H)^2}      size N_TX N_RX
///
/// sample_count is zero for analytic statistics.
struct SecondOrderStats
{
    ComplexMatrix r;
    ComplexMatrix r_tx;
    ComplexMatrix t;
    std::size_t sample_count = 0;
};

/// Transmit correlation from the full correlation: [R_TX]_{k,l} = sum_r R_{(k,r),(l,r)},
/// where (k,r) addresses vec index k*n_rx + r.
ComplexMatrix tx_correlation_from_full(const ComplexMatrix &r, Index n_tx, Index n_rx);

} // namespace polmimo
