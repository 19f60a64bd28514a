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
#include "polmimo/matrix_kit.hpp"
#include "polmimo/random.hpp"

#include <random>

namespace polmimo::testing
{

inline ComplexMatrix random_matrix(Index rows, Index cols, Engine &rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexMatrix a(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            a(i, j) = Complex(n(rng), n(rng));
    return a;
}

/// Random Hermitian PSD matrix of the given rank, normalized to trace n.
inline ComplexMatrix random_psd(Index n, Index rank, Engine &rng)
{
    const ComplexMatrix g = random_matrix(n, rank, rng);
    ComplexMatrix a = g * g.adjoint();
    a *= static_cast<double>(n) / a.trace().real();
    return hermitian_part(a);
}

inline ComplexVector random_phasors(Index n, Engine &rng)
{
    std::uniform_real_distribution<double> u(-3.14159, 3.14159);
    ComplexVector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = std::polar(1.0, u(rng));
    return v;
}

/// Random model with dominant power on the selected pairs and a full-rank random scatter.
inline ChannelModel random_model(const PolarizationLayout &layout, PhaseCoupling coupling, bool cross_pol_dominant,
                                 Engine &rng)
{
    std::uniform_real_distribution<double> amp(0.2, 1.5);
    DominantSpec d;
    d.coupling = coupling;
    for (Pair p : kAllPairs)
    {
        const Index nt = layout.tx_count(tx_of(p)), nr = layout.rx_count(rx_of(p));
        PairDominant &pd = d.pairs[static_cast<std::size_t>(pair_index(p))];
        pd.tx_amplitude = RealVector::Zero(nt);
        pd.rx_amplitude = RealVector::Zero(nr);
        const bool active = is_copolar(p) || cross_pol_dominant;
        for (Index i = 0; i < nt && active; ++i)
            pd.tx_amplitude(i) = amp(rng);
        for (Index i = 0; i < nr && active; ++i)
            pd.rx_amplitude(i) = amp(rng);
        pd.tx_steering = random_phasors(nt, rng);
        pd.rx_steering = random_phasors(nr, rng);
    }
    const Index n = layout.n_links();
    return ChannelModel(layout, d, ScatterSpec{random_psd(n, n, rng)});
}

inline ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

} // namespace polmimo::testing
