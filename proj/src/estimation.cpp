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
#include "polmimo/estimation.hpp"

#include "polmimo/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polmimo
{

NormalizedRegion normalize_region(const SnapshotSet &snapshots)
{
    snapshots.validate();
    if (snapshots.size() == 0)
        throw std::invalid_argument("normalize_region: empty snapshot set");
    const PolarizationLayout &layout = snapshots.layout;
    const Index n_co = layout.copolar_count();
    if (n_co == 0)
        throw DegenerateInputError("normalize_region: layout has no co-polarized sub-links");

    double power = 0.0;
    for (const ComplexMatrix &h : snapshots.snapshots)
        for (Index t = 0; t < layout.n_tx(); ++t)
            for (Index r = 0; r < layout.n_rx(); ++r)
                if (layout.tx()[t] == layout.rx()[r])
                    power += std::norm(h(r, t));
    power /= static_cast<double>(snapshots.size());
    if (!(power > 0.0) || !std::isfinite(power))
        throw DegenerateInputError("normalize_region: co-polarized power is zero");

    NormalizedRegion out{snapshots, std::sqrt(static_cast<double>(n_co) / power)};
    for (ComplexMatrix &h : out.snapshots.snapshots)
        h *= out.scale;
    return out;
}

SecondOrderStats estimate_moments(const SnapshotSet &snapshots)
{
    snapshots.validate();
    if (snapshots.size() < 2)
        throw std::invalid_argument("estimate_moments: need at least two snapshots");
    const Index n_tx = snapshots.layout.n_tx();
    const Index n = snapshots.layout.n_links();

    ComplexMatrix r = ComplexMatrix::Zero(n, n);
    ComplexMatrix t = ComplexMatrix::Zero(n, n);
    ComplexMatrix r_tx = ComplexMatrix::Zero(n_tx, n_tx);
    ComplexMatrix outer(n, n);
    for (const ComplexMatrix &h : snapshots.snapshots)
    {
        const ComplexVector v = vec(h);
        outer.noalias() = v * v.adjoint();
        r += outer;
        t += v.squaredNorm() * outer;
        r_tx.noalias() += h.transpose() * h.conjugate();
    }
    const double inv = 1.0 / static_cast<double>(snapshots.size());
    SecondOrderStats s;
    s.r = hermitian_part(r * inv);
    s.t = hermitian_part(t * inv);
    s.r_tx = hermitian_part(r_tx * inv);
    s.sample_count = snapshots.size();
    return s;
}

double moment_method_kfactor(const std::vector<Complex> &gains)
{
    if (gains.size() < 2)
        throw std::invalid_argument("moment_method_kfactor: need at least two samples");
    double mean = 0.0;
    for (const Complex &g : gains)
        mean += std::norm(g);
    mean /= static_cast<double>(gains.size());
    double var = 0.0;
    for (const Complex &g : gains)
    {
        const double d = std::norm(g) - mean;
        var += d * d;
    }
    var /= static_cast<double>(gains.size());

    if (!(mean > 0.0))
        return 0.0;
    if (var == 0.0)
        return std::numeric_limits<double>::infinity();
    const double disc = mean * mean - var;
    if (disc <= 0.0)
        return 0.0;
    const double root = std::sqrt(disc);
    return root / (mean - root);
}

PairKFactors greenstein_kfactors(const SnapshotSet &snapshots)
{
    snapshots.validate();
    const PolarizationLayout &layout = snapshots.layout;
    PairKFactors out{};
    std::vector<Complex> series(snapshots.size());
    for (Pair p : kAllPairs)
    {
        const std::vector<Index> idx = layout.links(p);
        if (idx.empty())
        {
            out[p] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double sum = 0.0;
        for (Index i : idx)
        {
            const Index t = i / layout.n_rx(), r = i % layout.n_rx();
            for (std::size_t s = 0; s < snapshots.size(); ++s)
                series[s] = snapshots.snapshots[s](r, t);
            sum += moment_method_kfactor(series);
        }
        out[p] = sum / static_cast<double>(idx.size());
    }
    return out;
}

} // namespace polmimo
