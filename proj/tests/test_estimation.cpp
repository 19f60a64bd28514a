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
#include "polmimo/errors.hpp"
#include "polmimo/estimation.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace polmimo;
using namespace polmimo::testing;

namespace
{

SnapshotSet constant_set(const PolarizationLayout &layout, const ComplexMatrix &h, Index count)
{
    SnapshotSet s{layout, count, 1, {}};
    s.snapshots.assign(static_cast<std::size_t>(count), h);
    return s;
}

SnapshotSet gaussian_set(const PolarizationLayout &layout, Index count, std::uint64_t seed)
{
    const ChannelModel m(layout, DominantSpec{}, ScatterSpec{ComplexMatrix::Identity(layout.n_links(), layout.n_links())});
    return sample_channels(m, count, 1, seed);
}

std::vector<Complex> scalar_series(double k, Index n, std::uint64_t seed)
{
    // Unit total power split as K/(K+1) dominant and 1/(K+1) Rayleigh.
    Engine rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 / (k + 1.0)));
    std::uniform_real_distribution<double> ph(-3.141592653589793, 3.141592653589793);
    const double a = std::sqrt(k / (k + 1.0));
    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (Complex &c : out)
        c = std::polar(a, ph(rng)) + Complex(g(rng), g(rng));
    return out;
}

} // namespace

TEST_SUITE("estimation")
{
    TEST_CASE("normalization scale follows the co-polar power")
    {
        const auto layout = PolarizationLayout::single(Polarization::V, 4, 4);
        const ComplexMatrix h = ComplexMatrix::Constant(4, 4, Complex(std::sqrt(0.5), 0.0));
        const NormalizedRegion n = normalize_region(constant_set(layout, h, 3));
        CHECK(n.scale == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(normalize_region(n.snapshots).scale == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("normalized SP Gaussian set has mean ||H||^2 = N exactly")
    {
        const auto layout = PolarizationLayout::single(Polarization::V, 4, 4);
        const NormalizedRegion n = normalize_region(gaussian_set(layout, 200, 3));
        double mean = 0.0;
        for (const ComplexMatrix &h : n.snapshots.snapshots)
            mean += h.squaredNorm();
        CHECK(mean / 200.0 == doctest::Approx(16.0).epsilon(1e-12));
    }

    TEST_CASE("normalization ignores cross-polar power and rejects zero co-polar power")
    {
        const auto layout = PolarizationLayout::dual(2, 2);
        ComplexMatrix h = ComplexMatrix::Zero(2, 2);
        h(1, 0) = 5.0; // TX V to RX H
        CHECK_THROWS_AS(normalize_region(constant_set(layout, h, 2)), DegenerateInputError);
        h(0, 0) = 1.0;
        h(1, 1) = 1.0;
        const NormalizedRegion n = normalize_region(constant_set(layout, h, 2));
        CHECK(n.scale == doctest::Approx(1.0));
        const SecondOrderStats s = estimate_moments(n.snapshots);
        double co = 0.0;
        for (Index i = 0; i < 4; ++i)
            if (is_copolar(layout.pair_of_link(i)))
                co += s.r(i, i).real();
        CHECK(co == doctest::Approx(2.0).epsilon(1e-9));
    }

    TEST_CASE("constant snapshots give exact moments")
    {
        Engine rng(31);
        const auto layout = PolarizationLayout::dual(2, 2);
        const ComplexMatrix h0 = random_matrix(2, 2, rng);
        const SecondOrderStats s = estimate_moments(constant_set(layout, h0, 5));
        const ComplexVector v = vec(h0);
        CHECK(relative_frobenius(s.r, v * v.adjoint()) < 1e-14);
        CHECK(relative_frobenius(s.t, v.squaredNorm() * v * v.adjoint()) < 1e-14);
        CHECK(relative_frobenius(s.r_tx, h0.transpose() * h0.conjugate()) < 1e-14);
        CHECK(s.sample_count == 5);
    }

    TEST_CASE("i.i.d. Gaussian moments: R = I and T = (N + 1) I")
    {
        const auto layout = PolarizationLayout::single(Polarization::V, 2, 2);
        const SecondOrderStats s = estimate_moments(gaussian_set(layout, 100000, 4));
        CHECK(relative_frobenius(s.r, identity(4)) < 0.03);
        CHECK(relative_frobenius(s.t, 5.0 * identity(4)) < 0.05);
    }

    TEST_CASE("trace identity and order invariance")
    {
        Engine rng(32);
        const ChannelModel model = random_model(PolarizationLayout::dual(2, 4), PhaseCoupling::Independent, true, rng);
        SnapshotSet set = sample_channels(model, 8, 8, 1);
        const SecondOrderStats a = estimate_moments(set);
        CHECK(std::abs(a.r_tx.trace() - a.r.trace()) < 1e-9 * a.r.trace().real());
        std::reverse(set.snapshots.begin(), set.snapshots.end());
        const SecondOrderStats b = estimate_moments(set);
        CHECK(relative_frobenius(b.r, a.r) < 1e-13);
        CHECK(relative_frobenius(b.t, a.t) < 1e-13);
        CHECK((a.t - a.t.adjoint()).norm() == 0.0);
    }

    TEST_CASE("estimate_moments needs two snapshots")
    {
        const auto layout = PolarizationLayout::single(Polarization::V, 1, 1);
        CHECK_THROWS_AS(estimate_moments(constant_set(layout, ComplexMatrix::Ones(1, 1), 1)), std::invalid_argument);
        CHECK_THROWS_AS(estimate_moments(SnapshotSet{layout, 0, 0, {}}), std::invalid_argument);
    }

    TEST_CASE("fourth-moment identity becomes more accurate with more samples")
    {
        Engine rng(33);
        const auto layout = PolarizationLayout::dual(2, 2);
        const ChannelModel model(layout, DominantSpec{}, ScatterSpec{random_psd(4, 4, rng)});
        auto gap = [&](Index n)
        {
            const SecondOrderStats s = estimate_moments(sample_channels(model, n, 1, 77));
            return relative_frobenius(s.t, s.r * s.r.trace() + s.r * s.r);
        };
        const double small = gap(500), large = gap(50000);
        CHECK(large < small);
        CHECK(large < 0.03);
    }

    TEST_CASE("moment-method K-factor")
    {
        CHECK(std::isinf(moment_method_kfactor({Complex(1, 0), Complex(0, 1), Complex(-1, 0)})));
        CHECK_THROWS_AS(moment_method_kfactor({}), std::invalid_argument);
        CHECK_THROWS_AS(moment_method_kfactor({Complex(1, 0)}), std::invalid_argument);
        // Variance above the squared mean: no dominant component resolvable.
        CHECK(moment_method_kfactor({Complex(0, 0), Complex(0, 0), Complex(0, 0), Complex(3, 0)}) == 0.0);

        const double rayleigh = moment_method_kfactor(scalar_series(0.0, 100000, 5));
        CHECK(rayleigh >= 0.0);
        CHECK(rayleigh <= 0.05);
        CHECK(moment_method_kfactor(scalar_series(2.0, 100000, 6)) == doctest::Approx(2.0).epsilon(0.05));
    }

    TEST_CASE("Greenstein per-pair averages")
    {
        const ChannelModel model = plant_model(PolarizationLayout::dual(2, 2),
                                               PlantSpec{{6.0, 0.0, 0.0, 3.0}, ComplexMatrix::Identity(4, 4),
                                                         PhaseCoupling::CopolIndependent, {}, {}, {}});
        const PairKFactors k = greenstein_kfactors(sample_channels(model, 200, 100, 8));
        CHECK(k[Pair::VV] == doctest::Approx(6.0).epsilon(0.1));
        CHECK(k[Pair::HH] == doctest::Approx(3.0).epsilon(0.1));
        // The moment estimator is biased upward at K = 0: the square root of a noisy
        // near-zero discriminant does not average out.
        CHECK(k[Pair::VH] < 0.3);
        CHECK(k[Pair::HV] < 0.3);
    }
}
