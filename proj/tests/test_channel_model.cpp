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
#include "polmimo/channel_model.hpp"
#include "polmimo/errors.hpp"
#include "polmimo/estimation.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace polmimo;
using namespace polmimo::testing;

namespace
{

PlantSpec plant(const PolarizationLayout &layout, std::array<double, 4> k, PhaseCoupling c)
{
    PlantSpec s;
    s.k_factors = k;
    s.scatter = kronecker_scatter(layout, 0.4, 0.2, 6.0);
    s.coupling = c;
    s.tx_angle_deg = {10, 20, 30, -15};
    s.rx_angle_deg = {-5, 40, 15, 25};
    return s;
}

} // namespace

TEST_SUITE("channel_model")
{
    TEST_CASE("layout classification")
    {
        const auto sp = PolarizationLayout::single(Polarization::H, 2, 3);
        CHECK(sp.mode() == LayoutMode::SP);
        CHECK(sp.n_links() == 6);
        CHECK(sp.copolar_count() == 6);
        CHECK(sp.links(Pair::HH).size() == 6);
        CHECK(sp.links(Pair::VV).empty());

        const auto dp = PolarizationLayout::dual(4, 2);
        CHECK(dp.mode() == LayoutMode::DP);
        CHECK(dp.tx()[1] == Polarization::V);
        CHECK(dp.tx()[2] == Polarization::H);
        CHECK(dp.copolar_count() == 4);
        // TX H (index 2) to RX V (index 0) is pair HV at vec index 2 * 2 + 0.
        CHECK(dp.pair_at(2, 0) == Pair::HV);
        CHECK(dp.pair_of_link(4) == Pair::HV);
        CHECK(dp.links(Pair::VH) == std::vector<Index>{1, 3});

        CHECK_THROWS_AS(PolarizationLayout({Polarization::V, Polarization::V, Polarization::H}, {Polarization::V}),
                        std::invalid_argument);
        CHECK_THROWS_AS(PolarizationLayout({Polarization::V}, {Polarization::H}), std::invalid_argument);
        CHECK_THROWS_AS(PolarizationLayout::dual(3, 2), std::invalid_argument);
    }

    TEST_CASE("pair helpers")
    {
        CHECK(make_pair(Polarization::V, Polarization::H) == Pair::VH);
        CHECK(tx_of(Pair::HV) == Polarization::H);
        CHECK(rx_of(Pair::HV) == Polarization::V);
        CHECK(pair_name(Pair::HH) == "HH");
        CHECK(parse_coupling("shared") == PhaseCoupling::Shared);
        CHECK_THROWS_AS(parse_coupling("weird"), std::invalid_argument);
    }

    TEST_CASE("model validation")
    {
        const auto layout = PolarizationLayout::dual(2, 2);
        const ComplexMatrix scatter = ComplexMatrix::Identity(4, 4);
        DominantSpec d;
        d.pairs[0].tx_amplitude = RealVector::Ones(2);
        CHECK_THROWS_AS(ChannelModel(layout, d, ScatterSpec{scatter}), std::invalid_argument);

        d = {};
        d.pairs[0].tx_amplitude = RealVector::Constant(1, -1.0);
        CHECK_THROWS_AS(ChannelModel(layout, d, ScatterSpec{scatter}), std::invalid_argument);

        d = {};
        d.pairs[3].rx_steering = ComplexVector::Constant(1, Complex(0.5, 0.0));
        CHECK_THROWS_AS(ChannelModel(layout, d, ScatterSpec{scatter}), std::invalid_argument);

        d = {};
        ComplexMatrix bad = scatter;
        bad(2, 2) = -1.0;
        CHECK_THROWS_AS(ChannelModel(layout, d, ScatterSpec{bad}), NotPsdError);
        CHECK_THROWS_AS(ChannelModel(layout, d, ScatterSpec{ComplexMatrix::Identity(3, 3)}), std::invalid_argument);

        d = {};
        d.coupling = PhaseCoupling::CopolIndependent;
        d.pairs[1].tx_amplitude = RealVector::Ones(1);
        d.pairs[1].rx_amplitude = RealVector::Ones(1);
        CHECK_THROWS_AS(ChannelModel(layout, d, ScatterSpec{scatter}), std::invalid_argument);

        d = {};
        d.coupling = PhaseCoupling::Custom;
        d.custom_correlation = ComplexMatrix::Identity(4, 4) * 2.0;
        CHECK_THROWS_AS(ChannelModel(layout, d, ScatterSpec{scatter}), std::invalid_argument);
        d.custom_correlation = ComplexMatrix::Ones(4, 4);
        d.custom_correlation(0, 1) = d.custom_correlation(1, 0) = -1.0;
        CHECK_THROWS_AS(ChannelModel(layout, d, ScatterSpec{scatter}), std::invalid_argument);
    }

    TEST_CASE("coupling modes fix the phase correlation")
    {
        const auto layout = PolarizationLayout::dual(2, 2);
        DominantSpec d;
        d.coupling = PhaseCoupling::Shared;
        ChannelModel shared(layout, d, ScatterSpec{ComplexMatrix::Identity(4, 4)});
        CHECK(shared.phase_correlation() == ComplexMatrix::Ones(4, 4));
        d.coupling = PhaseCoupling::Independent;
        ChannelModel indep(layout, d, ScatterSpec{ComplexMatrix::Identity(4, 4)});
        CHECK(indep.phase_correlation() == ComplexMatrix::Identity(4, 4));
    }

    TEST_CASE("analytic statistics: trace identity and closed-form fourth moment")
    {
        Engine rng(21);
        for (int trial = 0; trial < 10; ++trial)
        {
            const auto layout = trial % 2 ? PolarizationLayout::dual(4, 2) : PolarizationLayout::single(Polarization::V, 3, 2);
            const ChannelModel model = random_model(layout, PhaseCoupling::Independent, true, rng);
            const SecondOrderStats s = analytic_stats(model);
            CHECK(std::abs(s.r_tx.trace() - s.r.trace()) < 1e-9 * s.r.trace().real());
            CHECK((s.r - s.r.adjoint()).norm() < 1e-12);
            CHECK((s.t - s.t.adjoint()).norm() < 1e-10 * s.t.norm());
            CHECK(hermitian_eig(s.r_tx).eigenvalues.minCoeff() > -1e-10);
            CHECK(s.sample_count == 0);
        }
    }

    TEST_CASE("Gaussian-only model has T = R tr(R) + R^2")
    {
        Engine rng(22);
        const auto layout = PolarizationLayout::dual(2, 2);
        const ChannelModel model(layout, DominantSpec{}, ScatterSpec{random_psd(4, 4, rng)});
        const SecondOrderStats s = analytic_stats(model);
        CHECK(relative_frobenius(s.t, s.r * s.r.trace() + s.r * s.r) < 1e-12);
    }

    TEST_CASE("pure rank-one dominant model has T = P Rbar")
    {
        // h = m e^{j phi}: (h h^H)^2 = ||m||^2 m m^H.
        Engine rng(23);
        const auto layout = PolarizationLayout::single(Polarization::V, 2, 2);
        DominantSpec d;
        d.pairs[0].tx_amplitude = RealVector::Constant(2, 0.7);
        d.pairs[0].rx_amplitude = RealVector::Constant(2, 1.3);
        d.pairs[0].tx_steering = random_phasors(2, rng);
        d.pairs[0].rx_steering = random_phasors(2, rng);
        const ChannelModel model(layout, d, ScatterSpec{ComplexMatrix::Zero(4, 4)});
        const SecondOrderStats s = analytic_stats(model);
        const double p = model.link_amplitudes().squaredNorm();
        CHECK(p == doctest::Approx(4 * 0.49 * 1.69));
        CHECK(relative_frobenius(s.t, p * s.r) < 1e-12);
    }

    TEST_CASE("dominant covariance uses the phasor correlation between pairs")
    {
        const auto layout = PolarizationLayout::dual(2, 2);
        DominantSpec d;
        for (auto &pd : d.pairs)
        {
            pd.tx_amplitude = RealVector::Ones(1);
            pd.rx_amplitude = RealVector::Ones(1);
        }
        d.coupling = PhaseCoupling::Shared;
        const ComplexMatrix shared =
            analytic_dominant_covariance(ChannelModel(layout, d, ScatterSpec{ComplexMatrix::Identity(4, 4)}));
        CHECK(numerical_rank(shared, 1e-10) == 1);
        d.coupling = PhaseCoupling::Independent;
        const ComplexMatrix indep =
            analytic_dominant_covariance(ChannelModel(layout, d, ScatterSpec{ComplexMatrix::Identity(4, 4)}));
        CHECK((indep - ComplexMatrix::Identity(4, 4)).norm() < 1e-14);
    }

    TEST_CASE("scaled multiplies the channel")
    {
        Engine rng(24);
        const ChannelModel model = random_model(PolarizationLayout::dual(2, 2), PhaseCoupling::Independent, true, rng);
        const SecondOrderStats a = analytic_stats(model);
        const SecondOrderStats b = analytic_stats(model.scaled(3.0));
        CHECK(relative_frobenius(b.r, 9.0 * a.r) < 1e-12);
        CHECK(relative_frobenius(b.t, 81.0 * a.t) < 1e-12);
        CHECK_THROWS_AS(model.scaled(-1.0), std::invalid_argument);
    }

    TEST_CASE("sampling is reproducible and addressed per snapshot")
    {
        Engine rng(25);
        const ChannelModel model = random_model(PolarizationLayout::dual(2, 2), PhaseCoupling::Independent, true, rng);
        const SnapshotSet a = sample_channels(model, 4, 3, 99);
        const SnapshotSet b = sample_channels(model, 2, 3, 99);
        const SnapshotSet c = sample_channels(model, 4, 3, 100);
        CHECK(a.size() == 12);
        CHECK(a.at(1, 2) == b.at(1, 2));
        CHECK(a.at(0, 0) != c.at(0, 0));
        CHECK(a.at(3, 1).rows() == 2);
        CHECK_NOTHROW(a.validate());
    }

    TEST_CASE("sample correlation converges to the analytic one")
    {
        const auto layout = PolarizationLayout::dual(2, 2);
        const ChannelModel model = plant_model(layout, plant(layout, {3.0, 0.5, 0.2, 2.0}, PhaseCoupling::Independent));
        const SecondOrderStats truth = analytic_stats(model);
        const SecondOrderStats est = estimate_moments(sample_channels(model, 16, 128, 7));
        CHECK(relative_frobenius(est.r, truth.r) < 0.05);
    }

    TEST_CASE("planting reproduces the target K-factors")
    {
        const auto layout = PolarizationLayout::dual(4, 4);
        const ChannelModel model = plant_model(layout, plant(layout, {4.0, 0.3, 0.1, 2.5}, PhaseCoupling::Independent));
        const PairKFactors k = ground_truth_kfactors(model);
        CHECK(k[Pair::VV] == doctest::Approx(4.0));
        CHECK(k[Pair::VH] == doctest::Approx(0.3));
        CHECK(k[Pair::HV] == doctest::Approx(0.1));
        CHECK(k[Pair::HH] == doctest::Approx(2.5));

        const auto h_layout = PolarizationLayout::single(Polarization::H, 2, 2);
        const ChannelModel sp = plant_model(h_layout, plant(h_layout, {0, 0, 0, 6.0}, PhaseCoupling::Independent));
        const PairKFactors ks = ground_truth_kfactors(sp);
        CHECK(ks[Pair::HH] == doctest::Approx(6.0));
        CHECK(std::isnan(ks[Pair::VV]));
    }

    TEST_CASE("kfactors_from_split edge cases")
    {
        const auto layout = PolarizationLayout::single(Polarization::V, 1, 2);
        ComplexMatrix bar = ComplexMatrix::Zero(2, 2), tilde = ComplexMatrix::Zero(2, 2);
        bar(0, 0) = 1.0;
        tilde(1, 1) = 1.0;
        CHECK(std::isinf(kfactors_from_split(bar, tilde, layout)[Pair::VV]));
        CHECK(kfactors_from_split(tilde, tilde, layout)[Pair::VV] == doctest::Approx(0.5));
    }

    TEST_CASE("Kronecker scatter recipe")
    {
        const auto layout = PolarizationLayout::dual(2, 2);
        const ComplexMatrix s = kronecker_scatter(layout, 0.5, 0.0, 10.0);
        CHECK(s(0, 0).real() == doctest::Approx(1.0));
        CHECK(s(1, 1).real() == doctest::Approx(0.1));
        CHECK(s(2, 2).real() == doctest::Approx(0.1));
        CHECK(s(3, 3).real() == doctest::Approx(1.0));
        // TX correlation between antennas 0 and 1 on the co-pol RX 0.
        CHECK(s(0, 2).real() == doctest::Approx(0.5 * std::sqrt(0.1)));
        CHECK(hermitian_eig(s).eigenvalues.minCoeff() > 0.0);
        CHECK_THROWS_AS(kronecker_scatter(layout, 1.0, 0.0, 0.0), std::invalid_argument);
    }

    TEST_CASE("ULA steering has unit modulus")
    {
        const ComplexVector v = ula_steering(5, 30.0);
        for (Index i = 0; i < 5; ++i)
            CHECK(std::abs(v(i)) == doctest::Approx(1.0));
        CHECK(std::arg(v(1)) == doctest::Approx(3.14159265358979 * 0.5));
    }

    TEST_CASE("custom coupling: renormalized phasors keep unit modulus")
    {
        // p = G^{1/2} u is renormalized entrywise, so E{p p^H} differs from G. The
        // analytic side uses G as given; the measured deviation is bounded here.
        const auto layout = PolarizationLayout::dual(2, 2);
        DominantSpec d;
        d.coupling = PhaseCoupling::Custom;
        d.custom_correlation = ComplexMatrix::Identity(4, 4);
        d.custom_correlation(0, 3) = d.custom_correlation(3, 0) = 0.6;
        d.pairs[0].tx_amplitude = d.pairs[0].rx_amplitude = RealVector::Ones(1);
        d.pairs[3].tx_amplitude = d.pairs[3].rx_amplitude = RealVector::Ones(1);
        const ChannelModel model(layout, d, ScatterSpec{ComplexMatrix::Zero(4, 4)});
        const SnapshotSet s = sample_channels(model, 20000, 1, 5);
        Complex g03 = 0.0;
        for (const ComplexMatrix &h : s.snapshots)
        {
            CHECK(std::abs(std::abs(h(0, 0)) - 1.0) < 1e-12);
            g03 += h(0, 0) * std::conj(h(1, 1));
        }
        g03 /= static_cast<double>(s.size());
        // Oracle: the correlation depends only on the phase difference of the two
        // driving phasors, so it is a one-dimensional average over that difference.
        const double a = (std::sqrt(1.6) + std::sqrt(0.4)) / 2.0, b = (std::sqrt(1.6) - std::sqrt(0.4)) / 2.0;
        Complex oracle = 0.0;
        const int steps = 20000;
        for (int i = 0; i < steps; ++i)
        {
            const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * (i + 0.5) / steps);
            const Complex p0 = a + b * e, p3 = b + a * e;
            oracle += p0 / std::abs(p0) * std::conj(p3 / std::abs(p3));
        }
        oracle /= static_cast<double>(steps);
        CHECK(std::abs(g03.imag()) < 0.03);
        CHECK(std::abs(oracle.imag()) < 1e-9);
        CHECK(std::abs(g03.real() - oracle.real()) < 0.02);
        CHECK(oracle.real() < 0.6);
        MESSAGE("custom coupling: target 0.6, sampled " << g03.real() << ", oracle " << oracle.real());
    }
}
