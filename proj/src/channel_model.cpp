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
#include "polmimo/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polmimo
{

std::string_view pair_name(Pair p)
{
    switch (p)
    {
    case Pair::VV:
        return "VV";
    case Pair::VH:
        return "VH";
    case Pair::HV:
        return "HV";
    case Pair::HH:
        return "HH";
    }
    return "??";
}

std::string_view coupling_name(PhaseCoupling c)
{
    switch (c)
    {
    case PhaseCoupling::Shared:
        return "shared";
    case PhaseCoupling::CopolIndependent:
        return "copol-independent";
    case PhaseCoupling::Independent:
        return "independent";
    case PhaseCoupling::Custom:
        return "custom";
    }
    return "?";
}

PhaseCoupling parse_coupling(std::string_view name)
{
    if (name == "shared")
        return PhaseCoupling::Shared;
    if (name == "copol-independent")
        return PhaseCoupling::CopolIndependent;
    if (name == "independent")
        return PhaseCoupling::Independent;
    if (name == "custom")
        return PhaseCoupling::Custom;
    throw std::invalid_argument("unknown phase coupling '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// PolarizationLayout
// ---------------------------------------------------------------------------

namespace
{

Index count_tag(const std::vector<Polarization> &tags, Polarization p)
{
    return static_cast<Index>(std::count(tags.begin(), tags.end(), p));
}

} // namespace

PolarizationLayout::PolarizationLayout(std::vector<Polarization> tx, std::vector<Polarization> rx)
    : tx_(std::move(tx)), rx_(std::move(rx)), mode_(LayoutMode::SP)
{
    if (tx_.empty() || rx_.empty())
        throw std::invalid_argument("PolarizationLayout: both arrays need at least one antenna");
    const Index tv = count_tag(tx_, Polarization::V), rv = count_tag(rx_, Polarization::V);
    const Index nt = n_tx(), nr = n_rx();
    const bool tx_single = tv == 0 || tv == nt;
    const bool rx_single = rv == 0 || rv == nr;
    if (tx_single && rx_single)
    {
        if (tx_[0] != rx_[0])
            throw std::invalid_argument("PolarizationLayout: SP layout needs the same tag at TX and RX");
        mode_ = LayoutMode::SP;
        return;
    }
    if (nt % 2 != 0 || nr % 2 != 0 || 2 * tv != nt || 2 * rv != nr)
        throw std::invalid_argument("PolarizationLayout: DP layout needs exactly half V and half H on each side");
    mode_ = LayoutMode::DP;
}

PolarizationLayout PolarizationLayout::single(Polarization p, Index n_tx, Index n_rx)
{
    if (n_tx < 1 || n_rx < 1)
        throw std::invalid_argument("PolarizationLayout::single: antenna counts must be positive");
    return PolarizationLayout(std::vector<Polarization>(static_cast<std::size_t>(n_tx), p),
                              std::vector<Polarization>(static_cast<std::size_t>(n_rx), p));
}

PolarizationLayout PolarizationLayout::dual(Index n_tx, Index n_rx)
{
    if (n_tx < 2 || n_rx < 2 || n_tx % 2 != 0 || n_rx % 2 != 0)
        throw std::invalid_argument("PolarizationLayout::dual: antenna counts must be even and positive");
    auto half = [](Index n)
    {
        std::vector<Polarization> tags(static_cast<std::size_t>(n), Polarization::H);
        std::fill(tags.begin(), tags.begin() + n / 2, Polarization::V);
        return tags;
    };
    return PolarizationLayout(half(n_tx), half(n_rx));
}

Index PolarizationLayout::tx_count(Polarization p) const noexcept { return count_tag(tx_, p); }
Index PolarizationLayout::rx_count(Polarization p) const noexcept { return count_tag(rx_, p); }

std::vector<Index> PolarizationLayout::links(Pair p) const
{
    std::vector<Index> out;
    for (Index t = 0; t < n_tx(); ++t)
        for (Index r = 0; r < n_rx(); ++r)
            if (pair_at(t, r) == p)
                out.push_back(t * n_rx() + r);
    return out;
}

Index PolarizationLayout::copolar_count() const
{
    Index n = 0;
    for (Index t = 0; t < n_tx(); ++t)
        for (Index r = 0; r < n_rx(); ++r)
            n += tx_[t] == rx_[r] ? 1 : 0;
    return n;
}

// ---------------------------------------------------------------------------
// ChannelModel
// ---------------------------------------------------------------------------

namespace
{

ComplexMatrix coupling_matrix(const DominantSpec &spec)
{
    switch (spec.coupling)
    {
    case PhaseCoupling::Shared:
        return ComplexMatrix::Ones(4, 4);
    case PhaseCoupling::CopolIndependent:
    case PhaseCoupling::Independent:
        return ComplexMatrix::Identity(4, 4);
    case PhaseCoupling::Custom:
        break;
    }
    const ComplexMatrix &g = spec.custom_correlation;
    if (g.rows() != 4 || g.cols() != 4)
        throw std::invalid_argument("ChannelModel: custom phase correlation must be 4x4");
    if ((g - g.adjoint()).norm() > 1e-12 * g.norm())
        throw std::invalid_argument("ChannelModel: custom phase correlation must be Hermitian");
    for (Index i = 0; i < 4; ++i)
    {
        if (std::abs(g(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("ChannelModel: custom phase correlation needs a unit diagonal");
        for (Index j = 0; j < 4; ++j)
            if (std::abs(g(i, j)) > 1.0 + 1e-12)
                throw std::invalid_argument("ChannelModel: phase correlation entries must satisfy |g| <= 1");
    }
    if (hermitian_eig(g).eigenvalues.minCoeff() < -1e-10 * 4.0)
        throw std::invalid_argument("ChannelModel: custom phase correlation is not positive semidefinite");
    return hermitian_part(g);
}

ComplexVector pair_terms(const RealVector &amplitude, const ComplexVector &steering)
{
    return amplitude.cast<Complex>().cwiseProduct(steering);
}

} // namespace

ChannelModel::ChannelModel(PolarizationLayout layout, DominantSpec dominant, ScatterSpec scatter)
    : layout_(std::move(layout)), dominant_(std::move(dominant)), scatter_(std::move(scatter))
{
    const Index n = layout_.n_links();
    if (scatter_.covariance.rows() != n || scatter_.covariance.cols() != n)
        throw std::invalid_argument("ChannelModel: scatter covariance must be " + std::to_string(n) + "x" +
                                    std::to_string(n));
    const ComplexMatrix &c = scatter_.covariance;
    if (!c.allFinite())
        throw std::invalid_argument("ChannelModel: scatter covariance has non-finite entries");
    if ((c - c.adjoint()).norm() > 1e-10 * c.norm())
        throw std::invalid_argument("ChannelModel: scatter covariance must be Hermitian");
    scatter_.covariance = hermitian_part(c);
    const double trace = scatter_.covariance.diagonal().real().sum();
    if (trace < 0.0)
        throw std::invalid_argument("ChannelModel: scatter covariance has negative trace");
    if (n > 0 && hermitian_eig(scatter_.covariance).eigenvalues.minCoeff() < -1e-10 * trace)
        throw NotPsdError("ChannelModel: scatter covariance is not positive semidefinite");

    g_ = coupling_matrix(dominant_);

    std::array<ComplexVector, 4> tx_terms, rx_terms;
    for (Pair p : kAllPairs)
    {
        const auto k = static_cast<std::size_t>(pair_index(p));
        PairDominant &d = dominant_.pairs[k];
        const Index nt = layout_.tx_count(tx_of(p)), nr = layout_.rx_count(rx_of(p));
        const std::string name(pair_name(p));
        // Steering vectors may be left empty: they default to all-ones.
        if (d.tx_amplitude.size() == 0)
            d.tx_amplitude = RealVector::Zero(nt);
        if (d.rx_amplitude.size() == 0)
            d.rx_amplitude = RealVector::Zero(nr);
        if (d.tx_steering.size() == 0)
            d.tx_steering = ComplexVector::Ones(nt);
        if (d.rx_steering.size() == 0)
            d.rx_steering = ComplexVector::Ones(nr);
        if (d.tx_amplitude.size() != nt || d.tx_steering.size() != nt)
            throw std::invalid_argument("ChannelModel: pair " + name + " needs TX vectors of length " +
                                        std::to_string(nt));
        if (d.rx_amplitude.size() != nr || d.rx_steering.size() != nr)
            throw std::invalid_argument("ChannelModel: pair " + name + " needs RX vectors of length " +
                                        std::to_string(nr));
        if ((d.tx_amplitude.array() < 0.0).any() || (d.rx_amplitude.array() < 0.0).any() ||
            !d.tx_amplitude.allFinite() || !d.rx_amplitude.allFinite())
            throw std::invalid_argument("ChannelModel: pair " + name + " amplitudes must be finite and non-negative");
        auto unit = [](const ComplexVector &v)
        { return ((v.array().abs() - 1.0).abs() <= 1e-12).all(); };
        if (!unit(d.tx_steering) || !unit(d.rx_steering))
            throw std::invalid_argument("ChannelModel: pair " + name + " steering entries must have unit modulus");
        if (dominant_.coupling == PhaseCoupling::CopolIndependent && !is_copolar(p) &&
            (d.tx_amplitude.norm() * d.rx_amplitude.norm()) > 0.0)
            throw std::invalid_argument("ChannelModel: copol-independent coupling requires silent cross-pol pair " +
                                        name);
        tx_terms[k] = pair_terms(d.tx_amplitude, d.tx_steering);
        rx_terms[k] = pair_terms(d.rx_amplitude, d.rx_steering);
    }

    // Position of each antenna among the antennas sharing its tag.
    auto positions = [](const std::vector<Polarization> &tags)
    {
        std::vector<Index> pos(tags.size());
        Index seen[2] = {0, 0};
        for (std::size_t i = 0; i < tags.size(); ++i)
            pos[i] = seen[static_cast<int>(tags[i])]++;
        return pos;
    };
    const auto tx_pos = positions(layout_.tx());
    const auto rx_pos = positions(layout_.rx());
    link_amplitude_.resize(n);
    for (Index t = 0; t < layout_.n_tx(); ++t)
        for (Index r = 0; r < layout_.n_rx(); ++r)
        {
            const auto k = static_cast<std::size_t>(pair_index(layout_.pair_at(t, r)));
            link_amplitude_(t * layout_.n_rx() + r) =
                rx_terms[k](rx_pos[static_cast<std::size_t>(r)]) * tx_terms[k](tx_pos[static_cast<std::size_t>(t)]);
        }
}

ChannelModel ChannelModel::scaled(double factor) const
{
    if (!(factor >= 0.0) || !std::isfinite(factor))
        throw std::invalid_argument("ChannelModel::scaled: factor must be finite and non-negative");
    DominantSpec d = dominant_;
    const double root = std::sqrt(factor);
    for (PairDominant &p : d.pairs)
    {
        p.tx_amplitude *= root;
        p.rx_amplitude *= root;
    }
    return ChannelModel(layout_, std::move(d), ScatterSpec{scatter_.covariance * (factor * factor)});
}

// ---------------------------------------------------------------------------
// SnapshotSet
// ---------------------------------------------------------------------------

void SnapshotSet::validate() const
{
    if (n_time < 0 || n_freq < 0 || static_cast<std::size_t>(n_time * n_freq) != snapshots.size())
        throw std::invalid_argument("SnapshotSet: snapshot count does not match n_time x n_freq");
    for (const ComplexMatrix &h : snapshots)
        if (h.rows() != layout.n_rx() || h.cols() != layout.n_tx())
            throw std::invalid_argument("SnapshotSet: snapshot shape does not match the layout");
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

ComplexMatrix tx_correlation_from_full(const ComplexMatrix &r, Index n_tx, Index n_rx)
{
    if (r.rows() != n_tx * n_rx || r.cols() != n_tx * n_rx)
        throw std::invalid_argument("tx_correlation_from_full: dimension mismatch");
    ComplexMatrix out = ComplexMatrix::Zero(n_tx, n_tx);
    for (Index k = 0; k < n_tx; ++k)
        for (Index l = 0; l < n_tx; ++l)
            for (Index q = 0; q < n_rx; ++q)
                out(k, l) += r(k * n_rx + q, l * n_rx + q);
    return out;
}

PairKFactors kfactors_from_split(const ComplexMatrix &r_bar, const ComplexMatrix &r_tilde,
                                 const PolarizationLayout &layout)
{
    const Index n = layout.n_links();
    if (r_bar.rows() != n || r_tilde.rows() != n)
        throw std::invalid_argument("kfactors_from_split: matrices do not match the layout");
    PairKFactors out{};
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
            const double dom = std::max(r_bar(i, i).real(), 0.0);
            const double sc = std::max(r_tilde(i, i).real(), 0.0);
            if (sc > 0.0)
                sum += dom / sc;
            else if (dom > 0.0)
                sum = std::numeric_limits<double>::infinity();
        }
        out[p] = sum / static_cast<double>(idx.size());
    }
    return out;
}

ComplexMatrix analytic_dominant_covariance(const ChannelModel &model)
{
    const PolarizationLayout &layout = model.layout();
    const ComplexVector &m = model.link_amplitudes();
    const ComplexMatrix &g = model.phase_correlation();
    const Index n = layout.n_links();
    ComplexMatrix out(n, n);
    for (Index j = 0; j < n; ++j)
    {
        const int pj = pair_index(layout.pair_of_link(j));
        for (Index i = 0; i < n; ++i)
            out(i, j) = m(i) * std::conj(m(j)) * g(pair_index(layout.pair_of_link(i)), pj);
    }
    return hermitian_part(out);
}

SecondOrderStats analytic_stats(const ChannelModel &model)
{
    const ComplexMatrix r_bar = analytic_dominant_covariance(model);
    SecondOrderStats s;
    s.r = r_bar + model.scatter().covariance;
    s.r_tx = tx_correlation_from_full(s.r, model.layout().n_tx(), model.layout().n_rx());
    s.t = hermitian_part(s.r * s.r.trace() + s.r * s.r - r_bar * r_bar);
    s.sample_count = 0;
    return s;
}

static ComplexVector draw_phasors(const ChannelModel &model, const ComplexMatrix &g_root, Engine &engine)
{
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    ComplexVector u(4);
    for (Index k = 0; k < 4; ++k)
        u(k) = std::polar(1.0, phase(engine));
    switch (model.dominant().coupling)
    {
    case PhaseCoupling::Shared:
        return ComplexVector::Constant(4, u(0));
    case PhaseCoupling::CopolIndependent:
    case PhaseCoupling::Independent:
        return u;
    case PhaseCoupling::Custom:
        break;
    }
    ComplexVector p = g_root * u;
    for (Index k = 0; k < 4; ++k)
    {
        const double mag = std::abs(p(k));
        p(k) = mag > 0.0 ? p(k) / mag : u(k);
    }
    return p;
}

SnapshotSet sample_channels(const ChannelModel &model, Index n_time, Index n_freq, std::uint64_t seed)
{
    if (n_time < 0 || n_freq < 0)
        throw std::invalid_argument("sample_channels: counts must be non-negative");
    const PolarizationLayout &layout = model.layout();
    const Index n = layout.n_links();
    const ComplexMatrix root = psd_sqrt(model.scatter().covariance);
    const ComplexMatrix g_root =
        model.dominant().coupling == PhaseCoupling::Custom ? psd_sqrt(model.phase_correlation()) : ComplexMatrix();
    const ComplexVector &m = model.link_amplitudes();
    std::vector<int> link_pair(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        link_pair[static_cast<std::size_t>(i)] = pair_index(layout.pair_of_link(i));

    SnapshotSet out{layout, n_time, n_freq, {}};
    out.snapshots.reserve(static_cast<std::size_t>(n_time * n_freq));
    const double component_sd = std::sqrt(0.5);
    ComplexVector g(n), h(n);
    for (Index t = 0; t < n_time; ++t)
        for (Index f = 0; f < n_freq; ++f)
        {
            Engine engine = make_engine(seed, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(f)});
            const ComplexVector phasor = draw_phasors(model, g_root, engine);
            std::normal_distribution<double> normal(0.0, component_sd);
            for (Index i = 0; i < n; ++i)
            {
                const double re = normal(engine);
                const double im = normal(engine);
                g(i) = Complex(re, im);
            }
            h.noalias() = root * g;
            for (Index i = 0; i < n; ++i)
                h(i) += m(i) * phasor(link_pair[static_cast<std::size_t>(i)]);
            out.snapshots.push_back(unvec(h, layout.n_rx(), layout.n_tx()));
        }
    return out;
}

PairKFactors ground_truth_kfactors(const ChannelModel &model)
{
    return kfactors_from_split(analytic_dominant_covariance(model), model.scatter().covariance, model.layout());
}

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

ComplexVector ula_steering(Index count, double angle_deg)
{
    const double s = std::sin(angle_deg * std::numbers::pi / 180.0);
    ComplexVector out(count);
    for (Index k = 0; k < count; ++k)
        out(k) = std::polar(1.0, std::numbers::pi * static_cast<double>(k) * s);
    return out;
}

ComplexMatrix kronecker_scatter(const PolarizationLayout &layout, double tx_corr, double rx_corr, double xpd_db)
{
    if (std::abs(tx_corr) >= 1.0 || std::abs(rx_corr) >= 1.0)
        throw std::invalid_argument("kronecker_scatter: correlation coefficients must lie in (-1, 1)");
    auto exponential = [](Index n, double c)
    {
        ComplexMatrix m(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                m(i, j) = std::pow(c, static_cast<double>(std::abs(i - j)));
        return m;
    };
    const ComplexMatrix base = kron_product(exponential(layout.n_tx(), tx_corr), exponential(layout.n_rx(), rx_corr));
    const double cross = std::pow(10.0, -xpd_db / 10.0);
    RealVector d(layout.n_links());
    for (Index i = 0; i < d.size(); ++i)
        d(i) = std::sqrt(is_copolar(layout.pair_of_link(i)) ? 1.0 : cross);
    return d.cast<Complex>().asDiagonal() * base * d.cast<Complex>().asDiagonal();
}

ChannelModel plant_model(const PolarizationLayout &layout, const PlantSpec &spec)
{
    if (spec.scatter.rows() != layout.n_links() || spec.scatter.cols() != layout.n_links())
        throw std::invalid_argument("plant_model: scatter covariance does not match the layout");
    DominantSpec dominant;
    dominant.coupling = spec.coupling;
    dominant.custom_correlation = spec.custom_correlation;
    for (Pair p : kAllPairs)
    {
        const auto k = static_cast<std::size_t>(pair_index(p));
        const Index nt = layout.tx_count(tx_of(p)), nr = layout.rx_count(rx_of(p));
        PairDominant &d = dominant.pairs[k];
        d.tx_steering = ula_steering(nt, spec.tx_angle_deg[k]);
        d.rx_steering = ula_steering(nr, spec.rx_angle_deg[k]);
        const std::vector<Index> idx = layout.links(p);
        double power = 0.0;
        for (Index i : idx)
            power += spec.scatter(i, i).real();
        power = idx.empty() ? 0.0 : power / static_cast<double>(idx.size());
        const double target = spec.k_factors[k];
        if (!(target >= 0.0) || !std::isfinite(target))
            throw std::invalid_argument("plant_model: K-factors must be finite and non-negative");
        // |v_rx[r] v_tx[t]|^2 = K * power on every sub-link of the pair.
        const double side = std::pow(target * power, 0.25);
        d.tx_amplitude = RealVector::Constant(nt, side);
        d.rx_amplitude = RealVector::Constant(nr, side);
    }
    return ChannelModel(layout, std::move(dominant), ScatterSpec{spec.scatter});
}

} // namespace polmimo
