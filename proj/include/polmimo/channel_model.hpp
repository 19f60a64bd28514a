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
#include "polmimo/stats.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace polmimo
{

enum class Polarization : std::uint8_t
{
    V = 0,
    H = 1
};

/// Polarization combination of a sub-link, named TX tag first: VH is V at the TX and
/// H at the RX. The numeric order VV, VH, HV, HH indexes the phase-coupling matrix.
enum class Pair : int
{
    VV = 0,
    VH = 1,
    HV = 2,
    HH = 3
};

inline constexpr std::array<Pair, 4> kAllPairs = {Pair::VV, Pair::VH, Pair::HV, Pair::HH};

constexpr int pair_index(Pair p) noexcept { return static_cast<int>(p); }
constexpr Pair make_pair(Polarization tx, Polarization rx) noexcept
{
    return static_cast<Pair>(2 * static_cast<int>(tx) + static_cast<int>(rx));
}
constexpr Polarization tx_of(Pair p) noexcept { return static_cast<Polarization>(pair_index(p) / 2); }
constexpr Polarization rx_of(Pair p) noexcept { return static_cast<Polarization>(pair_index(p) % 2); }
constexpr bool is_copolar(Pair p) noexcept { return p == Pair::VV || p == Pair::HH; }
std::string_view pair_name(Pair p);

enum class LayoutMode
{
    SP,
    DP
};

/// Polarization tags of the TX and RX arrays.
///
/// SP layouts use one tag throughout; DP layouts carry exactly half V and half H on
/// each side. Sub-link (t, r) sits at vec index t * n_rx() + r.
class PolarizationLayout
{
public:
    PolarizationLayout(std::vector<Polarization> tx, std::vector<Polarization> rx);

    static PolarizationLayout single(Polarization p, Index n_tx, Index n_rx);
    /// First half V, second half H on both sides.
    static PolarizationLayout dual(Index n_tx, Index n_rx);

    Index n_tx() const noexcept { return static_cast<Index>(tx_.size()); }
    Index n_rx() const noexcept { return static_cast<Index>(rx_.size()); }
    Index n_links() const noexcept { return n_tx() * n_rx(); }
    const std::vector<Polarization> &tx() const noexcept { return tx_; }
    const std::vector<Polarization> &rx() const noexcept { return rx_; }
    LayoutMode mode() const noexcept { return mode_; }

    Index tx_count(Polarization p) const noexcept;
    Index rx_count(Polarization p) const noexcept;

    Pair pair_at(Index t, Index r) const noexcept { return make_pair(tx_[t], rx_[r]); }
    Pair pair_of_link(Index link) const noexcept { return pair_at(link / n_rx(), link % n_rx()); }
    bool has_pair(Pair p) const noexcept { return tx_count(tx_of(p)) > 0 && rx_count(rx_of(p)) > 0; }
    /// vec indices of all sub-links of the pair, ascending.
    std::vector<Index> links(Pair p) const;
    Index copolar_count() const;

    bool operator==(const PolarizationLayout &) const = default;

private:
    std::vector<Polarization> tx_;
    std::vector<Polarization> rx_;
    LayoutMode mode_;
};

/// Dominant component of one polarization pair; the amplitude matrix is
/// rx_amplitude * tx_amplitude^T and the deterministic phase matrix is
/// rx_steering * tx_steering^T. Vectors are empty for pairs absent from the layout.
struct PairDominant
{
    RealVector tx_amplitude;
    RealVector rx_amplitude;
    ComplexVector tx_steering;
    ComplexVector rx_steering;
};

/// Joint law of the four per-pair phases.
enum class PhaseCoupling
{
    Shared,           ///< one common phase, G = all-ones
    CopolIndependent, ///< VV and HH independent; cross-pol pairs must be silent
    Independent,      ///< four independent phases, G = I
    Custom            ///< p = G^{1/2} u with u i.i.d. phasors, each entry renormalized
};

std::string_view coupling_name(PhaseCoupling c);
PhaseCoupling parse_coupling(std::string_view name);

struct DominantSpec
{
    std::array<PairDominant, 4> pairs;
    PhaseCoupling coupling = PhaseCoupling::Independent;
    /// Only read for PhaseCoupling::Custom; the named modes fix G themselves.
    ComplexMatrix custom_correlation;
};

struct ScatterSpec
{
    ComplexMatrix covariance;
};

/// Generative model of one stationarity region. Immutable once constructed.
class ChannelModel
{
public:
    /// Validates every invariant and throws std::invalid_argument on violation
    /// (NotPsdError for an indefinite covariance).
    ChannelModel(PolarizationLayout layout, DominantSpec dominant, ScatterSpec scatter);

    const PolarizationLayout &layout() const noexcept { return layout_; }
    const DominantSpec &dominant() const noexcept { return dominant_; }
    const ScatterSpec &scatter() const noexcept { return scatter_; }

    /// Phasor correlation matrix G (4x4) in pair order VV, VH, HV, HH.
    const ComplexMatrix &phase_correlation() const noexcept { return g_; }

    /// Complex dominant amplitude of every sub-link (vec order) without the random phase.
    const ComplexVector &link_amplitudes() const noexcept { return link_amplitude_; }

    /// Same model with the channel matrix multiplied by `factor`.
    ChannelModel scaled(double factor) const;

private:
    PolarizationLayout layout_;
    DominantSpec dominant_;
    ScatterSpec scatter_;
    ComplexMatrix g_;
    ComplexVector link_amplitude_;
};

/// Channel matrices (N_RX x N_TX) of one region, time-major, frequency-minor.
struct SnapshotSet
{
    PolarizationLayout layout;
    Index n_time = 0;
    Index n_freq = 0;
    std::vector<ComplexMatrix> snapshots;

    std::size_t size() const noexcept { return snapshots.size(); }
    const ComplexMatrix &at(Index t, Index f) const { return snapshots[static_cast<std::size_t>(t * n_freq + f)]; }
    /// Throws std::invalid_argument when counts or matrix shapes disagree with the layout.
    void validate() const;
};

/// Per-pair K-factors in pair order. Pairs absent from the layout hold NaN.
struct PairKFactors
{
    std::array<double, 4> values;

    double operator[](Pair p) const noexcept { return values[static_cast<std::size_t>(pair_index(p))]; }
    double &operator[](Pair p) noexcept { return values[static_cast<std::size_t>(pair_index(p))]; }
};

/// Mean over each pair's sub-links of dominant/scatter diagonal power. A sub-link with
/// zero scatter power and positive dominant power yields infinity; one with neither
/// contributes zero.
PairKFactors kfactors_from_split(const ComplexMatrix &r_bar, const ComplexMatrix &r_tilde,
                                 const PolarizationLayout &layout);

ComplexMatrix analytic_dominant_covariance(const ChannelModel &model);

/// Exact R, R_TX and T = R tr(R) + R^2 - Rbar^2 of the model.
SecondOrderStats analytic_stats(const ChannelModel &model);

/// Draws n_time * n_freq independent snapshots. Snapshot (t, f) uses its own random
/// stream derived from (seed, t, f).
SnapshotSet sample_channels(const ChannelModel &model, Index n_time, Index n_freq, std::uint64_t seed);

PairKFactors ground_truth_kfactors(const ChannelModel &model);

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

/// Unit-modulus ULA steering vector exp(j pi n sin(angle)), n = 0..count-1.
ComplexVector ula_steering(Index count, double angle_deg);

/// Scatter covariance D^{1/2} (C_TX kron C_RX) D^{1/2} with exponential antenna
/// correlations C_ij = corr^|i-j| and D holding 1 on co-polarized and 10^(-xpd_db/10)
/// on cross-polarized sub-links.
ComplexMatrix kronecker_scatter(const PolarizationLayout &layout, double tx_corr, double rx_corr, double xpd_db);

struct PlantSpec
{
    std::array<double, 4> k_factors{};
    ComplexMatrix scatter;
    PhaseCoupling coupling = PhaseCoupling::Independent;
    ComplexMatrix custom_correlation;
    std::array<double, 4> tx_angle_deg{};
    std::array<double, 4> rx_angle_deg{};
};

/// Plants per-pair K-factors: every sub-link of pair ab gets dominant power
/// K_ab * (mean scatter power of the pair). Reproduces the targets exactly when the
/// scatter diagonal is constant over each pair.
ChannelModel plant_model(const PolarizationLayout &layout, const PlantSpec &spec);

} // namespace polmimo
