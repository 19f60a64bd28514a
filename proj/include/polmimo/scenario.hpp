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
#include "polmimo/crossing.hpp"
#include "polmimo/decomposition.hpp"
#include "polmimo/mi_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace polmimo
{

inline constexpr std::string_view kVersion = "0.3.1";

enum class Setup
{
    VP,
    HP,
    DP
};

std::string_view setup_name(Setup s);
Setup parse_setup(std::string_view name);

/// Inclusive dB grid start:stop:step.
struct SnrGrid
{
    double start_db = -10.0;
    double stop_db = 30.0;
    double step_db = 2.0;

    std::vector<double> values_db() const;
};

SnrGrid parse_snr_grid(std::string_view text);

struct ScenarioConfig
{
    std::string preset;
    std::vector<Setup> setups = {Setup::VP, Setup::HP, Setup::DP};
    Index n_tx = 4;
    Index n_rx = 4;

    /// Target K-factor per pair, cycled over regions when several are given.
    std::array<std::vector<double>, 4> k_factors = {std::vector<double>{4.0}, {0.0}, {0.0}, {4.0}};
    std::string coupling = "auto";
    double tx_corr = 0.3;
    double rx_corr = 0.3;
    double xpd_db = 6.0;
    std::array<double, 4> tx_angle_deg = {10.0, 35.0, -40.0, -20.0};
    std::array<double, 4> rx_angle_deg = {-15.0, 25.0, 50.0, 30.0};

    Index n_regions = 4;
    double region_spacing_m = 5.0;
    Index n_time = 16;
    Index n_freq = 128;

    SnrGrid snr;
    SnrGrid crossing_snr{-10.0, 40.0, 0.5};
    Index mc_samples = 0; ///< 0: exact MI over the region's own snapshots
    std::uint64_t seed = 1;
    Index n_dp = 2;
    PowerPolicy policy = PowerPolicy::Waterfill;
    bool analytic = false;
    unsigned threads = 0; ///< 0: hardware concurrency
    std::filesystem::path out_dir = "out";

    /// Throws ConfigError when a field is out of range.
    void validate() const;

    /// Canonical key = value text of every field, used for hashing and the manifest.
    std::string canonical() const;
};

/// Applies a named preset. Throws ConfigError for an unknown name.
void apply_preset(ScenarioConfig &config, std::string_view name);

/// Parses `key = value` lines; `#` starts a comment. A `preset` key is applied first,
/// every other key overrides it regardless of position.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path &path);

/// Sets one key. Throws ConfigError naming the field; `line` is passed through.
void set_config_value(ScenarioConfig &config, std::string_view key, std::string_view value, int line = 0);

std::uint64_t fnv1a64(std::string_view data);

/// Planted model of one region and setup.
ChannelModel region_model(const ScenarioConfig &config, Setup setup, Index region);

struct SnrPoint
{
    double snr_db = 0.0;
    MiEstimate exact;
    double approx = 0.0;
    double jensen = 0.0;
    double lower_bound = 0.0;
};

struct RegionEvaluation
{
    Setup setup = Setup::DP;
    Index region = 0;
    PolarizationLayout layout = PolarizationLayout::single(Polarization::V, 1, 1);
    double scale = 1.0;
    SecondOrderStats stats;
    DecompositionResult decomposition;
    FourthMomentZ z;
    PairKFactors k_truth{};
    PairKFactors k_greenstein{};
    PairKFactors k_decomposition{};
    SnapshotSet mi_set{layout, 0, 0, {}}; ///< normalized channels used for the exact MI
    std::vector<SnrPoint> points;
};

Setup setup_of(const PolarizationLayout &layout);

/// Raw (unnormalized) snapshots of one region, from the same random stream that
/// evaluate_region uses.
SnapshotSet region_snapshots(const ScenarioConfig &config, Setup setup, Index region);

/// Pipeline on measured or stored snapshots: normalize, estimate, decompose, K-factors,
/// Z and the MI variants. With mc_samples > 0 the exact MI uses fresh draws from
/// `truth` (scaled like the data) or, without a truth model, from the regenerated
/// decomposition. k_truth is NaN without a truth model.
RegionEvaluation evaluate_snapshots(const ScenarioConfig &config, const SnapshotSet &snapshots, Index region,
                                    const ChannelModel *truth = nullptr);

/// Runs the per-region pipeline: sample (or take analytic moments), normalize,
/// estimate, decompose, K-factors, Z, and the four MI variants on the SNR grid.
RegionEvaluation evaluate_region(const ScenarioConfig &config, Setup setup, Index region);

/// SP single-stream against DP two-stream equal-power crossing of one region.
struct RegionCrossing
{
    CrossingSpec spec;
    CrossingResult jensen;
    CrossingResult lower_bound;
    std::vector<double> exact_roots; ///< numeric crossings of the exact curves, linear SNR
    bool exact_dp_above_at_start = false;

    /// Largest exact root in dB; NaN when the exact curves do not cross on the grid.
    double exact_db() const;
};

RegionCrossing cross_setups(const RegionEvaluation &sp, const RegionEvaluation &dp, const SnrGrid &grid);

struct ScenarioResult
{
    std::string kfactors_csv;
    std::string mi_csv;
    std::string crossings_csv;
    std::string crossings_by_region_csv;
    std::string manifest_json;
};

/// Evaluates every region and setup and renders the CSV tables and the manifest.
ScenarioResult run_scenario(const ScenarioConfig &config);

/// run_scenario followed by atomic writes of kfactors.csv, mi_vs_snr.csv, crossings.csv,
/// crossings_by_region.csv and manifest.json into config.out_dir (created if missing).
ScenarioResult run_scenario_to_disk(const ScenarioConfig &config);

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

} // namespace polmimo
