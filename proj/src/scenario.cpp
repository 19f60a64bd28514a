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
#include "polmimo/scenario.hpp"

#include "polmimo/errors.hpp"
#include "polmimo/estimation.hpp"
#include "polmimo/random.hpp"
#include "polmimo/snapshot_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace polmimo
{

std::string_view setup_name(Setup s)
{
    switch (s)
    {
    case Setup::VP:
        return "VP";
    case Setup::HP:
        return "HP";
    case Setup::DP:
        return "DP";
    }
    return "?";
}

Setup parse_setup(std::string_view name)
{
    if (name == "VP")
        return Setup::VP;
    if (name == "HP")
        return Setup::HP;
    if (name == "DP")
        return Setup::DP;
    throw std::invalid_argument("unknown setup '" + std::string(name) + "' (expected VP, HP or DP)");
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

namespace
{

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view text, std::string_view field, int line)
{
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v))
        throw ConfigError("expected a finite number, got '" + std::string(text) + "'", line, std::string(field));
    return v;
}

std::int64_t parse_int(std::string_view text, std::string_view field, int line)
{
    text = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError("expected an integer, got '" + std::string(text) + "'", line, std::string(field));
    return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view field, int line)
{
    std::vector<double> out;
    for (std::string_view part : split(text, ','))
        out.push_back(parse_double(part, field, line));
    return out;
}

std::string join(const std::vector<double> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + format_number(v[i]);
    return out;
}

std::string grid_text(const SnrGrid &g)
{
    return format_number(g.start_db) + ":" + format_number(g.stop_db) + ":" + format_number(g.step_db);
}

constexpr std::array<const char *, 4> kKeyNames = {"k_vv", "k_vh", "k_hv", "k_hh"};

} // namespace

std::vector<double> SnrGrid::values_db() const
{
    std::vector<double> out;
    if (!(step_db > 0.0) || stop_db < start_db)
        return out;
    const auto n = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(start_db + static_cast<double>(i) * step_db);
    return out;
}

SnrGrid parse_snr_grid(std::string_view text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3)
        throw ConfigError("expected start:stop:step, got '" + std::string(text) + "'", 0, "snr_db");
    SnrGrid g{parse_double(parts[0], "snr_db", 0), parse_double(parts[1], "snr_db", 0),
              parse_double(parts[2], "snr_db", 0)};
    if (!(g.step_db > 0.0) || g.stop_db < g.start_db)
        throw ConfigError("grid needs step > 0 and stop >= start", 0, "snr_db");
    return g;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void apply_preset(ScenarioConfig &c, std::string_view name)
{
    // Synthetic stand-ins for the link classes; not measurement values.
    if (name == "low-k")
    {
        c.k_factors = {std::vector<double>{0.5, 0.3, 0.4, 0.2}, {0.1}, {0.1}, {0.4, 0.2, 0.5, 0.3}};
        c.xpd_db = 3.0;
    }
    else if (name == "medium-k")
    {
        c.k_factors = {std::vector<double>{2.0, 6.0, 3.0, 1.5}, {0.0}, {0.0}, {1.5, 5.5, 2.5, 1.0}};
        c.xpd_db = 6.0;
    }
    else if (name == "high-k")
    {
        c.k_factors = {std::vector<double>{8.0}, {0.0}, {0.0}, {8.0}};
        c.xpd_db = 10.0;
    }
    else if (name == "varying-k")
    {
        c.k_factors = {std::vector<double>{0.5, 12.0}, {0.0}, {0.0}, {0.5, 12.0}};
        c.xpd_db = 8.0;
        c.n_regions = 8;
    }
    else
        throw ConfigError("unknown preset '" + std::string(name) + "' (low-k, medium-k, high-k, varying-k)", 0,
                          "preset");
    c.preset = std::string(name);
}

void set_config_value(ScenarioConfig &c, std::string_view key, std::string_view value, int line)
{
    const std::string field(key);
    value = trim(value);
    auto positive = [&](std::int64_t v)
    {
        if (v < 1)
            throw ConfigError("must be at least 1", line, field);
        return static_cast<Index>(v);
    };
    try
    {
        if (key == "preset")
            apply_preset(c, value);
        else if (key == "setups")
        {
            c.setups.clear();
            for (std::string_view s : split(value, ','))
                c.setups.push_back(parse_setup(s));
        }
        else if (key == "n_tx")
            c.n_tx = positive(parse_int(value, key, line));
        else if (key == "n_rx")
            c.n_rx = positive(parse_int(value, key, line));
        else if (key == "coupling")
            c.coupling = std::string(value);
        else if (key == "tx_corr")
            c.tx_corr = parse_double(value, key, line);
        else if (key == "rx_corr")
            c.rx_corr = parse_double(value, key, line);
        else if (key == "xpd_db")
            c.xpd_db = parse_double(value, key, line);
        else if (key == "tx_angles" || key == "rx_angles")
        {
            const auto v = parse_list(value, key, line);
            if (v.size() != 4)
                throw ConfigError("expected four angles (VV, VH, HV, HH)", line, field);
            std::copy(v.begin(), v.end(), (key == "tx_angles" ? c.tx_angle_deg : c.rx_angle_deg).begin());
        }
        else if (key == "n_regions")
            c.n_regions = positive(parse_int(value, key, line));
        else if (key == "region_spacing_m")
            c.region_spacing_m = parse_double(value, key, line);
        else if (key == "n_time")
            c.n_time = positive(parse_int(value, key, line));
        else if (key == "n_freq")
            c.n_freq = positive(parse_int(value, key, line));
        else if (key == "snr_db")
            c.snr = parse_snr_grid(value);
        else if (key == "crossing_snr_db")
            c.crossing_snr = parse_snr_grid(value);
        else if (key == "mc_samples")
        {
            const auto v = parse_int(value, key, line);
            if (v < 0)
                throw ConfigError("must be non-negative", line, field);
            c.mc_samples = static_cast<Index>(v);
        }
        else if (key == "seed")
        {
            const auto v = parse_int(value, key, line);
            if (v < 0)
                throw ConfigError("must be non-negative", line, field);
            c.seed = static_cast<std::uint64_t>(v);
        }
        else if (key == "ndp")
            c.n_dp = positive(parse_int(value, key, line));
        else if (key == "policy")
            c.policy = parse_policy(value);
        else if (key == "analytic")
        {
            if (value == "true" || value == "1")
                c.analytic = true;
            else if (value == "false" || value == "0")
                c.analytic = false;
            else
                throw ConfigError("expected true or false", line, field);
        }
        else if (key == "threads")
        {
            const auto v = parse_int(value, key, line);
            if (v < 0)
                throw ConfigError("must be non-negative", line, field);
            c.threads = static_cast<unsigned>(v);
        }
        else if (key == "out")
            c.out_dir = std::string(value);
        else
        {
            for (std::size_t k = 0; k < 4; ++k)
                if (key == kKeyNames[k])
                {
                    c.k_factors[k] = parse_list(value, key, line);
                    return;
                }
            throw ConfigError("unknown key", line, field);
        }
    }
    catch (const ConfigError &e)
    {
        if (e.line() == 0 && line != 0)
            throw ConfigError(e.what(), line);
        throw;
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(e.what(), line, field);
    }
}

ScenarioConfig parse_config(std::string_view text)
{
    struct Entry
    {
        std::string key, value;
        int line;
    };
    std::vector<Entry> entries;
    int line_no = 0;
    for (std::string_view raw : split(text, '\n'))
    {
        ++line_no;
        std::string_view line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty())
            throw ConfigError("empty key", line_no);
        for (const Entry &e : entries)
            if (e.key == key)
                throw ConfigError("duplicate key (first set on line " + std::to_string(e.line) + ")", line_no, key);
        entries.push_back({key, std::string(trim(line.substr(eq + 1))), line_no});
    }
    ScenarioConfig c;
    for (const Entry &e : entries)
        if (e.key == "preset")
            set_config_value(c, e.key, e.value, e.line);
    for (const Entry &e : entries)
        if (e.key != "preset")
            set_config_value(c, e.key, e.value, e.line);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void ScenarioConfig::validate() const
{
    if (setups.empty())
        throw ConfigError("at least one setup is required", 0, "setups");
    const bool has_dp = std::find(setups.begin(), setups.end(), Setup::DP) != setups.end();
    if (n_tx < 1 || n_rx < 1)
        throw ConfigError("antenna counts must be positive", 0, "n_tx");
    if (has_dp && (n_tx % 2 != 0 || n_rx % 2 != 0))
        throw ConfigError("DP setup needs even antenna counts", 0, "n_tx");
    for (std::size_t k = 0; k < 4; ++k)
    {
        if (k_factors[k].empty())
            throw ConfigError("needs at least one value", 0, kKeyNames[k]);
        for (double v : k_factors[k])
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError("K-factors must be finite and non-negative", 0, kKeyNames[k]);
    }
    if (coupling != "auto")
    {
        PhaseCoupling pc;
        try
        {
            pc = parse_coupling(coupling);
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(e.what(), 0, "coupling");
        }
        if (pc == PhaseCoupling::Custom)
            throw ConfigError("custom coupling needs a correlation matrix and is not available from config", 0,
                              "coupling");
        if (pc == PhaseCoupling::CopolIndependent && has_dp)
            for (std::size_t k : {std::size_t{1}, std::size_t{2}})
                for (double v : k_factors[k])
                    if (v != 0.0)
                        throw ConfigError("copol-independent coupling requires zero cross-pol K-factors", 0,
                                          "coupling");
    }
    if (!(std::abs(tx_corr) < 1.0) || !(std::abs(rx_corr) < 1.0))
        throw ConfigError("correlation coefficients must lie in (-1, 1)", 0, "tx_corr");
    if (n_regions < 1)
        throw ConfigError("must be at least 1", 0, "n_regions");
    if (n_time * n_freq < 2)
        throw ConfigError("region needs at least two snapshots (n_time * n_freq >= 2)", 0, "n_time");
    if (snr.values_db().empty())
        throw ConfigError("SNR grid is empty", 0, "snr_db");
    if (crossing_snr.values_db().size() < 2)
        throw ConfigError("crossing grid needs at least two points", 0, "crossing_snr_db");
    if (mc_samples == 1)
        throw ConfigError("needs at least two draws (or 0 to reuse region snapshots)", 0, "mc_samples");
    if (n_dp < 1 || n_dp > 4)
        throw ConfigError("must lie in 1..4", 0, "ndp");
    if (policy == PowerPolicy::Fixed)
        throw ConfigError("fixed power allocation is not available in scenarios", 0, "policy");
}

std::string ScenarioConfig::canonical() const
{
    std::string setup_list;
    for (std::size_t i = 0; i < setups.size(); ++i)
        setup_list += (i ? "," : "") + std::string(setup_name(setups[i]));
    std::ostringstream os;
    os << "preset = " << preset << "\n"
       << "setups = " << setup_list << "\n"
       << "n_tx = " << n_tx << "\n"
       << "n_rx = " << n_rx << "\n";
    for (std::size_t k = 0; k < 4; ++k)
        os << kKeyNames[k] << " = " << join(k_factors[k]) << "\n";
    os << "coupling = " << coupling << "\n"
       << "tx_corr = " << format_number(tx_corr) << "\n"
       << "rx_corr = " << format_number(rx_corr) << "\n"
       << "xpd_db = " << format_number(xpd_db) << "\n"
       << "tx_angles = " << join({tx_angle_deg.begin(), tx_angle_deg.end()}) << "\n"
       << "rx_angles = " << join({rx_angle_deg.begin(), rx_angle_deg.end()}) << "\n"
       << "n_regions = " << n_regions << "\n"
       << "region_spacing_m = " << format_number(region_spacing_m) << "\n"
       << "n_time = " << n_time << "\n"
       << "n_freq = " << n_freq << "\n"
       << "snr_db = " << grid_text(snr) << "\n"
       << "crossing_snr_db = " << grid_text(crossing_snr) << "\n"
       << "mc_samples = " << mc_samples << "\n"
       << "seed = " << seed << "\n"
       << "ndp = " << n_dp << "\n"
       << "policy = " << policy_name(policy) << "\n"
       << "analytic = " << (analytic ? "true" : "false") << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Per-region pipeline
// ---------------------------------------------------------------------------

namespace
{

std::uint64_t setup_index(Setup s) { return static_cast<std::uint64_t>(s); }

double cycled(const std::vector<double> &v, Index region)
{
    return v[static_cast<std::size_t>(region) % v.size()];
}

} // namespace

ChannelModel region_model(const ScenarioConfig &config, Setup setup, Index region)
{
    const PolarizationLayout layout = setup == Setup::DP ? PolarizationLayout::dual(config.n_tx, config.n_rx)
                                      : setup == Setup::VP
                                          ? PolarizationLayout::single(Polarization::V, config.n_tx, config.n_rx)
                                          : PolarizationLayout::single(Polarization::H, config.n_tx, config.n_rx);
    PlantSpec spec;
    for (std::size_t k = 0; k < 4; ++k)
        spec.k_factors[k] = cycled(config.k_factors[k], region);
    spec.scatter = kronecker_scatter(layout, config.tx_corr, config.rx_corr, config.xpd_db);
    spec.tx_angle_deg = config.tx_angle_deg;
    spec.rx_angle_deg = config.rx_angle_deg;
    const bool cross_silent = spec.k_factors[1] == 0.0 && spec.k_factors[2] == 0.0;
    if (config.coupling == "auto")
        spec.coupling = layout.mode() == LayoutMode::DP && cross_silent ? PhaseCoupling::CopolIndependent
                                                                        : PhaseCoupling::Independent;
    else
        spec.coupling = parse_coupling(config.coupling);
    return plant_model(layout, spec);
}

namespace
{

void finish_evaluation(const ScenarioConfig &config, RegionEvaluation &ev)
{
    const PolarizationLayout &layout = ev.layout;
    ev.decomposition = decompose(ev.stats, config.n_dp, layout.mode());
    ev.k_decomposition = decomposition_kfactors(ev.decomposition, layout);
    ev.z = z_model(ev.decomposition.r_bar, ev.decomposition.r_tilde, layout.n_tx(), layout.n_rx());
}

void evaluate_mi(const ScenarioConfig &config, RegionEvaluation &ev)
{
    ev.points.clear();
    for (double db : config.snr.values_db())
    {
        const double rho = db_to_linear(db);
        const InputDesign design = design_input(ev.stats.r_tx, rho, config.policy, 0);
        SnrPoint p;
        p.snr_db = db;
        p.exact = mi_exact(ev.mi_set, design, rho);
        p.jensen = mi_jensen(ev.stats.r_tx, design, rho);
        p.approx = mi_approx(rho, design, ev.stats.r_tx, ev.z);
        p.lower_bound = mi_lower_bound(rho, design, ev.stats.r_tx, ev.z, design.n_streams);
        ev.points.push_back(p);
    }
}

} // namespace

Setup setup_of(const PolarizationLayout &layout)
{
    if (layout.mode() == LayoutMode::DP)
        return Setup::DP;
    return layout.tx().front() == Polarization::V ? Setup::VP : Setup::HP;
}

RegionEvaluation evaluate_snapshots(const ScenarioConfig &config, const SnapshotSet &snapshots, Index region,
                                    const ChannelModel *truth)
{
    const Setup setup = setup_of(snapshots.layout);
    const std::uint64_t mc_seed =
        stream_seed(config.seed, {static_cast<std::uint64_t>(region), setup_index(setup), 1});

    RegionEvaluation ev;
    ev.setup = setup;
    ev.region = region;
    ev.layout = snapshots.layout;
    if (truth)
        ev.k_truth = ground_truth_kfactors(*truth);
    else
        ev.k_truth.values.fill(std::numeric_limits<double>::quiet_NaN());

    NormalizedRegion norm = normalize_region(snapshots);
    ev.scale = norm.scale;
    ev.stats = estimate_moments(norm.snapshots);
    ev.k_greenstein = greenstein_kfactors(snapshots);
    finish_evaluation(config, ev);
    if (config.mc_samples > 0)
        ev.mi_set = truth ? sample_channels(truth->scaled(ev.scale), config.mc_samples, 1, mc_seed)
                          : regenerate(ev.decomposition, ev.layout, config.mc_samples, mc_seed);
    else
        ev.mi_set = std::move(norm.snapshots);
    evaluate_mi(config, ev);
    return ev;
}

SnapshotSet region_snapshots(const ScenarioConfig &config, Setup setup, Index region)
{
    const ChannelModel model = region_model(config, setup, region);
    return sample_channels(model, config.n_time, config.n_freq,
                           stream_seed(config.seed, {static_cast<std::uint64_t>(region), setup_index(setup), 0}));
}

RegionEvaluation evaluate_region(const ScenarioConfig &config, Setup setup, Index region)
{
    const ChannelModel model = region_model(config, setup, region);
    if (!config.analytic)
        return evaluate_snapshots(config, region_snapshots(config, setup, region), region, &model);

    const PolarizationLayout &layout = model.layout();
    const std::uint64_t mc_seed =
        stream_seed(config.seed, {static_cast<std::uint64_t>(region), setup_index(setup), 1});
    RegionEvaluation ev;
    ev.setup = setup;
    ev.region = region;
    ev.layout = layout;
    ev.k_truth = ground_truth_kfactors(model);

    const SecondOrderStats raw = analytic_stats(model);
    double co_power = 0.0;
    for (Index i = 0; i < layout.n_links(); ++i)
        if (is_copolar(layout.pair_of_link(i)))
            co_power += raw.r(i, i).real();
    if (!(co_power > 0.0))
        throw DegenerateInputError("evaluate_region: co-polarized power is zero");
    ev.scale = std::sqrt(static_cast<double>(layout.copolar_count()) / co_power);
    const ChannelModel scaled = model.scaled(ev.scale);
    ev.stats = analytic_stats(scaled);
    ev.mi_set = config.mc_samples > 0 ? sample_channels(scaled, config.mc_samples, 1, mc_seed)
                                      : sample_channels(scaled, config.n_time, config.n_freq, mc_seed);
    ev.k_greenstein = greenstein_kfactors(ev.mi_set);
    finish_evaluation(config, ev);
    evaluate_mi(config, ev);
    return ev;
}

double RegionCrossing::exact_db() const
{
    if (exact_roots.empty())
        return std::numeric_limits<double>::quiet_NaN();
    return linear_to_db(exact_roots.back());
}

RegionCrossing cross_setups(const RegionEvaluation &sp, const RegionEvaluation &dp, const SnrGrid &grid)
{
    if (sp.layout.mode() != LayoutMode::SP || dp.layout.mode() != LayoutMode::DP)
        throw std::invalid_argument("cross_setups: expected an SP and a DP evaluation");
    const InputDesign sp_design = design_input(sp.stats.r_tx, 1.0, PowerPolicy::SingleStream, 1);
    const InputDesign dp_design = design_input(dp.stats.r_tx, 1.0, PowerPolicy::Equal, 2);

    RegionCrossing out;
    out.spec.lambda_sp1 = sp_design.lambda_tx(0);
    out.spec.lambda_dp = {dp_design.lambda_tx(0), dp_design.lambda_tx(1)};
    out.spec.lambda_q_dp = {0.5, 0.5};
    // Z is PSD, so w >= 0 analytically; the clamp removes rounding residue only.
    out.spec.w_sp = std::max(lower_bound_penalty(sp_design, sp.z, 1), 0.0);
    out.spec.w_dp = std::max(lower_bound_penalty(dp_design, dp.z, 2), 0.0);
    out.jensen = rho_cp_jensen(out.spec);
    out.lower_bound = rho_cp_lower_bound(out.spec);

    std::vector<double> rho_grid;
    for (double db : grid.values_db())
        rho_grid.push_back(db_to_linear(db));
    const Curve sp_curve = [&](double rho) { return mi_exact(sp.mi_set, sp_design, rho).bits; };
    const Curve dp_curve = [&](double rho) { return mi_exact(dp.mi_set, dp_design, rho).bits; };
    out.exact_roots = numeric_crossing(dp_curve, sp_curve, rho_grid);
    out.exact_dp_above_at_start = dp_curve(rho_grid.front()) > sp_curve(rho_grid.front());
    return out;
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

namespace
{

// Runs task(i) for i in [0, n) on a small pool; rethrows the first failure by index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &task)
{
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto run = [&]
    {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                task(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1)
        run();
    else
    {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(run);
        for (std::thread &t : pool)
            t.join();
    }
    for (const std::exception_ptr &e : errors)
        if (e)
            std::rethrow_exception(e);
}

double mean_finite(const std::vector<double> &v)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : v)
        if (std::isfinite(x))
        {
            sum += x;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

std::string crossing_flags(const std::vector<const RegionCrossing *> &rows)
{
    struct Counter
    {
        const char *name;
        std::function<bool(const RegionCrossing &)> test;
    };
    const std::vector<Counter> counters = {
        {"jensen_always_dp", [](const RegionCrossing &c) { return c.jensen.always_dp; }},
        {"lb_always_dp", [](const RegionCrossing &c) { return c.lower_bound.always_dp; }},
        {"lb_tangency", [](const RegionCrossing &c) { return c.lower_bound.tangency; }},
        {"exact_multiple_roots", [](const RegionCrossing &c) { return c.exact_roots.size() > 1; }},
        {"exact_always_dp", [](const RegionCrossing &c) { return c.exact_roots.empty() && c.exact_dp_above_at_start; }},
        {"exact_beyond_grid",
         [](const RegionCrossing &c) { return c.exact_roots.empty() && !c.exact_dp_above_at_start; }},
    };
    std::string out;
    for (const Counter &c : counters)
    {
        const auto hits = std::count_if(rows.begin(), rows.end(), [&](const RegionCrossing *r) { return c.test(*r); });
        if (hits > 0)
            out += (out.empty() ? "" : ";") + std::string(c.name) + "=" + std::to_string(hits) + "/" +
                   std::to_string(rows.size());
    }
    return out.empty() ? "none" : out;
}

double result_db(const CrossingResult &r)
{
    return r.always_dp ? std::numeric_limits<double>::quiet_NaN() : linear_to_db(r.rho);
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig &config)
{
    config.validate();
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    const std::size_t n_setups = config.setups.size();
    const auto n_regions = static_cast<std::size_t>(config.n_regions);
    std::vector<RegionEvaluation> evals(n_setups * n_regions);
    parallel_for(evals.size(), config.threads, [&](std::size_t i)
                 { evals[i] = evaluate_region(config, config.setups[i / n_regions], static_cast<Index>(i % n_regions)); });
    const auto t1 = clock::now();

    auto find = [&](Setup s) -> const RegionEvaluation *
    {
        for (std::size_t k = 0; k < n_setups; ++k)
            if (config.setups[k] == s)
                return &evals[k * n_regions];
        return nullptr;
    };

    // Setup pairs compared for crossings: every SP setup against DP.
    std::vector<Setup> sp_setups;
    if (find(Setup::DP))
        for (Setup s : config.setups)
            if (s != Setup::DP && std::find(sp_setups.begin(), sp_setups.end(), s) == sp_setups.end())
                sp_setups.push_back(s);
    std::vector<RegionCrossing> crossings(sp_setups.size() * n_regions);
    parallel_for(crossings.size(), config.threads, [&](std::size_t i)
                 {
                     const RegionEvaluation *sp = find(sp_setups[i / n_regions]);
                     const RegionEvaluation *dp = find(Setup::DP);
                     crossings[i] = cross_setups(sp[i % n_regions], dp[i % n_regions], config.crossing_snr);
                 });
    const auto t2 = clock::now();

    ScenarioResult out;
    {
        std::ostringstream os;
        os << "region,distance_proxy,pair,k_truth,k_greenstein,k_decomposition\n";
        const RegionEvaluation *base = find(Setup::DP) ? find(Setup::DP) : find(config.setups.front());
        for (std::size_t r = 0; r < n_regions; ++r)
        {
            const RegionEvaluation &ev = base[r];
            for (Pair p : kAllPairs)
            {
                if (ev.layout.links(p).empty())
                    continue;
                os << r << "," << format_number(static_cast<double>(r) * config.region_spacing_m) << ","
                   << pair_name(p) << "," << format_number(ev.k_truth[p]) << "," << format_number(ev.k_greenstein[p])
                   << "," << format_number(ev.k_decomposition[p]) << "\n";
            }
        }
        out.kfactors_csv = os.str();
    }
    {
        std::ostringstream os;
        os << "setup,snr_db,mi_exact,mi_exact_se,mi_approx,mi_jensen,mi_lb\n";
        const std::size_t n_snr = config.snr.values_db().size();
        for (std::size_t k = 0; k < n_setups; ++k)
            for (std::size_t s = 0; s < n_snr; ++s)
            {
                double exact = 0.0, se2 = 0.0, approx = 0.0, jensen = 0.0, lb = 0.0;
                for (std::size_t r = 0; r < n_regions; ++r)
                {
                    const SnrPoint &p = evals[k * n_regions + r].points[s];
                    exact += p.exact.bits;
                    se2 += p.exact.std_error * p.exact.std_error;
                    approx += p.approx;
                    jensen += p.jensen;
                    lb += p.lower_bound;
                }
                const double n = static_cast<double>(n_regions);
                os << setup_name(config.setups[k]) << ","
                   << format_number(evals[k * n_regions].points[s].snr_db) << "," << format_number(exact / n) << ","
                   << format_number(std::sqrt(se2) / n) << "," << format_number(approx / n) << ","
                   << format_number(jensen / n) << "," << format_number(lb / n) << "\n";
            }
        out.mi_csv = os.str();
    }
    {
        std::ostringstream avg, per;
        avg << "pair_of_setups,rho_cp_jensen_db,rho_cp_lb_db,rho_cp_exact_numeric_db,flags\n";
        per << "pair_of_setups,region,rho_cp_jensen_db,rho_cp_lb_db,rho_cp_exact_numeric_db,flags\n";
        for (std::size_t k = 0; k < sp_setups.size(); ++k)
        {
            const std::string label = std::string(setup_name(sp_setups[k])) + "-DP";
            std::vector<double> j, lb, ex;
            std::vector<const RegionCrossing *> rows;
            for (std::size_t r = 0; r < n_regions; ++r)
            {
                const RegionCrossing &c = crossings[k * n_regions + r];
                j.push_back(result_db(c.jensen));
                lb.push_back(result_db(c.lower_bound));
                ex.push_back(c.exact_db());
                rows.push_back(&c);
                per << label << "," << r << "," << format_number(j.back()) << "," << format_number(lb.back()) << ","
                    << format_number(ex.back()) << "," << crossing_flags({&c}) << "\n";
            }
            avg << label << "," << format_number(mean_finite(j)) << "," << format_number(mean_finite(lb)) << ","
                << format_number(mean_finite(ex)) << "," << crossing_flags(rows) << "\n";
        }
        out.crossings_csv = avg.str();
        out.crossings_by_region_csv = per.str();
    }
    const auto t3 = clock::now();

    auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
    const std::string canonical = config.canonical();
    char hash[19];
    std::snprintf(hash, sizeof hash, "0x%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
    nlohmann::ordered_json manifest;
    manifest["tool"] = "polmimo";
    manifest["version"] = std::string(kVersion);
    manifest["seed"] = config.seed;
    manifest["config_hash"] = hash;
    nlohmann::ordered_json echo = nlohmann::ordered_json::object();
    for (std::string_view line : split(canonical, '\n'))
    {
        const auto eq = line.find('=');
        if (eq != std::string_view::npos)
            echo[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
    }
    manifest["config"] = echo;
    manifest["timings_ms"] = {{"regions", ms(t1 - t0)}, {"crossings", ms(t2 - t1)}, {"render", ms(t3 - t2)}};
    manifest["outputs"] = {"kfactors.csv", "mi_vs_snr.csv", "crossings.csv", "crossings_by_region.csv"};
    out.manifest_json = manifest.dump(2) + "\n";
    return out;
}

ScenarioResult run_scenario_to_disk(const ScenarioConfig &config)
{
    ScenarioResult result = run_scenario(config);
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec || !std::filesystem::is_directory(config.out_dir))
        throw std::runtime_error("cannot create output directory '" + config.out_dir.string() + "'");
    write_file_atomic(config.out_dir / "kfactors.csv", result.kfactors_csv);
    write_file_atomic(config.out_dir / "mi_vs_snr.csv", result.mi_csv);
    write_file_atomic(config.out_dir / "crossings.csv", result.crossings_csv);
    write_file_atomic(config.out_dir / "crossings_by_region.csv", result.crossings_by_region_csv);
    write_file_atomic(config.out_dir / "manifest.json", result.manifest_json);
    return result;
}

} // namespace polmimo
