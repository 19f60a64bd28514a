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
#include "polmimo/crossing.hpp"
#include "polmimo/errors.hpp"
#include "polmimo/scenario.hpp"
#include "polmimo/snapshot_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace
{

using namespace polmimo;

enum ExitCode
{
    kOk = 0,
    kConfigError = 2,
    kDataError = 3,
    kNumericalError = 4
};

struct GlobalOptions
{
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<Index> mc_samples;
    std::optional<Index> ndp;
    std::string policy;
    std::string snr_db;
    bool analytic = false;
};

ScenarioConfig make_config(const GlobalOptions &g, const std::string &config_path, const std::string &preset)
{
    ScenarioConfig c = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
    if (!preset.empty())
        apply_preset(c, preset);
    if (g.seed)
        c.seed = *g.seed;
    if (g.mc_samples)
        c.mc_samples = *g.mc_samples;
    if (g.ndp)
        c.n_dp = *g.ndp;
    if (!g.policy.empty())
        set_config_value(c, "policy", g.policy);
    if (!g.snr_db.empty())
        set_config_value(c, "snr_db", g.snr_db);
    if (g.analytic)
        c.analytic = true;
    return c;
}

void emit(const std::string &out, const std::string &text)
{
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file_atomic(out, text);
}

std::string kfactor_table(const RegionEvaluation &ev)
{
    std::ostringstream os;
    os << "pair,k_greenstein,k_decomposition\n";
    for (Pair p : kAllPairs)
        if (!ev.layout.links(p).empty())
            os << pair_name(p) << "," << format_number(ev.k_greenstein[p]) << ","
               << format_number(ev.k_decomposition[p]) << "\n";
    return os.str();
}

std::string mi_table(const RegionEvaluation &ev)
{
    std::ostringstream os;
    os << "snr_db,mi_exact,mi_exact_se,mi_approx,mi_jensen,mi_lb\n";
    for (const SnrPoint &p : ev.points)
        os << format_number(p.snr_db) << "," << format_number(p.exact.bits) << ","
           << format_number(p.exact.std_error) << "," << format_number(p.approx) << "," << format_number(p.jensen)
           << "," << format_number(p.lower_bound) << "\n";
    return os.str();
}

std::string crossing_row(const CrossingResult &j, const CrossingResult &lb, double exact_db)
{
    auto db = [](const CrossingResult &r) { return r.always_dp ? std::string("always_dp") : format_number(linear_to_db(r.rho)); };
    std::string flags;
    if (lb.tangency)
        flags = "lb_tangency";
    return db(j) + "," + db(lb) + "," + (std::isnan(exact_db) ? std::string("nan") : format_number(exact_db)) + "," +
           (flags.empty() ? "none" : flags) + "\n";
}

int run(int argc, char **argv)
{
    CLI::App app{"polmimo: dual-polarized Ricean MIMO channel decomposition and MI analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--out", g.out, "Output file (generate, decompose, mi, cross) or directory (scenario)");
    app.add_option("--mc-samples", g.mc_samples, "Fresh draws for the exact MI (0 reuses the snapshots)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--ndp", g.ndp, "Number of dominant directions extracted in DP mode")->check(CLI::Range(1, 4));
    app.add_option("--policy", g.policy, "Input power allocation")
        ->check(CLI::IsMember({"waterfill", "equal", "single"}));
    app.add_option("--snr-db", g.snr_db, "SNR grid start:stop:step in dB");
    app.add_flag("--analytic", g.analytic, "Use analytic moments instead of sampled ones");

    std::string config_path, preset, setup = "DP", in_path, sp_path, dp_path;
    Index region = 0;
    unsigned threads = 0;

    auto *gen = app.add_subcommand("generate", "Sample one region of a planted model into a PMS1 file");
    gen->add_option("--config", config_path, "Scenario config file")->check(CLI::ExistingFile);
    gen->add_option("--preset", preset, "Scenario preset");
    gen->add_option("--setup", setup, "VP, HP or DP")->check(CLI::IsMember({"VP", "HP", "DP"}));
    gen->add_option("--region", region, "Region index")->check(CLI::NonNegativeNumber);

    auto *dec = app.add_subcommand("decompose", "Decompose a PMS1 region and print per-pair K-factors");
    dec->add_option("--in", in_path, "PMS1 snapshot file")->required();
    dec->add_option("--config", config_path, "Scenario config file")->check(CLI::ExistingFile);

    auto *mi = app.add_subcommand("mi", "Evaluate the MI variants of a PMS1 region over an SNR grid");
    mi->add_option("--in", in_path, "PMS1 snapshot file")->required();
    mi->add_option("--config", config_path, "Scenario config file")->check(CLI::ExistingFile);

    double lambda_sp = 0.0, w_sp = 0.0, w_dp = 0.0;
    std::vector<double> lambda_dp, q_dp{0.5, 0.5};
    auto *cross = app.add_subcommand("cross", "SP single-stream vs DP two-stream crossing SNR");
    cross->add_option("--sp", sp_path, "PMS1 file of the SP setup");
    cross->add_option("--dp", dp_path, "PMS1 file of the DP setup");
    cross->add_option("--config", config_path, "Scenario config file")->check(CLI::ExistingFile);
    cross->add_option("--lambda-sp", lambda_sp, "Largest SP transmit eigenvalue");
    cross->add_option("--lambda-dp", lambda_dp, "Two largest DP transmit eigenvalues")->expected(2)->delimiter(',');
    cross->add_option("--q", q_dp, "DP stream powers")->expected(2)->delimiter(',');
    cross->add_option("--w-sp", w_sp, "SP lower-bound correction in nats");
    cross->add_option("--w-dp", w_dp, "DP lower-bound correction in nats");

    auto *sc = app.add_subcommand("scenario", "Run a full scenario and write CSV tables");
    sc->add_option("--config", config_path, "Scenario config file")->check(CLI::ExistingFile);
    sc->add_option("--preset", preset, "low-k, medium-k, high-k or varying-k");
    sc->add_option("--threads", threads, "Worker threads (0 = all cores)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    ScenarioConfig config = make_config(g, config_path, preset);

    if (*gen)
    {
        if (g.out.empty())
            throw ConfigError("generate needs --out <file>", 0, "out");
        write_snapshots(region_snapshots(config, parse_setup(setup), region), g.out);
        return kOk;
    }
    if (*dec)
    {
        config.validate();
        const RegionEvaluation ev = evaluate_snapshots(config, read_snapshots(in_path), 0);
        std::cerr << "scale " << format_number(ev.scale) << ", c_k";
        for (Index k = 0; k < ev.decomposition.coefficients.size(); ++k)
            std::cerr << " " << format_number(ev.decomposition.coefficients(k));
        std::cerr << "\n";
        emit(g.out, kfactor_table(ev));
        return kOk;
    }
    if (*mi)
    {
        config.validate();
        emit(g.out, mi_table(evaluate_snapshots(config, read_snapshots(in_path), 0)));
        return kOk;
    }
    if (*cross)
    {
        const std::string header = "rho_cp_jensen_db,rho_cp_lb_db,rho_cp_exact_numeric_db,flags\n";
        if (!sp_path.empty() || !dp_path.empty())
        {
            if (sp_path.empty() || dp_path.empty())
                throw ConfigError("cross needs both --sp and --dp", 0, "sp");
            config.validate();
            const RegionEvaluation sp = evaluate_snapshots(config, read_snapshots(sp_path), 0);
            const RegionEvaluation dp = evaluate_snapshots(config, read_snapshots(dp_path), 0);
            const RegionCrossing c = cross_setups(sp, dp, config.crossing_snr);
            emit(g.out, header + crossing_row(c.jensen, c.lower_bound, c.exact_db()));
            return kOk;
        }
        if (lambda_dp.size() != 2 || q_dp.size() != 2)
            throw ConfigError("cross needs --lambda-sp, --lambda-dp a,b (or --sp/--dp files)", 0, "lambda-dp");
        CrossingSpec spec{lambda_sp, {lambda_dp[0], lambda_dp[1]}, {q_dp[0], q_dp[1]}, w_sp, w_dp};
        emit(g.out, header + crossing_row(rho_cp_jensen(spec), rho_cp_lower_bound(spec),
                                          std::numeric_limits<double>::quiet_NaN()));
        return kOk;
    }
    if (*sc)
    {
        if (!g.out.empty())
            config.out_dir = g.out;
        if (threads)
            config.threads = threads;
        run_scenario_to_disk(config);
        std::cerr << "wrote " << config.out_dir.string() << "\n";
        return kOk;
    }
    return kConfigError;
}

} // namespace

int main(int argc, char **argv)
{
    try
    {
        return run(argc, argv);
    }
    catch (const polmimo::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const polmimo::FormatError &e)
    {
        std::cerr << "format error: " << e.what() << "\n";
        return kDataError;
    }
    catch (const polmimo::DegenerateInputError &e)
    {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return kDataError;
    }
    catch (const polmimo::NumericalError &e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    }
    catch (const polmimo::NotPsdError &e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
}
