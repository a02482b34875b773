// Command-line front end: blocklength sweeps (CSV output) and the
// self-verification suite.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 verification failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "qsfb/sweep.hpp"

namespace {

int parse_bound_list(const std::string& list, std::vector<qsfb::bounds::BoundKind>& kinds) {
    kinds.clear();
    std::string item;
    std::stringstream ss(list);
    while (std::getline(ss, item, ',')) {
        if (item == "outage" || item == "outage-capacity")
            kinds.push_back(qsfb::bounds::BoundKind::OutageCapacity);
        else if (item == "converse" || item == "converse-csirt")
            kinds.push_back(qsfb::bounds::BoundKind::ConverseCsirt);
        else if (item == "nocsi" || item == "achievability-nocsi")
            kinds.push_back(qsfb::bounds::BoundKind::AchievabilityNoCsi);
        else if (item == "csir" || item == "achievability-csir")
            kinds.push_back(qsfb::bounds::BoundKind::AchievabilityCsir);
        else if (item == "normal" || item == "normal-awgn")
            kinds.push_back(qsfb::bounds::BoundKind::NormalAwgn);
        else
            return -1;
    }
    return kinds.empty() ? -1 : 0;
}

void apply_preset(const std::string& preset, qsfb::sweep::RunConfig& config) {
    if (preset == "fig1") {
        config.snr_db = -1.55;
        config.epsilon = 1e-3;
        config.k_factor_db = 20.0;
        config.num_rx = 2;
        config.n_min = 50;
        config.n_max = 2000;
        config.n_points = 30;
    } else if (preset == "awgn-ref") {
        // complex AWGN reference with capacity 1 bit per channel use
        config.snr_db = 0.0;
        config.epsilon = 1e-3;
        config.k_factor_db = 20.0;
        config.num_rx = 1;
        config.n_min = 100;
        config.n_max = 5000;
        config.n_points = 40;
        config.kinds = {qsfb::bounds::BoundKind::NormalAwgn};
    } else {
        throw CLI::ValidationError("--preset", "unknown preset '" + preset + "'");
    }
}

void add_common_options(CLI::App* cmd, qsfb::sweep::RunConfig& config,
                        std::string& bound_list, std::string& angle_mode,
                        std::string& tau_str) {
    cmd->add_option("--snr-db", config.snr_db, "SNR in dB");
    cmd->add_option("--epsilon", config.epsilon, "block error probability target");
    cmd->add_option("--k-db", config.k_factor_db, "Rician K-factor in dB");
    cmd->add_option("--rx", config.num_rx, "number of receive antennas");
    cmd->add_option("--n-min", config.n_min, "smallest blocklength");
    cmd->add_option("--n-max", config.n_max, "largest blocklength");
    cmd->add_option("--n-points", config.n_points, "points on the geometric grid");
    cmd->add_option("--bound", bound_list,
                    "comma list: outage,converse,nocsi,csir,normal");
    cmd->add_option("--tau", tau_str, "threshold-test parameter, number or 'auto'");
    cmd->add_option("--angle-mode", angle_mode, "projection | mc-exact");
    cmd->add_option("--mc-samples", config.mc_samples, "Monte Carlo sample count");
    cmd->add_option("--seed", config.seed, "RNG seed");
    cmd->add_option("--quad-nodes", config.quad_nodes, "initial quadrature order");
    cmd->add_option("--out", config.output_path, "output CSV path");
    cmd->add_flag("--timing", config.timing, "record per-point runtimes in the CSV");
}

int finalize_config(qsfb::sweep::RunConfig& config, const std::string& bound_list,
                    const std::string& angle_mode, const std::string& tau_str) {
    if (!bound_list.empty() && parse_bound_list(bound_list, config.kinds) != 0) {
        std::cerr << "error: unknown bound in --bound '" << bound_list << "'\n";
        return 2;
    }
    if (angle_mode == "projection")
        config.angle_mode = qsfb::stats::AngleMode::ProjectionLowerBound;
    else if (angle_mode == "mc-exact")
        config.angle_mode = qsfb::stats::AngleMode::McExact;
    else if (!angle_mode.empty()) {
        std::cerr << "error: unknown --angle-mode '" << angle_mode << "'\n";
        return 2;
    }
    if (!tau_str.empty()) {
        if (tau_str == "auto") {
            config.tau = -1.0;
        } else {
            try {
                config.tau = std::stod(tau_str);
            } catch (const std::exception&) {
                std::cerr << "error: bad --tau '" << tau_str << "'\n";
                return 2;
            }
        }
    }
    try {
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("QSFB_THREADS")) {
        const int t = std::atoi(threads);
        if (t > 0) omp_set_num_threads(t);
    }

    CLI::App app{"finite-blocklength rate bounds for quasi-static SIMO fading channels"};
    app.require_subcommand(1);

    qsfb::sweep::RunConfig config;
    std::string bound_list, angle_mode, tau_str, preset;

    auto* sweep_cmd = app.add_subcommand("sweep", "compute rate curves, write CSV");
    auto* verify_cmd = app.add_subcommand("verify", "run the cross-validation suite");
    for (auto* cmd : {sweep_cmd, verify_cmd}) {
        cmd->add_option("--preset", preset, "fig1 | awgn-ref");
        add_common_options(cmd, config, bound_list, angle_mode, tau_str);
    }

    // preset first so explicit flags override it
    for (int i = 1; i < argc - 1; ++i) {
        if (std::string(argv[i]) == "--preset") {
            try {
                apply_preset(argv[i + 1], config);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 2;
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (int rc = finalize_config(config, bound_list, angle_mode, tau_str); rc != 0) return rc;

    try {
        if (sweep_cmd->parsed()) {
            qsfb::sweep::run_sweep(config, std::cout);
            return 0;
        }
        const auto report = qsfb::sweep::run_verify(config, std::cout);
        return report.all_pass() ? 0 : 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}
