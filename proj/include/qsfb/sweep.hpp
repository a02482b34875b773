#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qsfb/bounds.hpp"

// Blocklength sweeps and the self-verification suite behind the CLI.

namespace qsfb::sweep {

struct RunConfig {
    double snr_db = -1.55;
    double epsilon = 1e-3;
    double k_factor_db = 20.0;
    int num_rx = 2;
    long n_min = 50;
    long n_max = 2000;
    int n_points = 30;
    std::vector<bounds::BoundKind> kinds = {
        bounds::BoundKind::OutageCapacity, bounds::BoundKind::ConverseCsirt,
        bounds::BoundKind::AchievabilityNoCsi, bounds::BoundKind::AchievabilityCsir,
        bounds::BoundKind::NormalAwgn};
    double tau = -1.0;  // <= 0: default min(1/n, epsilon/2)
    stats::AngleMode angle_mode = stats::AngleMode::ProjectionLowerBound;
    long mc_samples = 4000000;
    std::uint64_t seed = 20260825ULL;
    int quad_nodes = 24;
    std::string output_path = "sweep.csv";
    bool timing = false;  // off by default so CSV output is byte-reproducible

    void validate() const;  // throws std::invalid_argument
    stats::ChannelSpec channel() const;
    stats::NumericsConfig numerics() const;
};

// geometric grid, integer-rounded and de-duplicated
std::vector<long> blocklength_grid(long n_min, long n_max, int n_points);

struct SweepSummary {
    double c_eps_bits = 0.0;
    // per bound name: smallest n reaching 0.9 * C_eps (linear interpolation;
    // absent if the curve never crosses on the grid)
    std::map<std::string, double> crossing90;
    std::vector<bounds::BoundPoint> points;
};

// computes the configured curves, writes the CSV to config.output_path and
// a human-readable summary to `out`
SweepSummary run_sweep(const RunConfig& config, std::ostream& out);

std::string render_csv(const RunConfig& config, const std::vector<bounds::BoundPoint>& points,
                       const std::vector<double>& runtimes_ms);

struct VerifyReport {
    struct Check {
        std::string name;
        double measured = 0.0;
        double tolerance = 0.0;
        bool pass = false;
    };
    std::vector<Check> checks;
    bool all_pass() const;
};

// cross-validation suite: semi-analytic vs Monte Carlo statistics, the null
// angle law, gain-law consistency, and the threshold-expansion trend
VerifyReport run_verify(const RunConfig& config, std::ostream& out);

}  // namespace qsfb::sweep
