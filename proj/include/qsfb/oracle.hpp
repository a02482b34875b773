#pragma once

#include <cstdint>
#include <vector>

#include "qsfb/stats.hpp"

// Independent Monte Carlo estimators for every probability the
// semi-analytic path computes.  Each simulates its statistic directly from
// the channel definition (branch coefficients, noise matrix, angle between
// subspaces) and never reuses the chi-square reductions, so agreement is a
// real cross-check.  All estimators are deterministic in (seed, samples)
// for any thread count.

namespace qsfb::oracle {

struct McConfig {
    long samples = 1000000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long samples = 0;
    std::uint64_t seed = 0;
};

// P[information statistic <= n * gamma], direct simulation
McEstimate mc_prob_llr_below(const stats::ChannelSpec& spec, long n, double gamma,
                             const McConfig& mc);

// P[auxiliary statistic >= n * gamma], direct simulation
McEstimate mc_prob_aux_llr_above(const stats::ChannelSpec& spec, long n,
                                 double gamma, const McConfig& mc);

// P[projection statistic passes at gamma01]: the Monte Carlo twin of the
// semi-analytic projection lower bound
McEstimate mc_prob_angle_proj(const stats::ChannelSpec& spec, long n,
                              double gamma01, const McConfig& mc);

// P[cos^2 angle(x0, receive matrix) >= 1 - gamma01], exact statistic via
// two-pass modified Gram-Schmidt on the receive matrix
McEstimate mc_prob_angle_exact(const stats::ChannelSpec& spec, long n,
                               double gamma01, const McConfig& mc);

// All three twin estimators over threshold grids from one shared sample
// pass (per sample the statistics reduce to the gain, the noise energy and
// the in-phase noise sum, so extra thresholds are free)
struct GridEstimates {
    std::vector<McEstimate> llr_below;
    std::vector<McEstimate> aux_llr_above;
    std::vector<McEstimate> angle_proj;
};
GridEstimates mc_statistic_grid(const stats::ChannelSpec& spec, long n,
                                const std::vector<double>& gammas_nats,
                                const std::vector<double>& gammas01,
                                const McConfig& mc);

// Serial reference implementations of the two hottest estimators: plain
// sequential loops with no OpenMP, kept as the ground truth the parallel
// paths must match bit for bit (see the bench_mc tool)
McEstimate mc_prob_llr_below_ref(const stats::ChannelSpec& spec, long n,
                                 double gamma, const McConfig& mc);
McEstimate mc_prob_angle_proj_ref(const stats::ChannelSpec& spec, long n,
                                  double gamma01, const McConfig& mc);

// Null test: probability that an independent random direction passes the
// angle test against a pure-noise receive matrix.  The analytic side is the
// Beta(n - r, r) CDF at gamma01.
McEstimate mc_null_angle_test(long n, int num_rx, double gamma01,
                              const McConfig& mc);

// Raw cos^2 draws of the null angle statistic, for distribution-level tests
std::vector<double> mc_null_angle_samples(long n, int num_rx, long samples,
                                          std::uint64_t seed);

}  // namespace qsfb::oracle
