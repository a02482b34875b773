#pragma once

#include <cstdint>
#include <memory>

#include "qsfb/fading.hpp"
#include "qsfb/quadrature.hpp"

// Marginal distribution functions of the three decision statistics behind
// the bounds: the channel information statistic (converse test under the
// true channel), the auxiliary-channel statistic (Neyman-Pearson type-II
// side), and the decoder angle statistic.  Conditionally on the gain each
// reduces to a noncentral chi-square probability; the gain is integrated
// out by quadrature.

namespace qsfb::stats {

struct ChannelSpec {
    double snr = 1.0;  // linear
    std::shared_ptr<const fading::GainDistribution> gain;
    int num_rx = 1;

    void validate() const;
};

struct NumericsConfig {
    quadrature::QuadControl quad;
    double root_tol = 1e-9;  // residual in probability
    int root_max_iter = 200;
    long mc_samples = 1000000;
    std::uint64_t seed = 20260825ULL;
};

enum class AngleMode { ProjectionLowerBound, McExact };

// P[information statistic <= n * gamma] under the true channel; gamma in
// nats per channel use
double prob_llr_below(const ChannelSpec& spec, long n, double gamma,
                      const NumericsConfig& cfg);

// log P[auxiliary statistic >= n * gamma]; -inf when the probability
// underflows even the log-domain accumulation
double log_prob_aux_llr_above(const ChannelSpec& spec, long n, double gamma,
                              const NumericsConfig& cfg);

// P[cos^2 of the decoder angle >= 1 - gamma01].  ProjectionLowerBound is
// the semi-analytic relaxation (projects the receive matrix onto the
// branch-coefficient direction; never exceeds the exact probability).
// McExact evaluates the exact angle law by Monte Carlo.
double prob_angle_test(const ChannelSpec& spec, long n, double gamma01,
                       AngleMode mode, const NumericsConfig& cfg);

// Smallest gamma01 whose exact-statistic angle-test probability reaches
// `target`, from the empirical quantile of one Monte Carlo pass
double angle_exact_threshold(const ChannelSpec& spec, long n, double target,
                             const NumericsConfig& cfg);

}  // namespace qsfb::stats
