#pragma once

#include <cstdint>
#include <vector>

#include "qsfb/stats.hpp"

// Zero-dispersion expansion machinery: the O(1/n) threshold corrections for
// the converse and achievability tests, built from the gain density and its
// derivative, plus a Monte Carlo harness for the smoothing expansion
// P[A <= sqrt(n) B] = P[B >= 0] - f_B'(0)/(2n) + O(n^{-3/2}).

namespace qsfb::asymptotics {

struct ExpansionTerms {
    double c_eps_nats = 0.0;
    double fc_prime = 0.0;      // density of the capacity-outage law at C_eps
    double f_of_c = 0.0;        // converse density correction at C_eps
    double f_alt_of_c = 0.0;    // achievability density correction at C_eps
    // threshold corrections, coefficient of 1/n:
    double gamma_correction = 0.0;       // (f + 2) / (2 fc'), target eps + 1/n
    double gamma_correction_base = 0.0;  // f / (2 fc'), target eps
    double gamma_correction_ach = 0.0;   // -(f_alt + 2) / (2 fc')
};

// Derivative at 0 of the density of the normalized conditional-mean gap for
// the converse statistic, as a closed form in the gain pdf and its
// derivative; xi in nats
double density_correction(const stats::ChannelSpec& spec, double xi);

// Same object for the achievability (angle-test) statistic
double density_correction_ach(const stats::ChannelSpec& spec, double xi);

ExpansionTerms expansion_terms(const stats::ChannelSpec& spec, double epsilon,
                               const stats::NumericsConfig& cfg);

// C_eps + (f + 2) / (2 n fc'): expansion of the converse threshold solved at
// target eps + 1/n.  Nats.
double threshold_expansion_converse(const stats::ChannelSpec& spec,
                                    double epsilon, long n,
                                    const stats::NumericsConfig& cfg);

// C_eps - (f_alt + 2) / (2 n fc'): expansion of the achievability threshold
// (in nats, via gamma_nats = -log gamma01)
double threshold_expansion_achievability(const stats::ChannelSpec& spec,
                                         double epsilon, long n,
                                         const stats::NumericsConfig& cfg);

struct SmoothingReport {
    std::vector<long> n_grid;
    std::vector<double> prob;        // MC estimate of P[A <= sqrt(n) B]
    std::vector<double> normalized;  // n^{3/2} |prob - P[B>=0] + f_B'(0)/(2n)|
    std::vector<double> std_error;   // MC standard error of prob
    double median_normalized = 0.0;
    double final_normalized = 0.0;
    bool bounded = false;  // final < 10 * median
};

// A is a standardized sum of four unit exponentials; B is Gaussian with
// mean b_center and unit variance, integrated out analytically so the
// n^{3/2}-scale signal is not drowned by indicator noise.
SmoothingReport verify_smoothing_expansion(double b_center,
                                           const std::vector<long>& n_grid,
                                           long mc_samples, std::uint64_t seed);

}  // namespace qsfb::asymptotics
