#pragma once

#include <limits>
#include <map>
#include <string>

#include "qsfb/stats.hpp"

// The five rate curves: outage capacity, the hypothesis-testing converse
// (full receiver/transmitter state knowledge), the no-CSI angle-test
// achievability, the receiver-CSI kappa-beta achievability, and the AWGN
// normal approximation.  Rates are reported in bits per channel use;
// internal math is in nats.

namespace qsfb::bounds {

enum class BoundKind {
    OutageCapacity,
    ConverseCsirt,
    AchievabilityNoCsi,
    AchievabilityCsir,
    NormalAwgn,
};

const char* bound_kind_name(BoundKind kind);

struct GammaSolution {
    double gamma = 0.0;
    double target_prob = 0.0;
    double achieved_prob = 0.0;
    int iterations = 0;
};

struct BoundPoint {
    long blocklength = 0;
    double rate_bits = 0.0;
    BoundKind kind = BoundKind::OutageCapacity;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    std::string status = "ok";
    std::map<std::string, double> diagnostics;
};

// epsilon-outage capacity in bits per channel use
double outage_capacity_bits(const stats::ChannelSpec& spec, double epsilon,
                            const stats::NumericsConfig& cfg);

// Converse with full state knowledge.  Statistics are evaluated at
// blocklength n; the bound covers blocklength n-1 and the returned point
// carries n-1 so plots stay honest.
BoundPoint converse_csirt(const stats::ChannelSpec& spec, long n, double epsilon,
                          const stats::NumericsConfig& cfg);

// Angle-test achievability without state knowledge; tau <= 0 selects the
// default min(1/n, epsilon/2)
BoundPoint achievability_nocsi(const stats::ChannelSpec& spec, long n,
                               double epsilon, double tau, stats::AngleMode mode,
                               const stats::NumericsConfig& cfg);

// kappa-beta achievability with receiver state knowledge
BoundPoint achievability_csir(const stats::ChannelSpec& spec, long n,
                              double epsilon, double tau,
                              const stats::NumericsConfig& cfg);

// Normal approximation for the nonfading complex AWGN channel at the same SNR
double normal_approx_awgn_bits(double snr, long n, double epsilon);

// min(1/n, epsilon/2): the asymptotic choice 1/n, clamped so the target
// success probability 1 - epsilon + tau stays feasible at small n
double default_tau(long n, double epsilon);

}  // namespace qsfb::bounds
