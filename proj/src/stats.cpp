#include "qsfb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qsfb/specfun.hpp"

namespace qsfb::stats {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxRx = 16;

// Conditionally on G = g the information statistic is below n*gamma exactly
// when a noncentral chi-square with 2n dof and noncentrality 2n/(rho g)
// exceeds (2(1+rho g)/(rho g)) * (n log(1+rho g) + n - n gamma).
double cond_llr_below(double rho, long n, double gamma, double g) {
    const double rg = rho * g;
    const double t = n * (std::log1p(rg) + 1.0 - gamma);
    if (t <= 0.0) return 1.0;
    return specfun::noncentral_chisq_sf(2.0 * (1.0 + rg) / rg * t, 2 * n, 2.0 * n / rg);
}

// Auxiliary statistic above n*gamma: noncentral chi-square with 2n dof and
// noncentrality 2n(1+rho g)/(rho g) below (2/(rho g)) * (same t).
double cond_log_aux_above(double rho, long n, double gamma, double g) {
    const double rg = rho * g;
    const double t = n * (std::log1p(rg) + 1.0 - gamma);
    if (t <= 0.0) return kNegInf;
    return specfun::noncentral_chisq_logcdf(2.0 / rg * t, 2 * n, 2.0 * n * (1.0 + rg) / rg);
}

// Projection relaxation of the angle test: pass iff a noncentral chi-square
// with 2n dof and noncentrality 2n gamma^2 g rho/(1-gamma)^2 falls below
// 2n gamma g rho/(1-gamma)^2.
double cond_angle_proj(double rho, long n, double gamma01, double g) {
    const double c = g * rho / ((1.0 - gamma01) * (1.0 - gamma01));
    return specfun::noncentral_chisq_cdf(2.0 * n * gamma01 * c, 2 * n,
                                         2.0 * n * gamma01 * gamma01 * c);
}

// Exact angle statistic, reduced to an O(r^2) draw: with the receive matrix
// rotated so the branch vector is (sqrt G, 0, ..., 0), cos^2 = q/(1+q) with
// q = ||L^{-1} a||^2, where a is the component of the receive matrix along
// the transmitted direction and L L^H is a Bartlett-factored complex
// Wishart(n-1, I_r) from the orthogonal complement.
double sample_angle_ratio(double rho, const fading::GainDistribution& gain, int r,
                          long n, rng::Philox& st) {
    const double s = std::sqrt(0.5);  // per-dim std of CN(0,1)
    const double g = gain.sample(st);

    double are[kMaxRx], aim[kMaxRx];
    are[0] = std::sqrt(n * rho * g) + s * st.next_normal();
    aim[0] = s * st.next_normal();
    for (int i = 1; i < r; ++i) {
        are[i] = s * st.next_normal();
        aim[i] = s * st.next_normal();
    }

    double ldiag[kMaxRx], lre[kMaxRx][kMaxRx], lim[kMaxRx][kMaxRx];
    for (int i = 0; i < r; ++i) {
        ldiag[i] = std::sqrt(st.next_gamma(static_cast<double>(n - 1 - i)));
        for (int j = 0; j < i; ++j) {
            lre[i][j] = s * st.next_normal();
            lim[i][j] = s * st.next_normal();
        }
    }

    double q = 0.0;
    double yre[kMaxRx], yim[kMaxRx];
    for (int i = 0; i < r; ++i) {
        double tre = are[i], tim = aim[i];
        for (int j = 0; j < i; ++j) {
            tre -= lre[i][j] * yre[j] - lim[i][j] * yim[j];
            tim -= lre[i][j] * yim[j] + lim[i][j] * yre[j];
        }
        yre[i] = tre / ldiag[i];
        yim[i] = tim / ldiag[i];
        q += yre[i] * yre[i] + yim[i] * yim[i];
    }
    return q;
}

void fill_angle_ratios(const ChannelSpec& spec, long n, long samples,
                       std::uint64_t seed, std::vector<double>& out) {
    out.resize(samples);
    const double rho = spec.snr;
    const int r = spec.num_rx;
    const auto& gain = *spec.gain;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < samples; ++i) {
        rng::Philox st(seed, static_cast<std::uint64_t>(i));
        out[i] = sample_angle_ratio(rho, gain, r, n, st);
    }
}

void check_exact_mode(const ChannelSpec& spec, long n, const NumericsConfig& cfg) {
    if (n <= spec.num_rx)
        throw std::domain_error("angle statistic requires blocklength > num_rx");
    if (spec.num_rx > kMaxRx)
        throw std::domain_error("exact angle sampler supports at most 16 antennas");
    if (cfg.mc_samples < 10000)
        throw std::domain_error("exact angle mode needs at least 1e4 MC samples");
}

}  // namespace

void ChannelSpec::validate() const {
    if (!(snr > 0.0)) throw std::domain_error("ChannelSpec: snr must be positive");
    if (!gain) throw std::domain_error("ChannelSpec: gain distribution missing");
    if (num_rx < 1) throw std::domain_error("ChannelSpec: num_rx must be >= 1");
    if (auto* rician = dynamic_cast<const fading::RicianSimoGain*>(gain.get()))
        if (rician->num_rx() != num_rx)
            throw std::domain_error("ChannelSpec: num_rx disagrees with gain distribution");
}

double prob_llr_below(const ChannelSpec& spec, long n, double gamma,
                      const NumericsConfig& cfg) {
    spec.validate();
    if (n < 1) throw std::domain_error("prob_llr_below: n must be >= 1");
    const double rho = spec.snr;
    const double split = gamma > 0.0 ? std::expm1(gamma) / rho : -1.0;
    return quadrature::expect_gain(
        *spec.gain, split, [&](double g) { return cond_llr_below(rho, n, gamma, g); },
        cfg.quad);
}

double log_prob_aux_llr_above(const ChannelSpec& spec, long n, double gamma,
                              const NumericsConfig& cfg) {
    spec.validate();
    if (n < 1) throw std::domain_error("log_prob_aux_llr_above: n must be >= 1");
    const double rho = spec.snr;
    const double split = gamma > 0.0 ? std::expm1(gamma) / rho : -1.0;
    return quadrature::log_expect_gain(
        *spec.gain, split, [&](double g) { return cond_log_aux_above(rho, n, gamma, g); },
        cfg.quad);
}

double prob_angle_test(const ChannelSpec& spec, long n, double gamma01,
                       AngleMode mode, const NumericsConfig& cfg) {
    spec.validate();
    if (n <= spec.num_rx)
        throw std::domain_error("prob_angle_test: requires n > num_rx");
    if (!(gamma01 >= 0.0) || !(gamma01 <= 1.0))
        throw std::domain_error("prob_angle_test: gamma01 must be in [0,1]");
    if (gamma01 == 0.0) return 0.0;
    if (gamma01 == 1.0) return 1.0;
    gamma01 = std::min(gamma01, 1.0 - 1e-9);

    if (mode == AngleMode::ProjectionLowerBound) {
        const double rho = spec.snr;
        const double split = (1.0 - gamma01) / (rho * gamma01);
        return quadrature::expect_gain(
            *spec.gain, split,
            [&](double g) { return cond_angle_proj(rho, n, gamma01, g); }, cfg.quad);
    }

    check_exact_mode(spec, n, cfg);
    const double threshold = (1.0 - gamma01) / gamma01;
    const long samples = cfg.mc_samples;
    const double rho = spec.snr;
    const int r = spec.num_rx;
    const auto& gain = *spec.gain;
    long count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (long i = 0; i < samples; ++i) {
        rng::Philox st(cfg.seed, static_cast<std::uint64_t>(i));
        if (sample_angle_ratio(rho, gain, r, n, st) >= threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(samples);
}

double angle_exact_threshold(const ChannelSpec& spec, long n, double target,
                             const NumericsConfig& cfg) {
    spec.validate();
    check_exact_mode(spec, n, cfg);
    if (!(target > 0.0) || !(target < 1.0))
        throw std::domain_error("angle_exact_threshold: target must be in (0,1)");

    std::vector<double> q;
    fill_angle_ratios(spec, n, cfg.mc_samples, cfg.seed, q);
    // P[ratio >= t] = target at the empirical (1 - target)-quantile
    long idx = static_cast<long>(std::floor((1.0 - target) * cfg.mc_samples));
    idx = std::clamp(idx, 0L, cfg.mc_samples - 1);
    std::nth_element(q.begin(), q.begin() + idx, q.end());
    return 1.0 / (1.0 + q[idx]);
}

}  // namespace qsfb::stats
