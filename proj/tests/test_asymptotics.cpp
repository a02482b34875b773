#include <cmath>
#include <memory>

#include "doctest.h"
#include "qsfb/asymptotics.hpp"
#include "qsfb/bounds.hpp"
#include "qsfb/specfun.hpp"

using namespace qsfb;

namespace {

stats::ChannelSpec rayleigh_spec() {
    stats::ChannelSpec spec;
    spec.snr = 1.0;
    spec.num_rx = 1;
    spec.gain = std::make_shared<fading::RicianSimoGain>(0.0, 1);
    return spec;
}

stats::ChannelSpec strong_los_spec() {
    stats::ChannelSpec spec;
    spec.snr = std::pow(10.0, -0.155);
    spec.num_rx = 2;
    spec.gain = std::make_shared<fading::RicianSimoGain>(100.0, 2);
    return spec;
}

// gain value mapping to a given value of the normalized gap variable
// b = (log(1 + rho g) - xi) / sigma(g), sigma(g) = sqrt(rho^2 g^2 + 2 rho g) / (1 + rho g)
double gap_variable(const stats::ChannelSpec& spec, double g, double xi) {
    const double rg = spec.snr * g;
    return (std::log1p(rg) - xi) / (std::sqrt(rg * rg + 2.0 * rg) / (1.0 + rg));
}

double invert_gap(const stats::ChannelSpec& spec, double b, double xi) {
    double lo = 1e-12, hi = spec.gain->upper_range();
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gap_variable(spec, mid, xi) < b)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// density of the gap variable at b by mapping the gain density through the
// numerically differentiated inverse
double gap_density(const stats::ChannelSpec& spec, double b, double xi) {
    const double h = 1e-5;
    const double gm = invert_gap(spec, b - h, xi);
    const double gp = invert_gap(spec, b + h, xi);
    return spec.gain->pdf(invert_gap(spec, b, xi)) * (gp - gm) / (2.0 * h);
}

// bisect the converse statistic threshold at an arbitrary target level
double solve_llr_target(const stats::ChannelSpec& spec, long n, double target,
                        const stats::NumericsConfig& cfg) {
    const double c = std::log1p(spec.snr * spec.gain->quantile(target));
    double lo = c - 1.0, hi = c + 1.0;
    while (stats::prob_llr_below(spec, n, lo, cfg) > target) lo -= 1.0;
    while (stats::prob_llr_below(spec, n, hi, cfg) < target) hi += 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (stats::prob_llr_below(spec, n, mid, cfg) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// bisect the smallest angle threshold meeting the success target
double solve_angle_target(const stats::ChannelSpec& spec, long n, double target,
                          const stats::NumericsConfig& cfg) {
    double lo = 0.0, hi = 1.0 - 1e-12;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (stats::prob_angle_test(spec, n, mid, stats::AngleMode::ProjectionLowerBound, cfg) <
            target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("density corrections match the Rayleigh closed forms") {
    const auto spec = rayleigh_spec();
    const double xi = std::log(2.0);
    CHECK(asymptotics::density_correction(spec, xi) ==
          doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-10));
    CHECK(asymptotics::density_correction_ach(spec, xi) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK_THROWS_AS(asymptotics::density_correction(spec, 0.0), std::domain_error);
}

TEST_CASE("converse density correction equals the gap-density derivative") {
    // independent oracle: push the gain law through b(g) and differentiate at
    // 0; the correction is defined on the reflected variable -b, so its
    // derivative carries the opposite sign
    for (const auto& spec : {rayleigh_spec(), strong_los_spec()}) {
        for (double xi : {0.4, 0.7}) {
            const double h = 1e-3;
            const double fd =
                -(gap_density(spec, h, xi) - gap_density(spec, -h, xi)) / (2.0 * h);
            const double f = asymptotics::density_correction(spec, xi);
            CHECK(f == doctest::Approx(fd).epsilon(1e-3));
        }
    }
}

TEST_CASE("expansion terms at the operating point") {
    const auto spec = strong_los_spec();
    stats::NumericsConfig cfg;
    const auto terms = asymptotics::expansion_terms(spec, 1e-3, cfg);
    CHECK(terms.c_eps_nats == doctest::Approx(0.6932520908563861).epsilon(1e-8));
    CHECK(terms.fc_prime == doctest::Approx(0.05734).epsilon(2e-3));
    CHECK(terms.gamma_correction_base == doctest::Approx(-19.98).epsilon(5e-3));
    CHECK(terms.gamma_correction == doctest::Approx(-2.543).epsilon(5e-3));
    CHECK(terms.gamma_correction_ach == doctest::Approx(-24.39).epsilon(5e-3));
    // the two converse pairings differ by exactly 1 / fc'
    CHECK(terms.gamma_correction - terms.gamma_correction_base ==
          doctest::Approx(1.0 / terms.fc_prime).epsilon(1e-10));
}

TEST_CASE("converse threshold expansion with the shifted target") {
    // solving at level eps + 1/n tracks C + (f + 2) / (2 n fc') to O(n^{-3/2})
    const auto spec = rayleigh_spec();
    stats::NumericsConfig cfg;
    const double eps = 0.1;
    const long n = 1000;
    const double solved = solve_llr_target(spec, n, eps + 1.0 / n, cfg);
    const double expanded = asymptotics::threshold_expansion_converse(spec, eps, n, cfg);
    CHECK(std::fabs(solved - expanded) < 10.0 * std::pow(static_cast<double>(n), -1.5));
}

TEST_CASE("achievability threshold expansion") {
    const auto spec = rayleigh_spec();
    stats::NumericsConfig cfg;
    const double eps = 0.1;
    const long n = 1000;
    const double g01 = solve_angle_target(spec, n, 1.0 - eps + 1.0 / n, cfg);
    const double solved = -std::log(g01);
    const double expanded = asymptotics::threshold_expansion_achievability(spec, eps, n, cfg);
    CHECK(std::fabs(solved - expanded) < 10.0 * std::pow(static_cast<double>(n), -1.5));
}

TEST_CASE("unshifted target trends to the base correction") {
    const auto spec = rayleigh_spec();
    stats::NumericsConfig cfg;
    const double eps = 0.1;
    const auto terms = asymptotics::expansion_terms(spec, eps, cfg);
    double prev = std::numeric_limits<double>::infinity();
    for (long n : {250L, 1000L, 4000L}) {
        const double gamma = solve_llr_target(spec, n, eps, cfg);
        const double e = n * (gamma - terms.c_eps_nats);
        const double gap = std::fabs(e - terms.gamma_correction_base);
        CHECK(gap < prev + 1e-9);
        prev = gap;
    }
    CHECK(prev < 0.35);
}

TEST_CASE("smoothing expansion harness smoke test") {
    const auto report = asymptotics::verify_smoothing_expansion(0.3, {100, 400}, 2000000, 123);
    REQUIRE(report.prob.size() == 2);
    const double limit = specfun::gaussian_q(-0.3);
    for (std::size_t i = 0; i < report.prob.size(); ++i) {
        CHECK(std::fabs(report.prob[i] - limit) < 0.05);
        CHECK(report.std_error[i] > 0.0);
        CHECK(std::isfinite(report.normalized[i]));
    }
    CHECK(report.final_normalized == report.normalized.back());
    CHECK_THROWS_AS(asymptotics::verify_smoothing_expansion(0.3, {1, 100}, 2000000, 1),
                    std::domain_error);
    CHECK_THROWS_AS(asymptotics::verify_smoothing_expansion(0.3, {100}, 100, 1),
                    std::domain_error);
}
