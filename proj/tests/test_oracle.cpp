#include <omp.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "qsfb/oracle.hpp"
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

}  // namespace

TEST_CASE("estimators are reproducible across thread counts") {
    const auto spec = strong_los_spec();
    oracle::McConfig mc{200000, 31};
    const int saved = omp_get_max_threads();

    omp_set_num_threads(1);
    const auto llr1 = oracle::mc_prob_llr_below(spec, 20, 0.6, mc);
    const auto ex1 = oracle::mc_prob_angle_exact(spec, 20, 0.55, mc);
    const auto grid1 = oracle::mc_statistic_grid(spec, 20, {0.5, 0.7}, {0.5, 0.6}, mc);

    omp_set_num_threads(4);
    const auto llr4 = oracle::mc_prob_llr_below(spec, 20, 0.6, mc);
    const auto ex4 = oracle::mc_prob_angle_exact(spec, 20, 0.55, mc);
    const auto grid4 = oracle::mc_statistic_grid(spec, 20, {0.5, 0.7}, {0.5, 0.6}, mc);

    omp_set_num_threads(saved);

    CHECK(llr1.mean == llr4.mean);
    CHECK(llr1.std_error == llr4.std_error);
    CHECK(ex1.mean == ex4.mean);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(grid1.llr_below[i].mean == grid4.llr_below[i].mean);
        CHECK(grid1.aux_llr_above[i].mean == grid4.aux_llr_above[i].mean);
        CHECK(grid1.angle_proj[i].mean == grid4.angle_proj[i].mean);
    }
    // same seed, same answer
    const auto again = oracle::mc_prob_llr_below(spec, 20, 0.6, mc);
    CHECK(again.mean == llr1.mean);
}

TEST_CASE("serial references match the parallel paths bit for bit") {
    const auto spec = strong_los_spec();
    oracle::McConfig mc{150000, 32};
    CHECK(oracle::mc_prob_llr_below(spec, 30, 0.65, mc).mean ==
          oracle::mc_prob_llr_below_ref(spec, 30, 0.65, mc).mean);
    CHECK(oracle::mc_prob_angle_proj(spec, 30, 0.55, mc).mean ==
          oracle::mc_prob_angle_proj_ref(spec, 30, 0.55, mc).mean);
}

TEST_CASE("trivial thresholds") {
    const auto spec = rayleigh_spec();
    oracle::McConfig mc{10000, 33};
    CHECK(oracle::mc_prob_llr_below(spec, 5, 1e6, mc).mean == 1.0);
    CHECK(oracle::mc_prob_llr_below(spec, 5, -1e6, mc).mean == 0.0);
    CHECK(oracle::mc_prob_angle_proj(spec, 5, 1e-12, mc).mean == 0.0);
    CHECK(oracle::mc_prob_aux_llr_above(spec, 5, -1e6, mc).mean == 1.0);
    CHECK_THROWS_AS(([&] { oracle::McConfig bad{100, 1}; bad.validate(); }()),
                    std::domain_error);
}

TEST_CASE("point-mass gain at blocklength one has a closed conditional form") {
    stats::ChannelSpec spec;
    spec.snr = 1.0;
    spec.num_rx = 1;
    spec.gain = std::make_shared<fading::DegenerateGain>(1.0);
    oracle::McConfig mc{1000000, 34};
    // S_1 = log 2 + 1 - |Z - 1|^2 / 2 with Z circular standard normal, so
    // P[S_1 <= gamma] is a noncentral chi-square tail with two degrees
    const double gamma = 0.5;
    const double t = 2.0 * (std::log(2.0) + 1.0 - gamma);  // threshold on |Z - 1|^2
    const double analytic = specfun::noncentral_chisq_sf(2.0 * t, 2, 2.0);
    const auto est = oracle::mc_prob_llr_below(spec, 1, gamma, mc);
    CHECK(std::fabs(est.mean - analytic) < 4.0 * est.std_error);
}

TEST_CASE("null angle statistic follows the beta law") {
    oracle::McConfig mc{1000000, 35};
    const auto est = oracle::mc_null_angle_test(30, 2, 0.95, mc);
    const double analytic = specfun::regularized_incomplete_beta(0.95, 28, 2);
    CHECK(std::fabs(est.mean - analytic) < 4.0 * est.std_error);

    // distribution-level check: empirical CDF of cos^2 draws against Beta(1, 9)
    const long samples = 100000;
    auto draws = oracle::mc_null_angle_samples(10, 1, samples, 36);
    REQUIRE(static_cast<long>(draws.size()) == samples);
    std::sort(draws.begin(), draws.end());
    double dev = 0.0;
    for (long i = 0; i < samples; i += 17) {
        const double f = specfun::regularized_incomplete_beta(1.0 - draws[i], 9, 1);
        dev = std::max(dev, std::fabs((1.0 - f) - (i + 0.5) / samples));
    }
    CHECK(dev < 1.95 / std::sqrt(static_cast<double>(samples)));
}

TEST_CASE("shared-sample grid matches the individual estimators") {
    const auto spec = strong_los_spec();
    oracle::McConfig mc{400000, 37};
    const std::vector<double> gnats = {0.5, 0.7, 0.9};
    const std::vector<double> g01 = {0.45, 0.55, 0.65};
    const auto grid = oracle::mc_statistic_grid(spec, 20, gnats, g01, mc);
    REQUIRE(grid.llr_below.size() == gnats.size());
    REQUIRE(grid.angle_proj.size() == g01.size());
    for (std::size_t i = 0; i < gnats.size(); ++i) {
        const auto a = oracle::mc_prob_llr_below(spec, 20, gnats[i], mc);
        const auto b = oracle::mc_prob_aux_llr_above(spec, 20, gnats[i], mc);
        // same streams and draw order; only indicator-boundary samples differ
        CHECK(std::fabs(grid.llr_below[i].mean - a.mean) < 5e-6);
        CHECK(std::fabs(grid.aux_llr_above[i].mean - b.mean) < 5e-6);
    }
    for (std::size_t i = 0; i < g01.size(); ++i) {
        const auto c = oracle::mc_prob_angle_proj(spec, 20, g01[i], mc);
        CHECK(std::fabs(grid.angle_proj[i].mean - c.mean) < 5e-6);
    }
    // monotonicity inside the grid is exact by construction
    CHECK(grid.llr_below[0].mean <= grid.llr_below[1].mean);
    CHECK(grid.llr_below[1].mean <= grid.llr_below[2].mean);
    CHECK(grid.aux_llr_above[0].mean >= grid.aux_llr_above[1].mean);
    CHECK(grid.angle_proj[0].mean <= grid.angle_proj[2].mean);
}
