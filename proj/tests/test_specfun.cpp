#include <cmath>
#include <functional>

#include "doctest.h"
#include "qsfb/rng.hpp"
#include "qsfb/specfun.hpp"

using namespace qsfb::specfun;

namespace {

// adaptive Simpson oracle for the Beta density integral
double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fb, double fm, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, fm, flm, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, fb, frm, 0.5 * tol, depth - 1);
}

double beta_cdf_oracle(double x, double a, double b) {
    const double lnB = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    auto dens = [&](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - lnB);
    };
    const double m = 0.5 * x;
    return simpson(dens, 0.0, x, dens(0.0), dens(x), dens(m), 1e-13, 40);
}

}  // namespace

TEST_CASE("incomplete beta endpoints and symmetry") {
    CHECK(regularized_incomplete_beta(0.0, 5, 2) == 0.0);
    CHECK(regularized_incomplete_beta(1.0, 5, 2) == 1.0);
    CHECK(regularized_incomplete_beta(0.5, 2, 2) == doctest::Approx(0.5).epsilon(1e-12));
    for (double x : {0.05, 0.2, 0.45, 0.7, 0.93}) {
        const double s = regularized_incomplete_beta(x, 3.5, 1.25) +
                         regularized_incomplete_beta(1.0 - x, 1.25, 3.5);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("incomplete beta against quadrature oracle and frozen value") {
    const double v = regularized_incomplete_beta(0.3, 98, 2);
    CHECK(std::fabs(v - beta_cdf_oracle(0.3, 98, 2)) < 1e-10);
    // frozen from a 40-digit evaluation of the regularized incomplete beta
    CHECK(v == doctest::Approx(3.9855861603275543e-50).epsilon(1e-10));
    CHECK(log_regularized_incomplete_beta(0.3, 98, 2) ==
          doctest::Approx(std::log(3.9855861603275543e-50)).epsilon(1e-10));
    // log variant agrees with the linear one where both are representable
    for (double x : {0.1, 0.4, 0.8, 0.99}) {
        CHECK(std::exp(log_regularized_incomplete_beta(x, 6, 3)) ==
              doctest::Approx(regularized_incomplete_beta(x, 6, 3)).epsilon(1e-11));
    }
}

TEST_CASE("incomplete beta domain errors") {
    CHECK_THROWS_AS(regularized_incomplete_beta(-0.1, 2, 2), std::domain_error);
    CHECK_THROWS_AS(regularized_incomplete_beta(1.1, 2, 2), std::domain_error);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 0.0, 2), std::domain_error);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 2, -1.0), std::domain_error);
}

TEST_CASE("incomplete gamma basics") {
    CHECK(gamma_p(3, 0.0) == 0.0);
    CHECK(gamma_q(3, 0.0) == 1.0);
    for (double a : {0.5, 2.0, 17.0, 400.0})
        for (double x : {0.3, 2.0, 15.0, 380.0, 900.0})
            CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
    // log variant in the deep left tail: P(100, 1) is around 1e-158
    const double lp = log_gamma_p(100, 1.0);
    CHECK(lp < -300.0);
    CHECK(std::exp(log_gamma_p(5, 3.0)) == doctest::Approx(gamma_p(5, 3.0)).epsilon(1e-11));
}

TEST_CASE("noncentral chi-square endpoints and far tails") {
    CHECK(noncentral_chisq_cdf(0.0, 2, 1.0) == 0.0);
    const double far = 4 + 2.5 + 40.0 * std::sqrt(2.0 * 4 + 4.0 * 2.5);
    CHECK(noncentral_chisq_cdf(far, 4, 2.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(noncentral_chisq_sf(0.0, 4, 2.5) == 1.0);
    CHECK_THROWS_AS(noncentral_chisq_cdf(1.0, 3, 1.0), std::domain_error);
    CHECK_THROWS_AS(noncentral_chisq_cdf(1.0, 4, -0.5), std::domain_error);
}

TEST_CASE("noncentral chi-square frozen oracle values") {
    // 40-digit Poisson-mixture evaluations
    CHECK(noncentral_chisq_cdf(4.0, 4, 2.5) ==
          doctest::Approx(0.32338279496702292).epsilon(1e-12));
    CHECK(noncentral_chisq_sf(4.0, 4, 2.5) ==
          doctest::Approx(1.0 - 0.32338279496702292).epsilon(1e-12));
    // central case reduces to the regularized lower gamma
    CHECK(noncentral_chisq_cdf(7.0, 6, 0.0) ==
          doctest::Approx(0.67915280113786593).epsilon(1e-10));
    CHECK(noncentral_chisq_cdf(7.0, 6, 0.0) == doctest::Approx(gamma_p(3, 3.5)).epsilon(1e-12));
}

TEST_CASE("noncentral chi-square against direct Monte Carlo") {
    // sums of squared shifted Gaussians, 1e7 samples
    const long samples = 10000000;
    const double mu = std::sqrt(2.5 / 4.0);
    long count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (long i = 0; i < samples; ++i) {
        qsfb::rng::Philox st(77, static_cast<std::uint64_t>(i));
        double s = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double z = mu + st.next_normal();
            s += z * z;
        }
        if (s <= 4.0) ++count;
    }
    const double mc = static_cast<double>(count) / samples;
    const double se = std::sqrt(mc * (1.0 - mc) / samples);
    CHECK(std::fabs(noncentral_chisq_cdf(4.0, 4, 2.5) - mc) < 3.0 * se);
}

TEST_CASE("noncentral chi-square log-CDF deep tail") {
    // frozen 40-digit values far below double underflow
    CHECK(noncentral_chisq_logcdf(200.0, 2000, 1000.0) ==
          doctest::Approx(-1858.0770244773298).epsilon(1e-8));
    CHECK(noncentral_chisq_logcdf(30.0, 400, 300.0) ==
          doctest::Approx(-475.64386625724990).epsilon(1e-8));
    for (double x : {3.0, 6.0, 15.0})
        CHECK(std::exp(noncentral_chisq_logcdf(x, 4, 2.5)) ==
              doctest::Approx(noncentral_chisq_cdf(x, 4, 2.5)).epsilon(1e-9));
}

TEST_CASE("CDF monotonicity on 1000-point grids") {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = regularized_incomplete_beta(i / 1000.0, 7.5, 2.5);
        CHECK(v >= prev);
        prev = v;
    }
    prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = noncentral_chisq_cdf(i * 0.03, 6, 4.0);
        CHECK(v >= prev);
        prev = v;
    }
    prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = gamma_p(12.0, i * 0.05);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("large degrees of freedom and noncentrality stay accurate") {
    // mean 2e4 + 1e6; probe one standard deviation below the mean
    const long dof = 40000;
    const double nc = 1e6;
    const double sd = std::sqrt(2.0 * dof + 4.0 * nc);
    const double p = noncentral_chisq_cdf(dof + nc - sd, dof, nc);
    CHECK(p > 0.1);
    CHECK(p < 0.2);
    CHECK(noncentral_chisq_cdf(dof + nc + sd, dof, nc) + noncentral_chisq_sf(dof + nc + sd, dof, nc) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("noncentral chi-square pdf and derivative") {
    // pdf against a central difference of the CDF
    for (double x : {1.0, 4.0, 9.0}) {
        const double h = 1e-5;
        const double fd =
            (noncentral_chisq_cdf(x + h, 6, 3.0) - noncentral_chisq_cdf(x - h, 6, 3.0)) /
            (2.0 * h);
        CHECK(noncentral_chisq_pdf(x, 6, 3.0) == doctest::Approx(fd).epsilon(1e-6));
    }
    // derivative against a central difference of the pdf
    for (double x : {1.5, 5.0, 12.0}) {
        const double h = 1e-6;
        const double fd =
            (noncentral_chisq_pdf(x + h, 6, 3.0) - noncentral_chisq_pdf(x - h, 6, 3.0)) /
            (2.0 * h);
        CHECK(noncentral_chisq_pdf_derivative(x, 6, 3.0) ==
              doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("gaussian Q and inverse") {
    CHECK(gaussian_q(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gaussian_q_inv(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(gaussian_q_inv(1e-3) == doctest::Approx(3.0902323061678135).epsilon(1e-12));
    // bisection oracle on gaussian_q
    {
        double lo = 0.0, hi = 8.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (gaussian_q(mid) > 1e-3)
                lo = mid;
            else
                hi = mid;
        }
        CHECK(std::fabs(gaussian_q_inv(1e-3) - 0.5 * (lo + hi)) < 1e-10);
    }
    for (double x = -8.0; x <= 8.0; x += 0.25) {
        // for x < 0 the tail mass 1 - Q(x) loses absolute resolution ~1 ulp
        // of p, which maps to ulp / pdf(x) in the abscissa
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        const double tol = 1e-10 * std::max(1.0, std::fabs(x)) +
                           (x < 0.0 ? 4.0 * 1.2e-16 / pdf : 0.0);
        CHECK(std::fabs(gaussian_q_inv(gaussian_q(x)) - x) < tol);
    }
    CHECK_THROWS_AS(gaussian_q_inv(0.0), std::domain_error);
    CHECK_THROWS_AS(gaussian_q_inv(1.0), std::domain_error);
}

TEST_CASE("accuracy target validation") {
    AccuracyTarget bad;
    bad.abs_tol = 1e-15;
    CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 2, 2, bad), std::domain_error);
    bad.abs_tol = 1e-12;
    bad.max_terms = 0;
    CHECK_THROWS_AS(gamma_p(2, 1, bad), std::domain_error);
}
