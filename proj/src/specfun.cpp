#include "qsfb/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qsfb::specfun {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kLogUnderflow = -690.0;  // below exp() range with margin

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double x, double a, double b, const AccuracyTarget& acc) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (long m = 1; m <= acc.max_terms; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) return h;
    }
    throw ConvergenceError("incomplete beta continued fraction did not converge");
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

void check_beta_args(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("incomplete beta: a, b must be positive");
    if (!(x >= 0.0) || !(x <= 1.0))
        throw std::domain_error("incomplete beta: x must be in [0,1]");
}

// log of the "direct" branch x^a (1-x)^b / (a B(a,b)) * cf, valid below the
// symmetry switch point.
double log_ibeta_direct(double x, double a, double b, const AccuracyTarget& acc) {
    const double lpre = a * std::log(x) + b * std::log1p(-x) - std::log(a) - log_beta(a, b);
    return lpre + std::log(betacf(x, a, b, acc));
}

// Series for the regularized lower incomplete gamma, x < a + 1:
//   P(a,x) = exp(a ln x - x - lgamma(a+1)) * S,  S = sum_k x^k / prod(a+1..a+k)
// Returns log S.
double log_gser_sum(double a, double x, const AccuracyTarget& acc) {
    double term = 1.0, sum = 1.0, ap = a;
    for (long k = 0; k < acc.max_terms; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (term < sum * 1e-17) return std::log(sum);
    }
    throw ConvergenceError("incomplete gamma series did not converge");
}

// Continued fraction for Q(a,x), x >= a + 1 (modified Lentz).
double gcf(double a, double x, const AccuracyTarget& acc) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (long i = 1; i <= acc.max_terms; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) {
            const double lq = a * std::log(x) - x - std::lgamma(a) + std::log(h);
            return lq < kLogUnderflow ? 0.0 : std::exp(lq);
        }
    }
    throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("incomplete gamma: a must be positive");
    if (!(x >= 0.0)) throw std::domain_error("incomplete gamma: x must be nonnegative");
}

void check_ncchisq_args(double x, long dof, double nc) {
    if (dof < 2 || dof % 2 != 0)
        throw std::domain_error("noncentral chi-square: dof must be even and >= 2");
    if (!(nc >= 0.0))
        throw std::domain_error("noncentral chi-square: noncentrality must be nonnegative");
    if (!(x >= 0.0) && !(x < 0.0))
        throw std::domain_error("noncentral chi-square: x is NaN");
}

// lgamma(n+1) - Stirling main term; series for large n avoids the huge-term
// cancellation that loses ~1e-9 relative accuracy at n ~ 1e6
double stirlerr(double n) {
    if (n < 16.0)
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n -
               0.5 * std::log(2.0 * M_PI);
    const double nn = n * n;
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * nn) / nn) / nn) / nn) / n;
}

// Poisson deviance x log(x/np) + np - x without cancellation near x = np
double bd0(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        const double v = (x - np) / (x + np);
        const double v2 = v * v;
        double s = (x - np) * v, ej = 2.0 * x * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v2;
            const double t = ej / (2.0 * j + 1.0);
            s += t;
            if (std::fabs(t) < 1e-17 * std::fabs(s)) break;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

double log_poisson_pmf(double j, double h) {
    if (j == 0.0) return -h;
    return -stirlerr(j) - bd0(j, h) - 0.5 * std::log(2.0 * M_PI * j);
}

// Beyond this the Poisson mixture needs ~sqrt(nc) terms, so switch to a
// one-term Edgeworth expansion (absolute error O(1/(dof+nc)), well under the
// mixture tolerance at the switch point)
constexpr double kLargeParams = 1e7;

double ncchisq_edgeworth(double x, long dof, double nc, bool upper) {
    const double var = 2.0 * dof + 4.0 * nc;
    const double sd = std::sqrt(var);
    const double z = (x - (dof + nc)) / sd;
    const double skew = (8.0 * dof + 24.0 * nc) / (var * sd);
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    const double corr = phi * (skew / 6.0) * (z * z - 1.0);
    const double p = upper ? 0.5 * std::erfc(z * M_SQRT1_2) + corr
                           : 0.5 * std::erfc(-z * M_SQRT1_2) - corr;
    return std::clamp(p, 0.0, 1.0);
}

// Poisson-weighted mixture of central chi-square terms, summed outward from
// the modal Poisson index.  `upper` selects Q(a,x/2) terms (survival) instead
// of P(a,x/2) terms (CDF).
double ncchisq_mixture(double x, long dof, double nc, bool upper,
                       const AccuracyTarget& acc) {
    const double a0 = 0.5 * dof;
    const double h = 0.5 * nc;
    const double x2 = 0.5 * x;

    if (h == 0.0) return upper ? gamma_q(a0, x2, acc) : gamma_p(a0, x2, acc);

    const long j0 = static_cast<long>(h);
    const double lw0 = log_poisson_pmf(static_cast<double>(j0), h);
    const double a_mid = a0 + j0;

    // P(a+1,x) = P(a,x) - d(a),  d(a) = exp(a ln x - x - lgamma(a+1)).
    auto delta = [&](double a) {
        const double ld = a * std::log(x2) - x2 - std::lgamma(a + 1.0);
        return ld < kLogUnderflow ? 0.0 : std::exp(ld);
    };

    const double p_mid = upper ? gamma_q(a_mid, x2, acc) : gamma_p(a_mid, x2, acc);
    double w = lw0 < kLogUnderflow ? 0.0 : std::exp(lw0);
    double sum = w * p_mid;
    const double tol = 0.01 * acc.abs_tol;
    // exits are relative to the running sum so the result keeps relative
    // accuracy even deep in a tail, where log-domain callers consume it
    auto cutoff = [&] { return tol * sum + 1e-320; };

    // ascending j; the dropped tail is bounded by the remaining Poisson
    // mass, itself under wj * h / (j + 1 - h) once past the mode
    {
        double wj = w, pj = p_mid, dj = delta(a_mid);
        for (long j = j0 + 1; j - j0 <= acc.max_terms; ++j) {
            wj *= h / j;
            pj += upper ? dj : -dj;
            pj = std::clamp(pj, 0.0, 1.0);
            dj *= x2 / (a0 + j);
            sum += wj * pj;
            if (j + 1 > h && wj * h / (j + 1 - h) < cutoff()) break;
        }
    }
    // descending j; remaining mass is under (j + 1) * wj
    {
        double wj = w, pj = p_mid, dj = delta(a_mid - 1.0);
        for (long j = j0 - 1; j >= 0; --j) {
            wj *= (j + 1.0) / h;
            pj += upper ? -dj : dj;
            pj = std::clamp(pj, 0.0, 1.0);
            sum += wj * pj;
            if ((j + 1.0) * wj < cutoff()) break;
            dj *= (a0 + j) / x2;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b,
                                   const AccuracyTarget& acc) {
    check_beta_args(x, a, b);
    acc.validate();
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        const double l = log_ibeta_direct(x, a, b, acc);
        return l < kLogUnderflow ? 0.0 : std::exp(l);
    }
    const double l = log_ibeta_direct(1.0 - x, b, a, acc);
    return l < kLogUnderflow ? 1.0 : 1.0 - std::exp(l);
}

double log_regularized_incomplete_beta(double x, double a, double b,
                                       const AccuracyTarget& acc) {
    check_beta_args(x, a, b);
    acc.validate();
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x == 1.0) return 0.0;
    if (x < (a + 1.0) / (a + b + 2.0))
        return log_ibeta_direct(x, a, b, acc);
    const double l = log_ibeta_direct(1.0 - x, b, a, acc);
    return l < kLogUnderflow ? -std::exp(l) : std::log1p(-std::exp(l));
}

double gamma_p(double a, double x, const AccuracyTarget& acc) {
    check_gamma_args(a, x);
    acc.validate();
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        const double l = a * std::log(x) - x - std::lgamma(a + 1.0) + log_gser_sum(a, x, acc);
        return l < kLogUnderflow ? 0.0 : std::exp(l);
    }
    return 1.0 - gcf(a, x, acc);
}

double gamma_q(double a, double x, const AccuracyTarget& acc) {
    check_gamma_args(a, x);
    acc.validate();
    if (x == 0.0) return 1.0;
    if (x >= a + 1.0) return gcf(a, x, acc);
    return 1.0 - gamma_p(a, x, acc);
}

double log_gamma_p(double a, double x, const AccuracyTarget& acc) {
    check_gamma_args(a, x);
    acc.validate();
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x < a + 1.0)
        return a * std::log(x) - x - std::lgamma(a + 1.0) + log_gser_sum(a, x, acc);
    const double q = gcf(a, x, acc);
    return q < 1e-15 ? -q : std::log1p(-q);
}

double noncentral_chisq_cdf(double x, long dof, double nc, const AccuracyTarget& acc) {
    check_ncchisq_args(x, dof, nc);
    acc.validate();
    if (x <= 0.0) return 0.0;
    const double sd = std::sqrt(2.0 * dof + 4.0 * nc);
    if (x > dof + nc + 45.0 * sd) return 1.0;
    if (dof + nc > kLargeParams) return ncchisq_edgeworth(x, dof, nc, /*upper=*/false);
    return ncchisq_mixture(x, dof, nc, /*upper=*/false, acc);
}

double noncentral_chisq_sf(double x, long dof, double nc, const AccuracyTarget& acc) {
    check_ncchisq_args(x, dof, nc);
    acc.validate();
    if (x <= 0.0) return 1.0;
    const double sd = std::sqrt(2.0 * dof + 4.0 * nc);
    if (x < dof + nc - 45.0 * sd) return 1.0;
    if (dof + nc > kLargeParams) return ncchisq_edgeworth(x, dof, nc, /*upper=*/true);
    return ncchisq_mixture(x, dof, nc, /*upper=*/true, acc);
}

double noncentral_chisq_logcdf(double x, long dof, double nc, const AccuracyTarget& acc) {
    check_ncchisq_args(x, dof, nc);
    acc.validate();
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();

    const double lin = noncentral_chisq_cdf(x, dof, nc, acc);
    if (lin > 1e-280) return std::log(lin);

    if (dof + nc > kLargeParams) {
        // Gaussian tail on the same scale as the Edgeworth branch above
        const double z = (x - (dof + nc)) / std::sqrt(2.0 * dof + 4.0 * nc);
        return -0.5 * z * z - std::log(-z * std::sqrt(2.0 * M_PI));
    }

    // Deep left tail: log-sum-exp over the Poisson mixture, each component's
    // log-CDF from the series branch of log_gamma_p.
    const double a0 = 0.5 * dof;
    const double h = 0.5 * nc;
    const double x2 = 0.5 * x;

    if (h == 0.0) return log_gamma_p(a0, x2, acc);

    // The log-term l(j) is concave in j; its increment changes sign near the
    // root of (j+1)(a0+j+1) = h*x2.
    double jpk = 0.5 * (-(a0 + 2.0) + std::sqrt((a0 - 0.0) * (a0 - 0.0) + 4.0 * h * x2));
    long jpeak = std::max(0L, static_cast<long>(jpk));

    auto lterm = [&](long j) {
        const double lw = -h + j * std::log(h) - std::lgamma(j + 1.0);
        return lw + log_gamma_p(a0 + j, x2, acc);
    };

    // local search for the true peak
    double lmax = lterm(jpeak);
    for (int it = 0; it < 200; ++it) {
        bool moved = false;
        if (jpeak > 0) {
            const double l = lterm(jpeak - 1);
            if (l > lmax) { lmax = l; --jpeak; moved = true; }
        }
        if (!moved) {
            const double l = lterm(jpeak + 1);
            if (l > lmax) { lmax = l; ++jpeak; moved = true; }
        }
        if (!moved) break;
    }

    double acc_sum = 1.0;  // term at jpeak, scaled by exp(-lmax)
    for (long j = jpeak + 1; j - jpeak <= acc.max_terms; ++j) {
        const double t = lterm(j) - lmax;
        acc_sum += std::exp(t);
        if (t < -40.0) break;
    }
    for (long j = jpeak - 1; j >= 0; --j) {
        const double t = lterm(j) - lmax;
        acc_sum += std::exp(t);
        if (t < -40.0) break;
    }
    return lmax + std::log(acc_sum);
}

double noncentral_chisq_pdf(double x, long dof, double nc, const AccuracyTarget& acc) {
    check_ncchisq_args(x, dof, nc);
    acc.validate();
    if (x < 0.0) return 0.0;
    const double a0 = 0.5 * dof;
    const double h = 0.5 * nc;
    const double x2 = 0.5 * x;

    auto gamma_pdf_half = [&](double a) {
        // (1/2) * x2^{a-1} e^{-x2} / Gamma(a), the density of chi2(2a) at x
        if (x2 == 0.0) return a == 1.0 ? 0.5 : 0.0;
        const double l = (a - 1.0) * std::log(x2) - x2 - std::lgamma(a);
        return l < kLogUnderflow ? 0.0 : 0.5 * std::exp(l);
    };

    if (h == 0.0) return gamma_pdf_half(a0);
    const long j0 = static_cast<long>(h);
    const double lw0 = log_poisson_pmf(static_cast<double>(j0), h);
    double w = lw0 < kLogUnderflow ? 0.0 : std::exp(lw0);
    double sum = w * gamma_pdf_half(a0 + j0);
    double wj = w;
    for (long j = j0 + 1; j - j0 <= acc.max_terms; ++j) {
        wj *= h / j;
        const double t = wj * gamma_pdf_half(a0 + j);
        sum += t;
        // terms are only guaranteed to decay past the component density
        // peak a ~ x2, so do not exit before it
        if (t < 0.01 * acc.abs_tol && wj < w && a0 + j > x2 + 1.0) break;
    }
    wj = w;
    // below the modal index the density factor can grow as fast as the
    // Poisson weight shrinks; sum all the way down
    for (long j = j0 - 1; j >= 0; --j) {
        wj *= (j + 1.0) / h;
        sum += wj * gamma_pdf_half(a0 + j);
    }
    return sum;
}

double noncentral_chisq_pdf_derivative(double x, long dof, double nc,
                                       const AccuracyTarget& acc) {
    check_ncchisq_args(x, dof, nc);
    acc.validate();
    if (x < 0.0) return 0.0;
    const double a0 = 0.5 * dof;
    const double h = 0.5 * nc;
    const double x2 = 0.5 * x;

    // d/dx of the chi2(2a) density at x: (1/4) g_a'(x2) with
    // g_a(y) = y^{a-1} e^{-y} / Gamma(a).
    auto dpdf_half = [&](double a) {
        if (x2 == 0.0) {
            if (a == 1.0) return -0.25;
            if (a == 2.0) return 0.25;
            return 0.0;
        }
        const double l = (a - 1.0) * std::log(x2) - x2 - std::lgamma(a);
        if (l < kLogUnderflow) return 0.0;
        return 0.25 * std::exp(l) * ((a - 1.0) / x2 - 1.0);
    };

    if (h == 0.0) return dpdf_half(a0);
    const long j0 = static_cast<long>(h);
    const double lw0 = log_poisson_pmf(static_cast<double>(j0), h);
    double w = lw0 < kLogUnderflow ? 0.0 : std::exp(lw0);
    double sum = w * dpdf_half(a0 + j0);
    double wj = w;
    for (long j = j0 + 1; j - j0 <= acc.max_terms; ++j) {
        wj *= h / j;
        const double t = wj * dpdf_half(a0 + j);
        sum += t;
        // the summand vanishes at the component density peak and only
        // decays reliably beyond it
        if (std::fabs(t) < 0.01 * acc.abs_tol && wj < w && a0 + j > x2 + 2.0) break;
    }
    wj = w;
    for (long j = j0 - 1; j >= 0; --j) {
        wj *= (j + 1.0) / h;
        sum += wj * dpdf_half(a0 + j);
    }
    return sum;
}

double gaussian_q(double x) {
    return 0.5 * std::erfc(x * M_SQRT1_2);
}

double gaussian_q_inv(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::domain_error("gaussian_q_inv: p must be in (0,1)");

    // Work on p <= 1/2 so the Newton residual gaussian_q(x) - p never
    // cancels near 1; 1 - p is exact for p in [1/2, 1)
    if (p > 0.5) return -gaussian_q_inv(1.0 - p);

    // Acklam's rational approximation for the normal quantile, then two
    // Newton corrections against gaussian_q.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double z;  // Phi^{-1}(p), nonpositive here
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5, rr = q * q;
        z = (((((a[0] * rr + a[1]) * rr + a[2]) * rr + a[3]) * rr + a[4]) * rr + a[5]) * q /
            (((((b[0] * rr + b[1]) * rr + b[2]) * rr + b[3]) * rr + b[4]) * rr + 1.0);
    }
    double x = -z;  // Q^{-1}(p) = -Phi^{-1}(p)
    for (int i = 0; i < 3; ++i) {
        const double err = gaussian_q(x) - p;
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        if (pdf <= 0.0) break;
        x += err / pdf;
    }
    return x;
}

}  // namespace qsfb::specfun
