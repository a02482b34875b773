#pragma once

#include <stdexcept>

// Scalar special-function kernels used by every bound: regularized incomplete
// beta and gamma functions, the noncentral chi-square CDF (with a log-domain
// left tail that survives probabilities far below DBL_MIN), and the Gaussian
// Q-function with its inverse.  All functions are pure and thread-safe.

namespace qsfb::specfun {

struct AccuracyTarget {
    double abs_tol = 1e-12;
    long max_terms = 1000000;

    void validate() const {
        if (!(abs_tol > 0.0) || abs_tol < 1e-14)
            throw std::domain_error("AccuracyTarget: abs_tol must be in [1e-14, inf)");
        if (max_terms < 1)
            throw std::domain_error("AccuracyTarget: max_terms must be >= 1");
    }
};

class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Beta(a,b) CDF at x.
double regularized_incomplete_beta(double x, double a, double b,
                                   const AccuracyTarget& acc = {});

// log of the Beta(a,b) CDF; finite even when the CDF underflows.
double log_regularized_incomplete_beta(double x, double a, double b,
                                       const AccuracyTarget& acc = {});

// Regularized lower/upper incomplete gamma P(a,x), Q(a,x).
double gamma_p(double a, double x, const AccuracyTarget& acc = {});
double gamma_q(double a, double x, const AccuracyTarget& acc = {});
double log_gamma_p(double a, double x, const AccuracyTarget& acc = {});

// Noncentral chi-square CDF / survival / log-CDF, dof even and >= 2.
// Stable for dof up to ~4e4 and noncentrality up to ~1e6 and beyond.
double noncentral_chisq_cdf(double x, long dof, double noncentrality,
                            const AccuracyTarget& acc = {});
double noncentral_chisq_sf(double x, long dof, double noncentrality,
                           const AccuracyTarget& acc = {});
double noncentral_chisq_logcdf(double x, long dof, double noncentrality,
                               const AccuracyTarget& acc = {});

// Noncentral chi-square pdf and its derivative in x.
double noncentral_chisq_pdf(double x, long dof, double noncentrality,
                            const AccuracyTarget& acc = {});
double noncentral_chisq_pdf_derivative(double x, long dof, double noncentrality,
                                       const AccuracyTarget& acc = {});

double gaussian_q(double x);
double gaussian_q_inv(double p);

}  // namespace qsfb::specfun
