#pragma once

#include <functional>
#include <vector>

#include "qsfb/fading.hpp"

// Expectation over the gain law by Gauss-Legendre quadrature on the
// probability scale u = F_G(g).  The integrand is evaluated at quantile
// nodes, so the rule never touches g = 0 and mass is equidistributed.
// A panel split at a caller-supplied gain isolates the sharp transition
// of the conditional probabilities; the order doubles until two
// successive rules agree.

namespace qsfb::quadrature {

// nodes and weights on (-1, 1)
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

struct QuadControl {
    int initial_order = 24;
    int max_order = 3072;
    double tol = 1e-10;      // absolute tolerance, linear scale
    double log_tol = 1e-8;   // absolute tolerance in the log of the integral

    void validate() const;
};

// E[f(G)]; pass split_g <= 0 to integrate on a single panel
double expect_gain(const fading::GainDistribution& dist, double split_g,
                   const std::function<double(double)>& f, const QuadControl& ctl);

// log E[exp(log_f(G))], accumulated by log-sum-exp so the expectation
// survives integrands far below the smallest normal double
double log_expect_gain(const fading::GainDistribution& dist, double split_g,
                       const std::function<double(double)>& log_f, const QuadControl& ctl);

}  // namespace qsfb::quadrature
