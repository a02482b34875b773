#include "qsfb/fading.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qsfb/specfun.hpp"

namespace qsfb::fading {

RicianSimoGain::RicianSimoGain(double k_factor, int num_rx, double branch_power)
    : k_(k_factor), b_(branch_power), r_(num_rx) {
    if (!(k_ >= 0.0)) throw std::domain_error("RicianSimoGain: k_factor must be >= 0");
    if (r_ < 1) throw std::domain_error("RicianSimoGain: num_rx must be >= 1");
    if (!(b_ > 0.0)) throw std::domain_error("RicianSimoGain: branch_power must be > 0");

    dof_ = 2L * r_;
    nc_ = 2.0 * r_ * k_;
    // each branch is |CN(mu, v)|^2 with mu = sqrt(k b/(k+1)), v = b/(k+1);
    // dividing by v/2 gives a noncentral chi-square with 2r dof
    scale_ = 2.0 * (k_ + 1.0) / b_;

    double hi = (dof_ + nc_ + 10.0 + 45.0 * std::sqrt(2.0 * dof_ + 4.0 * nc_)) / scale_;
    while (specfun::noncentral_chisq_sf(scale_ * hi, dof_, nc_) > 1e-15) hi *= 1.5;
    hi_ = hi;

    const int cells = 2048;
    grid_step_ = hi_ / cells;
    cdf_table_.resize(cells + 1);
    cdf_table_[0] = 0.0;
    for (int i = 1; i <= cells; ++i)
        cdf_table_[i] = specfun::noncentral_chisq_cdf(scale_ * i * grid_step_, dof_, nc_);
}

double RicianSimoGain::pdf(double g) const {
    if (g < 0.0) throw std::domain_error("RicianSimoGain::pdf: g must be >= 0");
    return scale_ * specfun::noncentral_chisq_pdf(scale_ * g, dof_, nc_);
}

double RicianSimoGain::pdf_derivative(double g) const {
    if (!(g > 0.0)) throw std::domain_error("RicianSimoGain::pdf_derivative: g must be > 0");
    return scale_ * scale_ * specfun::noncentral_chisq_pdf_derivative(scale_ * g, dof_, nc_);
}

double RicianSimoGain::cdf(double g) const {
    if (g < 0.0) throw std::domain_error("RicianSimoGain::cdf: g must be >= 0");
    return specfun::noncentral_chisq_cdf(scale_ * g, dof_, nc_);
}

double RicianSimoGain::quantile(double p) const {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::domain_error("RicianSimoGain::quantile: p must be in (0,1)");

    // bracket from the precomputed table, then safeguarded Newton
    auto it = std::lower_bound(cdf_table_.begin(), cdf_table_.end(), p);
    double lo, hi;
    if (it == cdf_table_.end()) {
        lo = hi_;
        hi = hi_;
        while (cdf(hi) < p) {
            lo = hi;
            hi *= 1.5;
        }
    } else {
        const long idx = it - cdf_table_.begin();
        lo = (idx > 0 ? idx - 1 : 0) * grid_step_;
        hi = idx * grid_step_;
        if (hi == 0.0) hi = grid_step_;
    }

    double g = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double err = cdf(g) - p;
        if (err > 0.0)
            hi = g;
        else
            lo = g;
        if (std::fabs(err) < 1e-13 * std::max(p, 1e-3)) break;
        const double d = pdf(g);
        double next = d > 0.0 ? g - err / d : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - g) < 1e-15 * (1.0 + g)) {
            g = next;
            break;
        }
        g = next;
    }
    return g;
}

double RicianSimoGain::sample(rng::Philox& stream) const {
    const double mu = std::sqrt(k_ * b_ / (k_ + 1.0));
    const double s = std::sqrt(0.5 * b_ / (k_ + 1.0));  // per real dimension
    double g = 0.0;
    for (int i = 0; i < r_; ++i) {
        const double re = mu + s * stream.next_normal();
        const double im = s * stream.next_normal();
        g += re * re + im * im;
    }
    return g;
}

DegenerateGain::DegenerateGain(double g0) : g0_(g0) {
    if (!(g0 > 0.0)) throw std::domain_error("DegenerateGain: gain must be > 0");
}

double DegenerateGain::pdf(double) const {
    throw std::logic_error("DegenerateGain has no density");
}

double DegenerateGain::pdf_derivative(double) const {
    throw std::logic_error("DegenerateGain has no density");
}

}  // namespace qsfb::fading
