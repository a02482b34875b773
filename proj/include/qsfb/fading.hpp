#pragma once

#include <vector>

#include "qsfb/rng.hpp"

// Law of the total channel gain G, the squared norm of the receive-branch
// coefficient vector.  Everything the bounds integrate against comes from
// this interface: density, its derivative, CDF, quantile, sampling.

namespace qsfb::fading {

class GainDistribution {
  public:
    virtual ~GainDistribution() = default;
    virtual double pdf(double g) const = 0;
    virtual double pdf_derivative(double g) const = 0;
    virtual double cdf(double g) const = 0;
    virtual double quantile(double p) const = 0;
    virtual double sample(rng::Philox& stream) const = 0;
    virtual double mean() const = 0;
    // g beyond which the upper tail mass is negligible (< 1e-15)
    virtual double upper_range() const = 0;
};

// G = sum of r independent branch gains |H_i|^2 with Rician branches:
// H_i complex Gaussian around a line-of-sight mean, E|H_i|^2 = branch_power.
// Equivalently a scaled noncentral chi-square with 2r degrees of freedom.
class RicianSimoGain final : public GainDistribution {
  public:
    RicianSimoGain(double k_factor, int num_rx, double branch_power = 1.0);

    double pdf(double g) const override;
    double pdf_derivative(double g) const override;
    double cdf(double g) const override;
    double quantile(double p) const override;
    double sample(rng::Philox& stream) const override;
    double mean() const override { return r_ * b_; }
    double upper_range() const override { return hi_; }

    double k_factor() const { return k_; }
    int num_rx() const { return r_; }
    double branch_power() const { return b_; }

  private:
    double k_, b_;
    int r_;
    long dof_;
    double scale_;  // G = X / scale_ with X noncentral chi-square
    double nc_;
    double hi_;
    double grid_step_;
    std::vector<double> cdf_table_;  // seeds the quantile root-find
};

// Point mass at a fixed gain; turns every bound into its AWGN-like
// conditional form.  Used for cross-checks only, so no density.
class DegenerateGain final : public GainDistribution {
  public:
    explicit DegenerateGain(double g0);
    double pdf(double g) const override;
    double pdf_derivative(double g) const override;
    double cdf(double g) const override { return g >= g0_ ? 1.0 : 0.0; }
    double quantile(double) const override { return g0_; }
    double sample(rng::Philox&) const override { return g0_; }
    double mean() const override { return g0_; }
    double upper_range() const override { return g0_; }

  private:
    double g0_;
};

}  // namespace qsfb::fading
