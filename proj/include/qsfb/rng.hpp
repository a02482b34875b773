#pragma once

#include <cmath>
#include <cstdint>

// Counter-based RNG (Philox4x32, 10 rounds).  Every Monte Carlo sample owns
// its own stream, so estimates are bit-identical for any thread count and
// any scheduling of the sample loop.

namespace qsfb::rng {

class Philox {
  public:
    Philox(std::uint64_t seed, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          s0_(static_cast<std::uint32_t>(stream)),
          s1_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint32_t next_u32() {
        if (idx_ == 4) {
            fill();
            idx_ = 0;
        }
        return out_[idx_++];
    }

    // uniform on (0,1), never exactly 0 or 1
    double next_uniform() { return (next_u32() + 0.5) * 0x1p-32; }

    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    double next_exponential() { return -std::log(next_uniform()); }

    // Marsaglia-Tsang squeeze; requires shape >= 1
    double next_gamma(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = next_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    void fill() {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = s0_;
        std::uint32_t c3 = s1_;
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = 0xD2511F53ULL * c0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
            const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
            const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
            const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_[0] = c0;
        out_[1] = c1;
        out_[2] = c2;
        out_[3] = c3;
        ++block_;
    }

    std::uint32_t key0_, key1_, s0_, s1_;
    std::uint64_t block_ = 0;
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int idx_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace qsfb::rng
