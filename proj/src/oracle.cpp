#include "qsfb/oracle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qsfb/rng.hpp"

namespace qsfb::oracle {

namespace {

using cx = std::complex<double>;

McEstimate indicator_estimate(long count, const McConfig& mc) {
    McEstimate est;
    est.samples = mc.samples;
    est.seed = mc.seed;
    est.mean = static_cast<double>(count) / static_cast<double>(mc.samples);
    est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(mc.samples));
    return est;
}

// information statistic, straight from its definition
double draw_llr(const stats::ChannelSpec& spec, long n, rng::Philox& st) {
    const double s = std::sqrt(0.5);
    const double g = spec.gain->sample(st);
    const double rg = spec.snr * g;
    const double a = std::sqrt(rg);
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        const double zr = s * st.next_normal();
        const double zi = s * st.next_normal();
        const double dr = a * zr - 1.0;
        const double di = a * zi;
        acc += 1.0 - (dr * dr + di * di) / (1.0 + rg);
    }
    return n * std::log1p(rg) + acc;
}

// auxiliary-channel statistic
double draw_aux_llr(const stats::ChannelSpec& spec, long n, rng::Philox& st) {
    const double s = std::sqrt(0.5);
    const double g = spec.gain->sample(st);
    const double rg = spec.snr * g;
    const double a = std::sqrt(rg);
    const double b = std::sqrt(1.0 + rg);
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        const double zr = s * st.next_normal();
        const double zi = s * st.next_normal();
        const double dr = a * zr - b;
        const double di = a * zi;
        acc += 1.0 - (dr * dr + di * di);
    }
    return n * std::log1p(rg) + acc;
}

// projection statistic passes iff sum |(1-g01) Z - g01 sqrt(G rho)|^2 <= n g01 G rho
bool draw_angle_proj_pass(const stats::ChannelSpec& spec, long n, double gamma01,
                          rng::Philox& st) {
    const double s = std::sqrt(0.5);
    const double g = spec.gain->sample(st);
    const double c = gamma01 * std::sqrt(g * spec.snr);
    const double w = 1.0 - gamma01;
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        const double zr = s * st.next_normal();
        const double zi = s * st.next_normal();
        const double dr = w * zr - c;
        const double di = w * zi;
        acc += dr * dr + di * di;
    }
    return acc <= n * gamma01 * g * spec.snr;
}

// two-pass modified Gram-Schmidt; returns the number of kept columns
int orthonormalize(std::vector<cx>& y, long n, int r) {
    int kept = 0;
    for (int j = 0; j < r; ++j) {
        cx* col = y.data() + static_cast<long>(j) * n;
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < kept; ++k) {
                const cx* qk = y.data() + static_cast<long>(k) * n;
                cx dot(0.0, 0.0);
                for (long i = 0; i < n; ++i) dot += std::conj(qk[i]) * col[i];
                for (long i = 0; i < n; ++i) col[i] -= dot * qk[i];
            }
        }
        double norm = 0.0;
        for (long i = 0; i < n; ++i) norm += std::norm(col[i]);
        norm = std::sqrt(norm);
        if (norm < 1e-12) return -1;  // rank deficient, discard the sample
        for (long i = 0; i < n; ++i) col[i] /= norm;
        if (j != kept) {
            cx* dst = y.data() + static_cast<long>(kept) * n;
            for (long i = 0; i < n; ++i) dst[i] = col[i];
        }
        ++kept;
    }
    return kept;
}

// cos^2 of the angle between the all-ones transmit direction and the span
// of the receive matrix built from gain g (branch vector rotated onto the
// first coordinate, which leaves the angle law unchanged)
double draw_cos2_exact(double rho, double g, long n, int r, rng::Philox& st,
                       std::vector<cx>& scratch) {
    const double s = std::sqrt(0.5);
    scratch.assign(static_cast<long>(n) * r, cx(0.0, 0.0));
    const double x0 = std::sqrt(rho);  // per-entry transmit amplitude
    const double h1 = std::sqrt(g);
    for (int j = 0; j < r; ++j) {
        cx* col = scratch.data() + static_cast<long>(j) * n;
        const double mean = j == 0 ? x0 * h1 : 0.0;
        for (long i = 0; i < n; ++i)
            col[i] = cx(mean + s * st.next_normal(), s * st.next_normal());
    }
    const int kept = orthonormalize(scratch, n, r);
    if (kept < 0) return -1.0;
    double cos2 = 0.0;
    for (int j = 0; j < kept; ++j) {
        const cx* qj = scratch.data() + static_cast<long>(j) * n;
        cx dot(0.0, 0.0);
        for (long i = 0; i < n; ++i) dot += std::conj(qj[i]);  // inner product with 1-vector
        cos2 += std::norm(dot);
    }
    return cos2 / static_cast<double>(n);  // x0 amplitude cancels
}

template <typename PerSample>
long count_parallel(long samples, const PerSample& pass) {
    long count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (long i = 0; i < samples; ++i)
        if (pass(i)) ++count;
    return count;
}

}  // namespace

void McConfig::validate() const {
    if (samples < 1000) throw std::domain_error("McConfig: samples must be >= 1000");
}

McEstimate mc_prob_llr_below(const stats::ChannelSpec& spec, long n, double gamma,
                             const McConfig& mc) {
    spec.validate();
    mc.validate();
    if (n < 1) throw std::domain_error("mc_prob_llr_below: n must be >= 1");
    const double thr = n * gamma;
    const long count = count_parallel(mc.samples, [&](long i) {
        rng::Philox st(mc.seed, static_cast<std::uint64_t>(i));
        return draw_llr(spec, n, st) <= thr;
    });
    return indicator_estimate(count, mc);
}

McEstimate mc_prob_llr_below_ref(const stats::ChannelSpec& spec, long n,
                                 double gamma, const McConfig& mc) {
    spec.validate();
    mc.validate();
    if (n < 1) throw std::domain_error("mc_prob_llr_below_ref: n must be >= 1");
    const double thr = n * gamma;
    long count = 0;
    for (long i = 0; i < mc.samples; ++i) {
        rng::Philox st(mc.seed, static_cast<std::uint64_t>(i));
        if (draw_llr(spec, n, st) <= thr) ++count;
    }
    return indicator_estimate(count, mc);
}

McEstimate mc_prob_aux_llr_above(const stats::ChannelSpec& spec, long n,
                                 double gamma, const McConfig& mc) {
    spec.validate();
    mc.validate();
    if (n < 1) throw std::domain_error("mc_prob_aux_llr_above: n must be >= 1");
    const double thr = n * gamma;
    const long count = count_parallel(mc.samples, [&](long i) {
        rng::Philox st(mc.seed, static_cast<std::uint64_t>(i));
        return draw_aux_llr(spec, n, st) >= thr;
    });
    return indicator_estimate(count, mc);
}

McEstimate mc_prob_angle_proj(const stats::ChannelSpec& spec, long n,
                              double gamma01, const McConfig& mc) {
    spec.validate();
    mc.validate();
    if (n <= spec.num_rx) throw std::domain_error("mc_prob_angle_proj: requires n > num_rx");
    const long count = count_parallel(mc.samples, [&](long i) {
        rng::Philox st(mc.seed, static_cast<std::uint64_t>(i));
        return draw_angle_proj_pass(spec, n, gamma01, st);
    });
    return indicator_estimate(count, mc);
}

McEstimate mc_prob_angle_proj_ref(const stats::ChannelSpec& spec, long n,
                                  double gamma01, const McConfig& mc) {
    spec.validate();
    mc.validate();
    if (n <= spec.num_rx)
        throw std::domain_error("mc_prob_angle_proj_ref: requires n > num_rx");
    long count = 0;
    for (long i = 0; i < mc.samples; ++i) {
        rng::Philox st(mc.seed, static_cast<std::uint64_t>(i));
        if (draw_angle_proj_pass(spec, n, gamma01, st)) ++count;
    }
    return indicator_estimate(count, mc);
}

McEstimate mc_prob_angle_exact(const stats::ChannelSpec& spec, long n,
                               double gamma01, const McConfig& mc) {
    spec.validate();
    mc.validate();
    if (n <= spec.num_rx) throw std::domain_error("mc_prob_angle_exact: requires n > num_rx");
    const double thr = 1.0 - gamma01;
    const double rho = spec.snr;
    const int r = spec.num_rx;
    long count = 0;
#pragma omp parallel reduction(+ : count)
    {
        std::vector<cx> scratch;
#pragma omp for schedule(static)
        for (long i = 0; i < mc.samples; ++i) {
            rng::Philox st(mc.seed, static_cast<std::uint64_t>(i));
            const double g = spec.gain->sample(st);
            if (draw_cos2_exact(rho, g, n, r, st, scratch) >= thr) ++count;
        }
    }
    return indicator_estimate(count, mc);
}

GridEstimates mc_statistic_grid(const stats::ChannelSpec& spec, long n,
                                const std::vector<double>& gammas_nats,
                                const std::vector<double>& gammas01,
                                const McConfig& mc) {
    spec.validate();
    mc.validate();
    if (n <= spec.num_rx) throw std::domain_error("mc_statistic_grid: requires n > num_rx");
    const size_t kn = gammas_nats.size(), ka = gammas01.size();
    std::vector<long> c_llr(kn, 0), c_aux(kn, 0), c_ang(ka, 0);
    const double s = std::sqrt(0.5);

#pragma omp parallel
    {
        std::vector<long> l_llr(kn, 0), l_aux(kn, 0), l_ang(ka, 0);
#pragma omp for schedule(static)
        for (long i = 0; i < mc.samples; ++i) {
            rng::Philox st(mc.seed, static_cast<std::uint64_t>(i));
            const double g = spec.gain->sample(st);
            const double rg = spec.snr * g;
            // sufficient statistics of the noise draw: total energy and
            // in-phase sum
            double t1 = 0.0, t2 = 0.0;
            for (long j = 0; j < n; ++j) {
                const double zr = s * st.next_normal();
                const double zi = s * st.next_normal();
                t1 += zr * zr + zi * zi;
                t2 += zr;
            }
            const double logterm = n * std::log1p(rg);
            const double sq = std::sqrt(rg);
            const double llr = logterm + n - (rg * t1 - 2.0 * sq * t2 + n) / (1.0 + rg);
            const double aux =
                logterm + n - (rg * t1 - 2.0 * std::sqrt(rg * (1.0 + rg)) * t2 + n * (1.0 + rg));
            for (size_t k = 0; k < kn; ++k) {
                if (llr <= n * gammas_nats[k]) ++l_llr[k];
                if (aux >= n * gammas_nats[k]) ++l_aux[k];
            }
            const double sgr = std::sqrt(g * spec.snr);
            for (size_t k = 0; k < ka; ++k) {
                const double gm = gammas01[k];
                const double w = 1.0 - gm;
                const double stat =
                    w * w * t1 - 2.0 * w * gm * sgr * t2 + n * gm * gm * g * spec.snr;
                if (stat <= n * gm * g * spec.snr) ++l_ang[k];
            }
        }
#pragma omp critical
        {
            for (size_t k = 0; k < kn; ++k) {
                c_llr[k] += l_llr[k];
                c_aux[k] += l_aux[k];
            }
            for (size_t k = 0; k < ka; ++k) c_ang[k] += l_ang[k];
        }
    }

    GridEstimates out;
    for (size_t k = 0; k < kn; ++k) {
        out.llr_below.push_back(indicator_estimate(c_llr[k], mc));
        out.aux_llr_above.push_back(indicator_estimate(c_aux[k], mc));
    }
    for (size_t k = 0; k < ka; ++k) out.angle_proj.push_back(indicator_estimate(c_ang[k], mc));
    return out;
}

McEstimate mc_null_angle_test(long n, int num_rx, double gamma01, const McConfig& mc) {
    mc.validate();
    if (n <= num_rx || num_rx < 1)
        throw std::domain_error("mc_null_angle_test: requires n > num_rx >= 1");
    const double thr = 1.0 - gamma01;
    long count = 0;
#pragma omp parallel reduction(+ : count)
    {
        std::vector<cx> scratch;
#pragma omp for schedule(static)
        for (long i = 0; i < mc.samples; ++i) {
            rng::Philox st(mc.seed, static_cast<std::uint64_t>(i));
            if (draw_cos2_exact(1.0, 0.0, n, num_rx, st, scratch) >= thr) ++count;
        }
    }
    return indicator_estimate(count, mc);
}

std::vector<double> mc_null_angle_samples(long n, int num_rx, long samples,
                                          std::uint64_t seed) {
    if (n <= num_rx || num_rx < 1)
        throw std::domain_error("mc_null_angle_samples: requires n > num_rx >= 1");
    if (samples < 1) throw std::domain_error("mc_null_angle_samples: samples must be >= 1");
    std::vector<double> out(samples);
#pragma omp parallel
    {
        std::vector<cx> scratch;
#pragma omp for schedule(static)
        for (long i = 0; i < samples; ++i) {
            rng::Philox st(seed, static_cast<std::uint64_t>(i));
            out[i] = draw_cos2_exact(1.0, 0.0, n, num_rx, st, scratch);
        }
    }
    return out;
}

}  // namespace qsfb::oracle
