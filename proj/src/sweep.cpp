#include "qsfb/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qsfb/asymptotics.hpp"
#include "qsfb/oracle.hpp"
#include "qsfb/specfun.hpp"

namespace qsfb::sweep {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double interp_crossing(double n0, double r0, double n1, double r1, double level) {
    if (r1 == r0) return n1;
    return n0 + (level - r0) * (n1 - n0) / (r1 - r0);
}

}  // namespace

void RunConfig::validate() const {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("config: epsilon must be in (0,1)");
    if (num_rx < 1) throw std::invalid_argument("config: rx must be >= 1");
    if (n_min < num_rx + 1)
        throw std::invalid_argument("config: n-min must be >= rx + 1");
    if (n_max < n_min) throw std::invalid_argument("config: n-max must be >= n-min");
    if (n_points < 1) throw std::invalid_argument("config: n-points must be >= 1");
    if (tau > 0.0 && tau >= epsilon)
        throw std::invalid_argument("config: tau must be below epsilon");
    if (mc_samples < 10000)
        throw std::invalid_argument("config: mc-samples must be >= 10000");
    if (quad_nodes < 2) throw std::invalid_argument("config: quad-nodes must be >= 2");
    if (kinds.empty()) throw std::invalid_argument("config: no bounds selected");
    if (output_path.empty()) throw std::invalid_argument("config: output path empty");
}

stats::ChannelSpec RunConfig::channel() const {
    stats::ChannelSpec spec;
    spec.snr = std::pow(10.0, snr_db / 10.0);
    spec.num_rx = num_rx;
    spec.gain = std::make_shared<fading::RicianSimoGain>(
        std::pow(10.0, k_factor_db / 10.0), num_rx);
    return spec;
}

stats::NumericsConfig RunConfig::numerics() const {
    stats::NumericsConfig cfg;
    cfg.quad.initial_order = quad_nodes;
    cfg.mc_samples = mc_samples;
    cfg.seed = seed;
    return cfg;
}

std::vector<long> blocklength_grid(long n_min, long n_max, int n_points) {
    std::vector<long> grid;
    if (n_points == 1 || n_min == n_max) {
        grid.push_back(n_min);
        return grid;
    }
    const double la = std::log(static_cast<double>(n_min));
    const double lb = std::log(static_cast<double>(n_max));
    for (int i = 0; i < n_points; ++i) {
        const double t = la + (lb - la) * i / (n_points - 1);
        grid.push_back(std::lround(std::exp(t)));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

std::string render_csv(const RunConfig& config,
                       const std::vector<bounds::BoundPoint>& points,
                       const std::vector<double>& runtimes_ms) {
    std::ostringstream out;
    out << "n,bound,rate_bits,gamma,residual,runtime_ms,status\n";
    for (size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const double rt = config.timing && i < runtimes_ms.size() ? runtimes_ms[i] : 0.0;
        out << p.blocklength << ',' << bounds::bound_kind_name(p.kind) << ','
            << fmt(p.rate_bits) << ',' << fmt(p.gamma) << ',' << fmt(p.residual) << ','
            << fmt(rt) << ',' << p.status << '\n';
    }
    return out.str();
}

SweepSummary run_sweep(const RunConfig& config, std::ostream& out) {
    config.validate();
    const auto spec = config.channel();
    const auto cfg = config.numerics();

    SweepSummary summary;
    summary.c_eps_bits = bounds::outage_capacity_bits(spec, config.epsilon, cfg);

    const auto grid = blocklength_grid(config.n_min, config.n_max, config.n_points);
    std::vector<bounds::BoundPoint> points;
    std::vector<double> runtimes;

    auto has_kind = [&](bounds::BoundKind k) {
        return std::find(config.kinds.begin(), config.kinds.end(), k) != config.kinds.end();
    };

    if (has_kind(bounds::BoundKind::OutageCapacity)) {
        bounds::BoundPoint p;
        p.kind = bounds::BoundKind::OutageCapacity;
        p.blocklength = 0;  // independent of blocklength
        p.rate_bits = summary.c_eps_bits;
        points.push_back(p);
        runtimes.push_back(0.0);
    }

    for (long n : grid) {
        for (auto kind : config.kinds) {
            if (kind == bounds::BoundKind::OutageCapacity) continue;
            const auto t0 = std::chrono::steady_clock::now();
            bounds::BoundPoint p;
            try {
                switch (kind) {
                    case bounds::BoundKind::ConverseCsirt:
                        // statistics at n + 1 so the row covers blocklength n
                        p = bounds::converse_csirt(spec, n + 1, config.epsilon, cfg);
                        break;
                    case bounds::BoundKind::AchievabilityNoCsi:
                        p = bounds::achievability_nocsi(spec, n, config.epsilon,
                                                        config.tau, config.angle_mode, cfg);
                        break;
                    case bounds::BoundKind::AchievabilityCsir:
                        p = bounds::achievability_csir(spec, n, config.epsilon, config.tau,
                                                       cfg);
                        break;
                    case bounds::BoundKind::NormalAwgn:
                        p.kind = bounds::BoundKind::NormalAwgn;
                        p.blocklength = n;
                        p.rate_bits = bounds::normal_approx_awgn_bits(spec.snr, n,
                                                                      config.epsilon);
                        break;
                    default:
                        continue;
                }
            } catch (const std::exception& e) {
                p.kind = kind;
                p.blocklength = n;
                p.rate_bits = std::numeric_limits<double>::quiet_NaN();
                p.status = std::string("error:") + e.what();
            }
            const auto t1 = std::chrono::steady_clock::now();
            points.push_back(p);
            runtimes.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
    }

    std::ofstream file(config.output_path, std::ios::binary);
    if (!file) throw std::runtime_error("run_sweep: cannot open " + config.output_path);
    file << render_csv(config, points, runtimes);
    file.close();

    // 90% crossings per curve
    const double level = 0.9 * summary.c_eps_bits;
    for (auto kind : config.kinds) {
        if (kind == bounds::BoundKind::OutageCapacity) continue;
        double prev_n = -1.0, prev_r = 0.0, crossing = -1.0;
        for (const auto& p : points) {
            if (p.kind != kind || p.status.rfind("error", 0) == 0 || std::isnan(p.rate_bits))
                continue;
            if (p.rate_bits >= level) {
                crossing = prev_n < 0.0
                               ? static_cast<double>(p.blocklength)
                               : interp_crossing(prev_n, prev_r,
                                                 static_cast<double>(p.blocklength),
                                                 p.rate_bits, level);
                break;
            }
            prev_n = static_cast<double>(p.blocklength);
            prev_r = p.rate_bits;
        }
        if (crossing >= 0.0) summary.crossing90[bounds::bound_kind_name(kind)] = crossing;
    }

    summary.points = std::move(points);

    out << "C_eps_bits = " << fmt(summary.c_eps_bits) << '\n';
    for (auto kind : config.kinds) {
        if (kind == bounds::BoundKind::OutageCapacity) continue;
        const std::string name = bounds::bound_kind_name(kind);
        auto it = summary.crossing90.find(name);
        out << name << " 90%-crossing n = "
            << (it == summary.crossing90.end() ? std::string("none") : fmt(it->second))
            << '\n';
    }
    out << "wrote " << config.output_path << " (" << summary.points.size() << " rows)\n";
    return summary;
}

bool VerifyReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

VerifyReport run_verify(const RunConfig& config, std::ostream& out) {
    config.validate();
    const auto spec = config.channel();
    const auto cfg = config.numerics();
    VerifyReport rep;

    auto add = [&](const std::string& name, double measured, double tolerance) {
        VerifyReport::Check c{name, measured, tolerance, measured <= tolerance};
        out << (c.pass ? "PASS " : "FAIL ") << name << ": measured " << fmt(measured)
            << " tolerance " << fmt(tolerance) << '\n';
        rep.checks.push_back(c);
    };

    const auto& gain = *spec.gain;

    // gain density normalization by Simpson quadrature
    {
        const long m = 20000;
        const double hi = gain.upper_range();
        const double h = hi / m;
        double s = gain.pdf(0.0) + gain.pdf(hi);
        for (long i = 1; i < m; ++i) s += gain.pdf(i * h) * (i % 2 ? 4.0 : 2.0);
        add("gain-pdf-normalization", std::fabs(s * h / 3.0 - 1.0), 1e-8);
    }

    // quantile round trip
    {
        double worst = 0.0;
        for (double p : {1e-6, 1e-4, 1e-2, 0.1, 0.5, 0.9, 0.99, 1.0 - 1e-6})
            worst = std::max(worst, std::fabs(gain.cdf(gain.quantile(p)) - p));
        add("gain-quantile-roundtrip", worst, 1e-9);
    }

    // semi-analytic vs Monte Carlo twins at a small operating grid
    {
        const long n = 20;
        const double c = std::log1p(spec.snr * gain.quantile(config.epsilon));
        std::vector<double> gnats = {c - 0.1, c, c + 0.1};
        std::vector<double> g01;
        for (double g : gnats) g01.push_back(std::exp(-g));
        oracle::McConfig mc{config.mc_samples, config.seed};
        const auto grid = oracle::mc_statistic_grid(spec, n, gnats, g01, mc);
        // error scale from the semi-analytic value as well as the empirical
        // one, so a zero-count estimate of a tiny probability is not treated
        // as infinitely precise
        const double ns = static_cast<double>(config.mc_samples);
        auto sigmas = [&](double sa, const oracle::McEstimate& est) {
            const double se =
                std::max({est.std_error, std::sqrt(sa * (1.0 - sa) / ns), 1e-12});
            return std::fabs(sa - est.mean) / se;
        };
        double w_llr = 0.0, w_aux = 0.0, w_ang = 0.0;
        for (size_t k = 0; k < gnats.size(); ++k) {
            const double sa = stats::prob_llr_below(spec, n, gnats[k], cfg);
            w_llr = std::max(w_llr, sigmas(sa, grid.llr_below[k]));
            const double la = stats::log_prob_aux_llr_above(spec, n, gnats[k], cfg);
            w_aux = std::max(w_aux, sigmas(std::exp(la), grid.aux_llr_above[k]));
            const double pa = stats::prob_angle_test(
                spec, n, g01[k], stats::AngleMode::ProjectionLowerBound, cfg);
            w_ang = std::max(w_ang, sigmas(pa, grid.angle_proj[k]));
        }
        add("mc-twin-llr-below", w_llr, 4.0);
        add("mc-twin-aux-llr-above", w_aux, 4.0);
        add("mc-twin-angle-projection", w_ang, 4.0);
    }

    // null angle statistic against the Beta law
    {
        const long n = 30;
        const int r = config.num_rx;
        const long samples = std::min<long>(config.mc_samples, 1000000);
        auto draws = oracle::mc_null_angle_samples(n, r, samples, config.seed);
        std::sort(draws.begin(), draws.end());
        // sup-deviation of the empirical CDF of cos^2 from the Beta law,
        // evaluated at the draws themselves so the whole range has mass
        double worst = 0.0;
        const double se = 0.5 / std::sqrt(static_cast<double>(samples));
        const long stride = std::max<long>(1, samples / 5000);
        for (long i = 0; i < samples; i += stride) {
            const double analytic = 1.0 - specfun::regularized_incomplete_beta(
                                              1.0 - draws[i], static_cast<double>(n - r),
                                              static_cast<double>(r));
            worst = std::max(
                worst, std::fabs(analytic - (i + 0.5) / static_cast<double>(samples)) / se);
        }
        add("null-angle-beta-law", worst, 4.0);
    }

    // threshold expansion trend of the converse solver
    {
        const auto terms = asymptotics::expansion_terms(spec, config.epsilon, cfg);
        double prev = 0.0, worst = 0.0;
        bool first = true;
        for (long n : {250L, 500L, 1000L}) {
            const auto pt = bounds::converse_csirt(spec, n, config.epsilon, cfg);
            const double est = n * (pt.gamma - terms.c_eps_nats);
            if (!first)
                worst = std::max(worst, std::fabs(est - prev) /
                                            std::max(std::fabs(prev), 1e-12));
            prev = est;
            first = false;
        }
        add("threshold-expansion-trend", worst, 0.35);
    }

    out << (rep.all_pass() ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return rep;
}

}  // namespace qsfb::sweep
