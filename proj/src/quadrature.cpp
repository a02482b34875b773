#include "qsfb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qsfb/specfun.hpp"

namespace qsfb::quadrature {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// panel edges on the probability scale
std::vector<double> panel_edges(const fading::GainDistribution& dist, double split_g) {
    // graded panels toward both endpoints: the conditional probabilities
    // approach their limits algebraically in u, which plain Gauss-Legendre
    // on [0,1] resolves only slowly
    std::vector<double> edges = {0.0,       1e-12,      1e-9,       1e-6,
                                 1e-3,      1e-1,       0.5,        1.0 - 1e-1,
                                 1.0 - 1e-3, 1.0 - 1e-6, 1.0 - 1e-9, 1.0};
    if (split_g > 0.0) {
        const double u = dist.cdf(split_g);
        if (u > 1e-12 && u < 1.0 - 1e-12) edges.push_back(u);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

// one Gauss-Legendre pass at a fixed order over all panels; returns the
// per-node (weight, value) pairs through `emit`
template <typename F, typename Emit>
void pass(const fading::GainDistribution& dist, const std::vector<double>& edges,
          int order, const F& f, const Emit& emit) {
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p], b = edges[p + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int i = 0; i < order; ++i) {
            // extreme nodes of the outermost panels can round onto the
            // endpoints, which the quantile rejects
            double u = mid + half * x[i];
            if (u >= 1.0) u = std::nextafter(1.0, 0.0);
            if (u <= 0.0) u = std::numeric_limits<double>::min();
            emit(half * w[i], f(dist.quantile(u)));
        }
    }
}

}  // namespace

void QuadControl::validate() const {
    if (initial_order < 2 || max_order < initial_order)
        throw std::domain_error("QuadControl: bad quadrature orders");
    if (!(tol > 0.0) || !(log_tol > 0.0))
        throw std::domain_error("QuadControl: tolerances must be positive");
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1) throw std::domain_error("gauss_legendre: order must be >= 1");
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton from the Chebyshev-like initial guess
        double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        nodes[i] = -z;
        nodes[order - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[order - 1 - i] = weights[i];
    }
}

double expect_gain(const fading::GainDistribution& dist, double split_g,
                   const std::function<double(double)>& f, const QuadControl& ctl) {
    ctl.validate();
    const auto edges = panel_edges(dist, split_g);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int order = ctl.initial_order; order <= ctl.max_order; order *= 2) {
        double total = 0.0;
        pass(dist, edges, order, f, [&](double w, double v) { total += w * v; });
        if (!std::isnan(prev) && std::fabs(total - prev) < ctl.tol) return total;
        prev = total;
    }
    throw specfun::ConvergenceError("expect_gain: quadrature did not converge");
}

double log_expect_gain(const fading::GainDistribution& dist, double split_g,
                       const std::function<double(double)>& log_f, const QuadControl& ctl) {
    ctl.validate();
    const auto edges = panel_edges(dist, split_g);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int order = ctl.initial_order; order <= ctl.max_order; order *= 2) {
        std::vector<double> lw;  // log(weight) + log-integrand per node
        pass(dist, edges, order, log_f, [&](double w, double lv) {
            if (lv > kNegInf) lw.push_back(std::log(w) + lv);
        });
        double total = kNegInf;
        if (!lw.empty()) {
            const double m = *std::max_element(lw.begin(), lw.end());
            double s = 0.0;
            for (double v : lw) s += std::exp(v - m);
            total = m + std::log(s);
        }
        if (total == kNegInf && prev == kNegInf) return kNegInf;
        if (!std::isnan(prev) && std::fabs(total - prev) < ctl.log_tol) return total;
        prev = total;
    }
    throw specfun::ConvergenceError("log_expect_gain: quadrature did not converge");
}

}  // namespace qsfb::quadrature
