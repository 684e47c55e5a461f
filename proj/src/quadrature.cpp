//============================================================================
// quadrature.cpp
//============================================================================

#include "fsm/quadrature.hpp"
#include "fsm/errors.hpp"

#include <cmath>
#include <numbers>

namespace fsm {

namespace {

// Newton iteration on the Legendre polynomial; nodes converge to full double
// precision in a handful of steps.
QuadratureRule compute_gl(int n) {
    QuadratureRule rule;
    rule.x.resize(static_cast<std::size_t>(n));
    rule.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 64; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.x[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

const QuadratureRule& gauss_legendre_64() {
    static const QuadratureRule rule = compute_gl(64);
    return rule;
}

QuadratureRule panel_rule(const std::vector<double>& breaks) {
    if (breaks.size() < 2) fail_internal("panel_rule: need at least one panel");
    const QuadratureRule& gl = gauss_legendre_64();
    QuadratureRule out;
    out.x.reserve((breaks.size() - 1) * gl.size());
    out.w.reserve((breaks.size() - 1) * gl.size());
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        double lo = breaks[p], hi = breaks[p + 1];
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gl.size(); ++i) {
            out.x.push_back(mid + half * gl.x[i]);
            out.w.push_back(half * gl.w[i]);
        }
    }
    return out;
}

std::vector<double> uniform_breaks(double lo, double hi, int panels) {
    std::vector<double> b(static_cast<std::size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i)
        b[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / panels;
    b.front() = lo;
    b.back() = hi;
    return b;
}

std::vector<double> layer_refined_breaks(double lo, double hi, int panels,
                                         bool refine_lo, bool refine_hi) {
    std::vector<double> base = uniform_breaks(lo, hi, panels);
    if (!refine_lo && !refine_hi) return base;

    constexpr int geometric_levels = 40;
    std::vector<double> out;
    if (refine_lo) {
        double w = base[1] - base[0];
        // lo + w*2^-40, ..., lo + w/2 inserted before the first break
        out.push_back(lo);
        for (int g = geometric_levels; g >= 1; --g)
            out.push_back(lo + w * std::ldexp(1.0, -g));
        out.insert(out.end(), base.begin() + 1, base.end());
    } else {
        out = base;
    }
    if (refine_hi) {
        double w = base[base.size() - 1] - base[base.size() - 2];
        out.pop_back();
        for (int g = 1; g <= geometric_levels; ++g)
            out.push_back(hi - w * std::ldexp(1.0, -g));
        out.push_back(hi);
    }
    return out;
}

bool end_layer_detected(double deriv_end, double deriv_mid, double scale) {
    double mid = std::abs(deriv_mid) + 1e-30 * (1.0 + std::abs(scale));
    return std::abs(deriv_end) > 1e3 * mid;
}

//----------------------------------------------------------------------------
// Exponential-trigonometric moments
//----------------------------------------------------------------------------

cd exp_moment(cd eta, double c, int j, double omega, double lo, double hi) {
    // e^{i omega x} = e^{i omega c} e^{i omega (x-c)}; substitute t = x - c.
    const cd z = eta + cd(0.0, omega);
    const double t0 = lo - c, t1 = hi - c;
    const double span = std::max(std::abs(t0), std::abs(t1));
    const cd phase = std::exp(cd(0.0, omega * c));

    if (std::abs(z) * span < 0.5) {
        // Series: int t^j e^{zt} = sum_i z^i / i! * (t1^{j+i+1} - t0^{j+i+1})/(j+i+1)
        cd sum = 0.0;
        cd zi = 1.0;
        double fact = 1.0;
        double p0 = std::pow(t0, j + 1), p1 = std::pow(t1, j + 1);
        for (int i = 0;; ++i) {
            cd term = zi / fact * (p1 - p0) / static_cast<double>(j + i + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum)) && i > 2) break;
            if (i > 60) break;
            zi *= z;
            fact *= static_cast<double>(i + 1);
            p0 *= t0;
            p1 *= t1;
        }
        return phase * sum;
    }

    // Recurrence T_j = [t^j e^{zt}]/z - (j/z) T_{j-1}.  The anchor keeps
    // Re(eta * t) <= 0 on the interval, so the exponentials never overflow.
    const cd e0 = std::exp(z * t0), e1 = std::exp(z * t1);
    cd T = (e1 - e0) / z;
    double pj0 = 1.0, pj1 = 1.0;
    for (int q = 1; q <= j; ++q) {
        pj0 *= t0;
        pj1 *= t1;
        T = (pj1 * e1 - pj0 * e0) / z - static_cast<double>(q) / z * T;
    }
    return phase * T;
}

cd exp_cos_moment(cd eta, double c, int j, double omega, double lo, double hi) {
    return 0.5 * (exp_moment(eta, c, j, omega, lo, hi) +
                  exp_moment(eta, c, j, -omega, lo, hi));
}

cd exp_sin_moment(cd eta, double c, int j, double omega, double lo, double hi) {
    return (exp_moment(eta, c, j, omega, lo, hi) -
            exp_moment(eta, c, j, -omega, lo, hi)) / cd(0.0, 2.0);
}

} // namespace fsm
