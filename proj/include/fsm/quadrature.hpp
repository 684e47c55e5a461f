#pragma once
//============================================================================
// quadrature.hpp
//
// Composite 64-point Gauss-Legendre quadrature.  Panel layouts are uniform
// at a density tied to the series truncation, with geometric refinement
// toward an interval end when the integrand's end-derivative magnitude
// indicates a boundary layer.  Also provides closed-form moments
//
//     int_lo^hi (x - c)^j exp(eta (x - c)) * {cos, sin}(omega x) dx
//
// via the downward-stable recurrence in j (series expansion near
// eta + i omega = 0), which is how boundary-trace Fourier coefficients of
// exponential basis entries are computed without quadrature.
//============================================================================

#include <complex>
#include <vector>

namespace fsm {

using cd = std::complex<double>;

struct QuadratureRule {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// 64-point Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre_64();

// Concatenated 64-point panels between consecutive breakpoints.
QuadratureRule panel_rule(const std::vector<double>& breaks);

std::vector<double> uniform_breaks(double lo, double hi, int panels);

// Uniform layout with the first/last panel subdivided geometrically
// (halving toward the end) so boundary layers are resolved to width
// ~(hi-lo)/panels * 2^-40.
std::vector<double> layer_refined_breaks(double lo, double hi, int panels,
                                         bool refine_lo, bool refine_hi);

// True when |d/dx integrand| at the given end exceeds 1e3 times its
// midpoint magnitude, the trigger for geometric end refinement.
bool end_layer_detected(double deriv_end, double deriv_mid, double scale);

// Closed-form moments of anchored exponential entries against e^{i omega x}.
cd exp_moment(cd eta, double c, int j, double omega, double lo, double hi);
cd exp_cos_moment(cd eta, double c, int j, double omega, double lo, double hi);
cd exp_sin_moment(cd eta, double c, int j, double omega, double lo, double hi);

} // namespace fsm
