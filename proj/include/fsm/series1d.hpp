#pragma once
//============================================================================
// series1d.hpp
//
// Composite series solution of 1D constant-coefficient boundary value
// problems.  The solution splits into
//
//     u = phi0 + phi1 + phi_s
//
// where phi0 is a truncated trigonometric series carrying the particular
// solution (computed mode by mode by dividing forcing coefficients by the
// operator symbol), phi1 is a combination of homogeneous solutions carrying
// the boundary data (which a plain truncated series cannot represent
// without Gibbs artifacts), and phi_s is an optional polynomial response to
// a polynomial forcing part.
//
// Flavors fix the trigonometric family and the 2r data functionals that
// parameterize phi1:
//   full         [-a, a]: jumps u^(k)(a) - u^(k)(-a), k = 0..2r-1
//   half_cosine  [0, a]:  odd end derivatives u^(2j+1) at a then at 0
//   half_sine    [0, a]:  even end derivatives u^(2j)  at a then at 0
//
// The same functionals drive the polynomial-interpolation baseline, which
// subtracts a low-degree interpolant of the data before truncating; its
// failure on boundary-layer functions is what the multiscale boundary
// function fixes.
//============================================================================

#include "fsm/charpoly.hpp"
#include "fsm/linsolve.hpp"
#include "fsm/problem.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace fsm {

//----------------------------------------------------------------------------
// Truncated trigonometric series
//----------------------------------------------------------------------------

// Wavenumbers are m*pi/a in every flavor; the constant term carries the
// conventional 1/2 weight, so coefficients are plain integrals against the
// modes ((1/a) over [-a,a], (2/a) over [0,a]).
struct FourierSeries1D {
    Flavor flavor = Flavor::half_sine;
    double a = 1.0;
    int M = 0;
    std::vector<double> ccos;   // full/half_cosine: modes 0..M
    std::vector<double> csin;   // full/half_sine: modes 1..M at index m-1

    static FourierSeries1D zero(Flavor flavor, double a, int M);
    double eval(double x, int k = 0) const;
};

//----------------------------------------------------------------------------
// Boundary function
//----------------------------------------------------------------------------

// Homogeneous basis normalized against the flavor functionals: column i of
// coeff combines raw basis entries into the function whose data vector is
// e_i, so the constants q1 of a BoundaryFunction1D are literally the
// jump / end-derivative values the function realizes.
struct BoundaryTemplate1D {
    Flavor flavor = Flavor::half_sine;
    int r = 0;
    HomogeneousBasis1D basis;
    DenseMatrix coeff;
    double cond = 0.0;

    // [phi_0^(k)(x), ..., phi_{2r-1}^(k)(x)] of the normalized functions.
    std::vector<cd> row(double x, int k) const;
};

struct BoundaryFunction1D {
    BoundaryTemplate1D tpl;
    std::vector<cd> q1;

    cd eval_c(double x, int k = 0) const;
};

//----------------------------------------------------------------------------
// Composite solution
//----------------------------------------------------------------------------

struct CompositeSolution1D {
    int r = 0;
    Flavor flavor = Flavor::half_sine;
    double a = 1.0;
    FourierSeries1D phi0;
    std::optional<BoundaryFunction1D> phi1;   // absent for the baseline
    std::optional<RealPoly1> phis;
    double bc_residual = 0.0;                 // direct-evaluation residual

    double eval(double x, int k = 0) const;
};

struct ErrorCurve {
    int k = 0;
    std::vector<std::pair<int, double>> points;   // (M, e^(k)), M increasing
};

//----------------------------------------------------------------------------
// Operations
//----------------------------------------------------------------------------

// The flavor's 2r data functionals applied to a sampled function.
std::vector<double> flavor_data_1d(const Sampler1D& u, int r, double a, Flavor flavor);

// Truncated series of f alone (no operator): the quadrature engine behind
// both the particular solution and the baseline.  Panels scale with M and
// refine geometrically toward an end when f's end derivatives are steep.
FourierSeries1D fourier_coeffs_1d(const Sampler1D& f, double a, int M, Flavor flavor);

// Particular solution: forcing coefficients divided by the operator symbol
// (full flavor: exact 2x2 per-mode solve coupling cos/sin through odd-order
// terms).  Throws resonance when |symbol| < 1e-10 * (1+m)^2r at any
// retained mode m.
FourierSeries1D particular_coeffs_1d(const Operator1D& op, const Sampler1D& f,
                                     double a, int M, Flavor flavor);

// Homogeneous basis + normalization matrix for the flavor functionals.
// Throws singular when the functional matrix has condition > 1e13.
BoundaryTemplate1D build_boundary_basis_1d(const Operator1D& op, const Domain& domain,
                                           Flavor flavor);

// Full composite solve of a validated 1D problem.
CompositeSolution1D solve_1d(const ValidatedProblem& problem);

// Derivative evaluation with domain/order checks (0 <= k <= 2r).
double eval_1d(const CompositeSolution1D& sol, double x, int k);

// Polynomial-interpolation baseline: subtract the minimal-degree polynomial
// matching the flavor data of u, then truncate the series of the remainder.
// Monomial families: half_sine 1..x^(2r-1), half_cosine x..x^(2r),
// full x..x^(2r).
CompositeSolution1D baseline_poly_approx(const Sampler1D& u, int r, double a,
                                         int M, Flavor flavor);

// e^(k)(M) = relative sup-norm error of the k-th derivative on a 1001-point
// closed uniform grid (denominator floored at 1e-300).
ErrorCurve error_curve(const Sampler1D& exact,
                       const std::function<CompositeSolution1D(int)>& approx_for_M,
                       int k, const std::vector<int>& Ms, double lo, double hi);

} // namespace fsm
