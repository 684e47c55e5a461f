#pragma once
//============================================================================
// series2d.hpp
//
// Rectangle-domain composite solutions
//
//     u = phi0 + phi1 + phi2 + phi3 + phis
//
// phi0   double Fourier series solving L phi0 = f - L phi3 - L phis mode
//        by mode (per-mode division by the operator symbol, or a small
//        coupled block for full-range expansions),
// phi1   boundary functions for the x1_min/x1_max sides: per tangential
//        harmonic n a combination of homogeneous ODE solutions in x1,
// phi2   the same for the x2 sides with the roles of the axes swapped,
// phi3   corner polynomial absorbing corner data (sine-sine flavor) or
//        double jumps (full-range flavor) so the side data seen by
//        phi1/phi2 is compatible with termwise differentiation,
// phis   polynomial handled outside the series when the forcing carries a
//        polynomial part that the truncated series would chase slowly.
//
// The per-harmonic coefficient vectors q are determined by the global
// discretization (see discretize.hpp); this module owns the bases, the
// normalizations and the evaluation rules.
//============================================================================

#include "fsm/charpoly.hpp"
#include "fsm/linsolve.hpp"
#include "fsm/problem.hpp"

#include <optional>
#include <vector>

namespace fsm {

//----------------------------------------------------------------------------
// Supplementary polynomial: exact polynomial solve of L p = fs
//----------------------------------------------------------------------------

// Eliminates the forcing degree by degree starting from the top, using the
// lowest-order nonzero operator term as pivot; the result has degree at most
// deg(fs) + 2r and satisfies L p = fs to roundoff (verified, internal error
// otherwise).
RealPoly1 supplementary_solution(const Operator1D& op, const RealPoly1& fs);

// 2D analogue; eliminates one total-degree level at a time through the
// minimal-norm solution of the principal-part level map.
RealPoly2 supplementary_solution(const Operator2D& op, const RealPoly2& fs);

//----------------------------------------------------------------------------
// Corner function
//----------------------------------------------------------------------------

// Corner data for the sine-sine flavor on [0,a] x [0,b]: pure even corner
// derivatives u^(2j1,2j2) at the four corners, j1, j2 = 0..r-1.
// Index layout: ((e1*2 + e2)*r + j1)*r + j2 with e = 0 for the low end of
// the axis and e = 1 for the high end.
struct SineCornerData {
    int r = 0;
    std::vector<double> values;

    static SineCornerData zero(int r);
    double& at(int e1, int e2, int j1, int j2) {
        return values[static_cast<std::size_t>(((e1 * 2 + e2) * r + j1) * r + j2)];
    }
    double at(int e1, int e2, int j1, int j2) const {
        return values[static_cast<std::size_t>(((e1 * 2 + e2) * r + j1) * r + j2)];
    }
};

// Corner data for the full-range flavor on [-a,a] x [-b,b]: the double
// jumps [[d^k1 d^k2 u]] across the periodic seams, one number per (k1, k2)
// in the triangle k1 + k2 <= 2r - 2.  Stored densely on (2r-1) x (2r-1)
// with off-triangle entries zero.
struct FullCornerData {
    int r = 0;
    std::vector<double> jumps;

    static FullCornerData zero(int r);
    double& at(int k1, int k2) {
        return jumps[static_cast<std::size_t>(k1) * (2 * r - 1) + k2];
    }
    double at(int k1, int k2) const {
        return jumps[static_cast<std::size_t>(k1) * (2 * r - 1) + k2];
    }
};

// Tensor polynomial reproducing the corner data exactly.  Sine-sine: tensor
// product of one-dimensional even-derivative end interpolants (degree
// <= 2r-1 per variable).  Full-range: monomials x1^(k1+1) x2^(k2+1) over
// the jump triangle, fixed by the double-jump conditions.
RealPoly2 corner_function(const SineCornerData& data, double a, double b);
RealPoly2 corner_function(const FullCornerData& data, double a, double b);

//----------------------------------------------------------------------------
// Double Fourier series (phi0)
//----------------------------------------------------------------------------

// Coefficient layout mirrors the 1D convention: the m = 0 / n = 0 cosine
// terms carry an extra weight 1/2 at evaluation time so the coefficient
// formulas stay uniform across modes.
struct FourierSeries2D {
    Flavor flavor = Flavor::sine_sine;
    double a = 0.0, b = 0.0;
    int M = 0, N = 0;

    // sine_sine: ss[(m-1)*N + (n-1)], m = 1..M, n = 1..N.
    std::vector<double> ss;
    // full_2d blocks: cc[m*(N+1)+n] (m,n >= 0), cs[m*N + n-1] (n >= 1),
    // sc[(m-1)*(N+1)+n] (m >= 1), sxs[(m-1)*N + n-1] (m, n >= 1).
    std::vector<double> cc, cs, sc, sxs;

    static FourierSeries2D zero(Flavor flavor, double a, double b, int M, int N);
    double eval(double x1, double x2, int k1 = 0, int k2 = 0) const;
};

FourierSeries2D fourier_coeffs_2d(const Sampler2D& f, double a, double b,
                                  int M, int N, Flavor flavor);

// Termwise solve of L phi0 = rhs on the retained modes.  Sine-sine divides
// by the (real) symbol; the full-range flavor solves the 4x4 (or smaller)
// block that couples the cos/sin pairs of one (m, n).  Throws
// fsm::Error(resonance) naming the first mode whose symbol is negligible.
FourierSeries2D particular_2d(const Operator2D& op, const Sampler2D& rhs,
                              double a, double b, int M, int N, Flavor flavor);

//----------------------------------------------------------------------------
// Boundary functions
//----------------------------------------------------------------------------

// One tangential harmonic whose coefficient function solves a scalar 2r-th
// order ODE in the normal coordinate: sine-sine harmonics (t12 == 0) and
// the tangentially constant component of the full-range flavor.
struct ScalarHarmonic {
    int n = 0;
    double beta = 0.0;           // tangential wavenumber n*pi/(half-length)
    HomogeneousBasis1D basis;    // 2r entries in the normal coordinate
    DenseMatrix coeff;           // column i realizes unit data functional i
    double cond = 0.0;
    std::vector<cd> q;           // data carried by this harmonic

    // Normalized derivative row [w_0^(k)(x), ..., w_{2r-1}^(k)(x)].
    std::vector<cd> row(double x, int k) const;
    cd xi(double x, int k) const;   // row . q
};

// One coupled harmonic of the full-range flavor (n >= 1): the pair
// (xi1, xi2) multiplying cos(beta t) and sin(beta t) solves the 2x2
// per-harmonic ODE system; the basis carries fixed amplitude directions.
struct VectorHarmonic {
    int n = 0;
    double beta = 0.0;
    std::vector<VectorBasisEntry> basis;   // 4r entries
    DenseMatrix coeff;                     // normalization against jump data
    double cond = 0.0;
    std::vector<cd> q;                     // 4r data values (xi1 jumps, xi2 jumps)

    // Normalized rows of the two coefficient functions at (x, k).
    void rows(double x, int k, std::vector<cd>& xi1_row, std::vector<cd>& xi2_row) const;
    void xi(double x, int k, cd& xi1, cd& xi2) const;
};

// The complete boundary-function block for one pair of opposite sides.
// Evaluation is in (normal, tangential) coordinates; the caller maps
// (x1, x2) according to the axis.
struct BoundaryFunction2D {
    int axis = 0;                // 0: x1-normal sides, 1: x2-normal sides
    Flavor flavor = Flavor::sine_sine;
    int r = 0;
    double n_lo = 0.0, n_hi = 0.0;   // normal interval
    double t_half = 0.0;             // tangential half-length (a or b)

    std::optional<ScalarHarmonic> n0;       // full_2d only (weight 1/2)
    std::vector<ScalarHarmonic> scalars;    // sine_sine harmonics n = 1..Nb
    std::vector<VectorHarmonic> vectors;    // full_2d harmonics n = 1..Nb

    int harmonic_count() const {
        return static_cast<int>(scalars.size() + vectors.size()) + (n0 ? 1 : 0);
    }
    // Data slots across all harmonics (the q vectors end to end).
    int dof() const;

    cd eval_c(double xn, double xt, int kn, int kt, double* mag = nullptr) const;
};

// Bases and normalizations for all harmonics n = 0/1..Nb of the x1-normal
// (phi1) block; q vectors start at zero.  Throws fsm::Error(singular) when
// a harmonic's data functionals degenerate on its homogeneous space.
BoundaryFunction2D boundary_function_phi1(const Operator2D& op, const Domain& domain,
                                          Flavor flavor, int Nb);

// The x2-normal (phi2) block: the same construction applied to the
// transposed operator on the axis-swapped domain.
BoundaryFunction2D boundary_function_phi2(const Operator2D& op, const Domain& domain,
                                          Flavor flavor, int Nb);

//----------------------------------------------------------------------------
// Composite solution
//----------------------------------------------------------------------------

struct CompositeSolution2D {
    int r = 0;
    Flavor flavor = Flavor::sine_sine;
    double a = 0.0, b = 0.0;

    FourierSeries2D phi0;
    BoundaryFunction2D phi1;
    BoundaryFunction2D phi2;
    RealPoly2 phi3;
    std::optional<RealPoly2> phis;

    double bc_residual = 0.0;
    bool ill_conditioned = false;   // global solve passed the condition warning

    double eval(double x1, double x2, int k1 = 0, int k2 = 0) const;
};

// Range-checked evaluation (k1, k2 <= 2r).
double eval_2d(const CompositeSolution2D& sol, double x1, double x2, int k1, int k2);

} // namespace fsm
