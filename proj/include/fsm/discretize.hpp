#pragma once
//============================================================================
// discretize.hpp
//
// Global determination of the boundary-function coefficients.  The interior
// part phi0 (+ corner and supplementary polynomials) is fixed termwise; what
// remains is the data vector q of every boundary harmonic.  Two closures:
//
//   fcc          "Fourier coefficient comparison": expand each boundary
//                condition residual on each side in the side's tangential
//                family up to N_b = max(M, N) + 2r and zero the retained
//                coefficients.  Columns from a harmonic's own sides are
//                block diagonal; columns entering through the opposite
//                coordinate's harmonics are dense and computed by the
//                closed-form exponential moments.  Square system.
//
//   collocation  enforce the conditions at 2(N_b+1) Chebyshev points per
//                (side, operator) and solve in least squares.  Same
//                unknowns, independent row functionals; agreement of the
//                two is a strong end-to-end check.
//
// In 1D both closures collapse to the same 2r x 2r endpoint system that
// solve_1d already assembles, so the driver simply forwards.
//============================================================================

#include "fsm/linsolve.hpp"
#include "fsm/problem.hpp"
#include "fsm/series1d.hpp"
#include "fsm/series2d.hpp"

#include <span>
#include <vector>

namespace fsm {

enum class Method { fcc, collocation };
const char* method_name(Method m);

//----------------------------------------------------------------------------
// Corner data derivation from the boundary conditions
//----------------------------------------------------------------------------

// Solves one side's boundary system for the normal-derivative traces along
// that side.  Requires the side's operators to be pure normal with exactly
// r distinct derivative orders and an invertible coefficient matrix;
// usable() reports which orders can be extracted.
struct SideTraceExtractor {
    bool ok = false;
    std::string why;
    std::vector<int> orders;             // extractable normal orders, sorted
    DenseMatrix inv;                     // inverse of the r x r coefficient matrix
    std::vector<Sampler1D> g;            // the side's data, in operator order

    bool usable(int order) const;
    // d^kt/dt^kt of the trace of the order-th normal derivative at t.
    double trace(int order, int kt, double t) const;
};

SideTraceExtractor side_trace_extractor(const ValidatedProblem& problem, Side side);

// Corner values u^(2j1, 2j2) for the sine-sine flavor, from tangential
// derivatives of an adjacent side's data (x1 side preferred).  Throws
// fsm::Error(validation) naming the corner when no adjacent side provides
// the required orders.
SineCornerData derive_corner_data(const ValidatedProblem& problem, const Sampler2D* unused_tag_sine);
SineCornerData derive_corner_data_sine(const ValidatedProblem& problem);

// Double jumps [[d^k1 d^k2 u]] for the full-range flavor, as differences of
// opposite-side tangential jumps.
FullCornerData derive_corner_data_full(const ValidatedProblem& problem);

//----------------------------------------------------------------------------
// Global system
//----------------------------------------------------------------------------

struct GlobalSystem {
    DenseMatrix A;
    std::vector<cd> rhs;
    int Nb = 0;
    Method method = Method::fcc;
};

int boundary_truncation(const ValidatedProblem& problem);   // N_b = max(M,N) + 2r

GlobalSystem assemble_fcc(const ValidatedProblem& problem, const FourierSeries2D& phi0,
                          const RealPoly2& p3s, const BoundaryFunction2D& phi1,
                          const BoundaryFunction2D& phi2, int Nb);

// P = points per (side, operator); 0 picks the default 2*(Nb+1).  Points are
// Chebyshev-distributed, so corners are excluded by half-spacing.
GlobalSystem assemble_collocation(const ValidatedProblem& problem,
                                  const FourierSeries2D& phi0, const RealPoly2& p3s,
                                  const BoundaryFunction2D& phi1,
                                  const BoundaryFunction2D& phi2, int Nb, int P = 0);

struct GlobalSolveResult {
    std::vector<cd> q;
    double cond = 0.0;
    double residual = 0.0;          // ||A q - rhs||_2
    bool ill_conditioned = false;   // condition estimate above 1e14; the
                                    // result is still returned
};

GlobalSolveResult solve_global(const GlobalSystem& sys);

// Normalized boundary slot (phi1 slots first, then phi2) evaluated in the
// block's own (normal, tangential) coordinates.
cd slot_eval(const BoundaryFunction2D& bf, int slot, double xn, double xt,
             int kn, int kt);

//----------------------------------------------------------------------------
// Drivers
//----------------------------------------------------------------------------

CompositeSolution2D solve_2d(const ValidatedProblem& problem, Method method);

// 1D problems: both closures reduce to the endpoint system of solve_1d.
CompositeSolution1D solve_problem_1d(const ValidatedProblem& problem, Method method);

//----------------------------------------------------------------------------
// Equivalent boundary-data transform
//----------------------------------------------------------------------------
//
// Re-parameterizes the solved composite by the Fourier data of its own
// normal-derivative traces q_b (orders 0..r-1 per side) instead of the
// internal harmonic data q12.  The map q_b = R12 q12 + t03 is square by the
// truncation accounting, so q12 = R12^{-1}(q_b - t03) and the solution can
// be evaluated directly from trace data.

struct EquivalentTransform {
    DenseMatrix R12;
    std::vector<cd> t03;
    double cond = 0.0;
};

EquivalentTransform equivalent_transform(const ValidatedProblem& problem,
                                         const CompositeSolution2D& sol);

std::vector<cd> packed_q12(const CompositeSolution2D& sol);
std::vector<cd> boundary_trace_coeffs(const EquivalentTransform& t,
                                      const CompositeSolution2D& sol);
std::vector<cd> recover_q12(const EquivalentTransform& t, std::span<const cd> qb);
double dual_eval(const EquivalentTransform& t, const CompositeSolution2D& sol,
                 std::span<const cd> qb, double x1, double x2, int k1 = 0, int k2 = 0);

struct EquivalentTransform1D {
    DenseMatrix R12;
    std::vector<cd> t03;
    double cond = 0.0;
};

EquivalentTransform1D equivalent_transform(const ValidatedProblem& problem,
                                           const CompositeSolution1D& sol);
std::vector<cd> boundary_trace_values(const EquivalentTransform1D& t,
                                      const CompositeSolution1D& sol);
std::vector<cd> recover_q1(const EquivalentTransform1D& t, std::span<const cd> qb);
double dual_eval(const EquivalentTransform1D& t, const CompositeSolution1D& sol,
                 std::span<const cd> qb, double x, int k = 0);

} // namespace fsm
