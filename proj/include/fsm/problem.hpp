#pragma once
//============================================================================
// problem.hpp
//
// Problem description for 2r-th order linear constant-coefficient boundary
// value problems on an interval or a rectangle:
//
//     L u = f   in the domain,     B_l u = g_l   on each side,
//
// together with the series flavor that drives the composite expansion:
//   full        periodic full-range series on [-a, a]
//   half_cosine cosine series on [0, a]        (even-order operators)
//   half_sine   sine series on [0, a]          (even-order operators)
//   full_2d     full-range series on [-a, a] x [-b, b]
//   sine_sine   sine series on [0, a] x [0, b] (even-even operators)
//============================================================================

#include "fsm/expression.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fsm {

using cd = std::complex<double>;

//----------------------------------------------------------------------------
// Samplers: closed-form data with derivative access
//----------------------------------------------------------------------------

// Scalar function of one coordinate.  Expression-backed samplers carry their
// source text (for serialization) and precompute symbolic derivatives up to
// a fixed order so evaluation is lock-free in parallel loops.
class Sampler1D {
public:
    static constexpr int max_order = 8;

    Sampler1D() = default;

    // var selects which variable of the expression is the sampler's
    // argument (0 = x1, 1 = x2); the other variable must not appear.
    static Sampler1D from_expression(const std::string& src, int var = 0);
    static Sampler1D from_constant(double v);
    static Sampler1D from_function(std::function<double(double, int)> f,
                                   const std::string& label);

    bool valid() const { return impl_ != nullptr; }
    double operator()(double x, int k = 0) const;
    const std::string& source() const;
    bool is_constant_zero() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// Scalar function of two coordinates with mixed derivatives.
class Sampler2D {
public:
    static constexpr int max_order = 5;

    Sampler2D() = default;
    static Sampler2D from_expression(const std::string& src);
    static Sampler2D from_constant(double v);
    static Sampler2D from_function(std::function<double(double, double, int, int)> f,
                                   const std::string& label);

    bool valid() const { return impl_ != nullptr; }
    double operator()(double x1, double x2, int k1 = 0, int k2 = 0) const;
    const std::string& source() const;
    bool is_constant_zero() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

//----------------------------------------------------------------------------
// Real polynomials (supplementary and corner parts are stored in this form)
//----------------------------------------------------------------------------

struct RealPoly1 {
    std::vector<double> c;   // ascending powers

    double eval(double x, int k = 0) const;
    bool empty() const { return c.empty(); }
};

struct RealPoly2 {
    int n1 = 0, n2 = 0;          // array extents: powers 0..n1-1, 0..n2-1
    std::vector<double> c;       // row-major on (j1, j2)

    static RealPoly2 zeros(int n1, int n2);
    double& at(int j1, int j2) { return c[static_cast<std::size_t>(j1) * n2 + j2]; }
    double at(int j1, int j2) const { return c[static_cast<std::size_t>(j1) * n2 + j2]; }
    double eval(double x1, double x2, int k1 = 0, int k2 = 0) const;
    bool empty() const { return c.empty(); }
};

//----------------------------------------------------------------------------
// Domain / operators / boundary conditions
//----------------------------------------------------------------------------

enum class DomainKind { interval_symmetric, interval, rect_symmetric, rect };

struct Domain {
    DomainKind kind = DomainKind::interval;
    double a = 0.0;
    double b = 0.0;

    bool is_2d() const {
        return kind == DomainKind::rect_symmetric || kind == DomainKind::rect;
    }
    bool is_symmetric() const {
        return kind == DomainKind::interval_symmetric || kind == DomainKind::rect_symmetric;
    }
    double x1_lo() const { return is_symmetric() ? -a : 0.0; }
    double x1_hi() const { return a; }
    double x2_lo() const { return is_symmetric() ? -b : 0.0; }
    double x2_hi() const { return b; }
};

// Constant-coefficient operator sum a_k d^k/dx^k, k = 0..2r, a_{2r} != 0.
struct Operator1D {
    int order = 0;                 // 2r
    std::vector<double> coeffs;    // length order+1, index k

    int r() const { return order / 2; }
    double coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(coeffs.size())) ? coeffs[static_cast<std::size_t>(k)] : 0.0;
    }
};

// Constant-coefficient operator sum a_{k1,k2} d^{k1}d^{k2}, total order <= 2r.
// Stored densely on the (order+1)^2 grid; entries above the total-order
// triangle stay zero.
struct Operator2D {
    int order = 0;                 // 2r
    std::vector<double> coeffs;    // (order+1)*(order+1), row-major on (k1,k2)

    static Operator2D make(int order);
    int r() const { return order / 2; }
    double coeff(int k1, int k2) const {
        if (k1 < 0 || k2 < 0 || k1 > order || k2 > order) return 0.0;
        return coeffs[static_cast<std::size_t>(k1) * (order + 1) + k2];
    }
    void set(int k1, int k2, double v) {
        coeffs[static_cast<std::size_t>(k1) * (order + 1) + k2] = v;
    }
};

enum class Side { x1_max = 0, x1_min = 1, x2_max = 2, x2_min = 3 };
const char* side_name(Side s);

struct BoundaryTerm {
    int k1 = 0;
    int k2 = 0;        // always 0 in 1D
    double b = 0.0;
};

struct BoundaryOperator {
    std::vector<BoundaryTerm> terms;

    int max_order() const;
    // Parity of the derivative orders along one axis: 0 all-even, 1 all-odd,
    // -1 mixed.  Used by the flavor validity rules.
    int parity(int axis) const;
    bool pure_normal(int normal_axis) const;   // no tangential derivatives
};

struct BoundaryCondition {
    BoundaryOperator op;
    Sampler1D g;       // 1D: constant sampler; 2D: function of the tangential coordinate
};

struct BoundaryConditionSet {
    // Indexed by Side.
    std::vector<BoundaryCondition> conditions[4];

    const std::vector<BoundaryCondition>& on(Side s) const {
        return conditions[static_cast<int>(s)];
    }
    std::vector<BoundaryCondition>& on(Side s) {
        return conditions[static_cast<int>(s)];
    }
};

struct ForcingSpec {
    Sampler1D f1;                    // 1D problems
    Sampler2D f2;                    // 2D problems
    std::optional<RealPoly1> fs1;    // polynomial part handled by the supplementary solution
    std::optional<RealPoly2> fs2;
};

enum class Flavor { full, half_cosine, half_sine, full_2d, sine_sine };
const char* flavor_name(Flavor f);

struct Truncation {
    int M = 0;
    int N = 0;   // 2D only
};

struct ProblemSpec {
    Domain domain;
    std::optional<Operator1D> op1;
    std::optional<Operator2D> op2;
    BoundaryConditionSet bcs;
    ForcingSpec forcing;
    Flavor flavor = Flavor::full;
    Truncation trunc;
};

// A ProblemSpec that passed validate(); r is the half-order of the operator.
struct ValidatedProblem {
    ProblemSpec spec;
    int r = 0;

    bool is_2d() const { return spec.domain.is_2d(); }
};

// Checks the problem invariants in deterministic field order and throws
// fsm::Error(validation) naming the offending field.  Idempotent.
ValidatedProblem validate(const ProblemSpec& spec);
inline ValidatedProblem validate(const ValidatedProblem& p) { return p; }

//----------------------------------------------------------------------------
// Operator symbols and polynomial application
//----------------------------------------------------------------------------

cd symbol_1d(const Operator1D& op, cd z);
cd symbol_2d(const Operator2D& op, cd z1, cd z2);

// L applied to a polynomial (exact; used for forcing corrections).
RealPoly1 apply_operator(const Operator1D& op, const RealPoly1& p);
RealPoly2 apply_operator(const Operator2D& op, const RealPoly2& p);

} // namespace fsm
