//============================================================================
// problem.cpp
//
// Samplers, polynomial helpers, and the validation rules that gate every
// solve.  Validation walks fields in a fixed order so that error messages
// are deterministic.
//============================================================================

#include "fsm/problem.hpp"
#include "fsm/errors.hpp"

#include <cmath>
#include <sstream>

namespace fsm {

//----------------------------------------------------------------------------
// Sampler1D
//----------------------------------------------------------------------------

struct Sampler1D::Impl {
    std::vector<expr::Expr> derivs;               // expression-backed
    std::function<double(double, int)> fn;        // function-backed
    std::string source;
    int var = 0;
    bool const_zero = false;
};

Sampler1D Sampler1D::from_expression(const std::string& src, int var) {
    auto impl = std::make_shared<Impl>();
    impl->source = src;
    impl->var = var;
    impl->derivs.reserve(max_order + 1);
    impl->derivs.push_back(expr::Expr::parse(src));
    for (int k = 1; k <= max_order; ++k)
        impl->derivs.push_back(impl->derivs.back().derivative(var));
    double v;
    impl->const_zero = impl->derivs[0].is_constant(&v) && v == 0.0;
    Sampler1D s;
    s.impl_ = std::move(impl);
    return s;
}

Sampler1D Sampler1D::from_constant(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return from_expression(os.str(), 0);
}

Sampler1D Sampler1D::from_function(std::function<double(double, int)> f,
                                   const std::string& label) {
    auto impl = std::make_shared<Impl>();
    impl->fn = std::move(f);
    impl->source = label;
    Sampler1D s;
    s.impl_ = std::move(impl);
    return s;
}

double Sampler1D::operator()(double x, int k) const {
    if (!impl_) fail_internal("Sampler1D: evaluating an empty sampler");
    if (impl_->fn) return impl_->fn(x, k);
    if (k < 0 || k > max_order)
        fail_internal("Sampler1D: derivative order out of range");
    const expr::Expr& e = impl_->derivs[static_cast<std::size_t>(k)];
    return impl_->var == 0 ? e.eval(x, 0.0) : e.eval(0.0, x);
}

const std::string& Sampler1D::source() const {
    static const std::string empty;
    return impl_ ? impl_->source : empty;
}

bool Sampler1D::is_constant_zero() const {
    return impl_ && impl_->const_zero;
}

//----------------------------------------------------------------------------
// Sampler2D
//----------------------------------------------------------------------------

struct Sampler2D::Impl {
    // derivs[k1][k2]
    std::vector<std::vector<expr::Expr>> derivs;
    std::function<double(double, double, int, int)> fn;
    std::string source;
    bool const_zero = false;
};

Sampler2D Sampler2D::from_expression(const std::string& src) {
    auto impl = std::make_shared<Impl>();
    impl->source = src;
    impl->derivs.resize(max_order + 1);
    impl->derivs[0].reserve(max_order + 1);
    impl->derivs[0].push_back(expr::Expr::parse(src));
    for (int k2 = 1; k2 <= max_order; ++k2)
        impl->derivs[0].push_back(impl->derivs[0].back().derivative(1));
    for (int k1 = 1; k1 <= max_order; ++k1) {
        impl->derivs[k1].reserve(max_order + 1);
        for (int k2 = 0; k2 <= max_order; ++k2)
            impl->derivs[k1].push_back(impl->derivs[k1 - 1][static_cast<std::size_t>(k2)].derivative(0));
    }
    double v;
    impl->const_zero = impl->derivs[0][0].is_constant(&v) && v == 0.0;
    Sampler2D s;
    s.impl_ = std::move(impl);
    return s;
}

Sampler2D Sampler2D::from_constant(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return from_expression(os.str());
}

Sampler2D Sampler2D::from_function(std::function<double(double, double, int, int)> f,
                                   const std::string& label) {
    auto impl = std::make_shared<Impl>();
    impl->fn = std::move(f);
    impl->source = label;
    Sampler2D s;
    s.impl_ = std::move(impl);
    return s;
}

double Sampler2D::operator()(double x1, double x2, int k1, int k2) const {
    if (!impl_) fail_internal("Sampler2D: evaluating an empty sampler");
    if (impl_->fn) return impl_->fn(x1, x2, k1, k2);
    if (k1 < 0 || k2 < 0 || k1 > max_order || k2 > max_order)
        fail_internal("Sampler2D: derivative order out of range");
    return impl_->derivs[static_cast<std::size_t>(k1)][static_cast<std::size_t>(k2)].eval(x1, x2);
}

const std::string& Sampler2D::source() const {
    static const std::string empty;
    return impl_ ? impl_->source : empty;
}

bool Sampler2D::is_constant_zero() const {
    return impl_ && impl_->const_zero;
}

//----------------------------------------------------------------------------
// Real polynomials
//----------------------------------------------------------------------------

namespace {
double falling(int j, int k) {
    // j (j-1) ... (j-k+1); zero when k > j
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= static_cast<double>(j - i);
    return v;
}
} // namespace

double RealPoly1::eval(double x, int k) const {
    double sum = 0.0;
    for (int j = k; j < static_cast<int>(c.size()); ++j)
        sum += c[static_cast<std::size_t>(j)] * falling(j, k) * std::pow(x, j - k);
    return sum;
}

RealPoly2 RealPoly2::zeros(int n1, int n2) {
    RealPoly2 p;
    p.n1 = n1;
    p.n2 = n2;
    p.c.assign(static_cast<std::size_t>(n1) * n2, 0.0);
    return p;
}

double RealPoly2::eval(double x1, double x2, int k1, int k2) const {
    double sum = 0.0;
    for (int j1 = k1; j1 < n1; ++j1) {
        double f1 = falling(j1, k1) * std::pow(x1, j1 - k1);
        if (f1 == 0.0) continue;
        for (int j2 = k2; j2 < n2; ++j2) {
            double v = at(j1, j2);
            if (v == 0.0) continue;
            sum += v * f1 * falling(j2, k2) * std::pow(x2, j2 - k2);
        }
    }
    return sum;
}

//----------------------------------------------------------------------------
// Operators
//----------------------------------------------------------------------------

Operator2D Operator2D::make(int order) {
    Operator2D op;
    op.order = order;
    op.coeffs.assign(static_cast<std::size_t>(order + 1) * (order + 1), 0.0);
    return op;
}

const char* side_name(Side s) {
    switch (s) {
        case Side::x1_max: return "x1_max";
        case Side::x1_min: return "x1_min";
        case Side::x2_max: return "x2_max";
        case Side::x2_min: return "x2_min";
    }
    return "?";
}

const char* flavor_name(Flavor f) {
    switch (f) {
        case Flavor::full: return "full";
        case Flavor::half_cosine: return "half_cosine";
        case Flavor::half_sine: return "half_sine";
        case Flavor::full_2d: return "full_2d";
        case Flavor::sine_sine: return "sine_sine";
    }
    return "?";
}

int BoundaryOperator::max_order() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.k1 + t.k2);
    return m;
}

int BoundaryOperator::parity(int axis) const {
    int par = -2;   // unset
    for (const auto& t : terms) {
        int k = axis == 0 ? t.k1 : t.k2;
        int p = k % 2;
        if (par == -2) par = p;
        else if (par != p) return -1;
    }
    return par == -2 ? 0 : par;
}

bool BoundaryOperator::pure_normal(int normal_axis) const {
    for (const auto& t : terms) {
        int tangential = normal_axis == 0 ? t.k2 : t.k1;
        if (tangential != 0) return false;
    }
    return true;
}

cd symbol_1d(const Operator1D& op, cd z) {
    cd sum = 0.0;
    cd p = 1.0;
    for (int k = 0; k <= op.order; ++k) {
        sum += op.coeff(k) * p;
        p *= z;
    }
    return sum;
}

cd symbol_2d(const Operator2D& op, cd z1, cd z2) {
    cd sum = 0.0;
    cd p1 = 1.0;
    for (int k1 = 0; k1 <= op.order; ++k1) {
        cd p2 = 1.0;
        for (int k2 = 0; k2 + k1 <= op.order; ++k2) {
            double a = op.coeff(k1, k2);
            if (a != 0.0) sum += a * p1 * p2;
            p2 *= z2;
        }
        p1 *= z1;
    }
    return sum;
}

RealPoly1 apply_operator(const Operator1D& op, const RealPoly1& p) {
    RealPoly1 out;
    out.c.assign(p.c.size(), 0.0);
    for (int k = 0; k <= op.order; ++k) {
        double a = op.coeff(k);
        if (a == 0.0) continue;
        for (int j = k; j < static_cast<int>(p.c.size()); ++j)
            out.c[static_cast<std::size_t>(j - k)] += a * falling(j, k) * p.c[static_cast<std::size_t>(j)];
    }
    return out;
}

RealPoly2 apply_operator(const Operator2D& op, const RealPoly2& p) {
    RealPoly2 out = RealPoly2::zeros(p.n1, p.n2);
    for (int k1 = 0; k1 <= op.order; ++k1)
        for (int k2 = 0; k2 + k1 <= op.order; ++k2) {
            double a = op.coeff(k1, k2);
            if (a == 0.0) continue;
            for (int j1 = k1; j1 < p.n1; ++j1)
                for (int j2 = k2; j2 < p.n2; ++j2) {
                    double v = p.at(j1, j2);
                    if (v == 0.0) continue;
                    out.at(j1 - k1, j2 - k2) += a * falling(j1, k1) * falling(j2, k2) * v;
                }
        }
    return out;
}

//----------------------------------------------------------------------------
// Validation
//----------------------------------------------------------------------------

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    fail_validation(path + ": " + what);
}

void check_domain(const ProblemSpec& s) {
    const Domain& d = s.domain;
    if (!(d.a > 0.0)) bad("/domain/a", "must be positive");
    if (d.is_2d() && !(d.b > 0.0)) bad("/domain/b", "must be positive");

    DomainKind want;
    switch (s.flavor) {
        case Flavor::full: want = DomainKind::interval_symmetric; break;
        case Flavor::half_cosine:
        case Flavor::half_sine: want = DomainKind::interval; break;
        case Flavor::full_2d: want = DomainKind::rect_symmetric; break;
        case Flavor::sine_sine: want = DomainKind::rect; break;
        default: bad("/flavor", "unknown flavor");
    }
    if (d.kind != want)
        bad("/domain/kind", std::string("incompatible with flavor '") + flavor_name(s.flavor) + "'");
}

int check_operator(const ProblemSpec& s) {
    const bool two_d = s.domain.is_2d();
    if (two_d) {
        if (!s.op2) bad("/operator", "2D problem requires a 2D operator");
        const Operator2D& op = *s.op2;
        if (op.order < 2 || op.order % 2 != 0)
            bad("/operator/order", "must be a positive even integer");
        if (op.coeff(op.order, 0) == 0.0)
            bad("/operator", "leading coefficient a_{2r,0} must be nonzero");
        if (op.coeff(0, op.order) == 0.0)
            bad("/operator", "leading coefficient a_{0,2r} must be nonzero");
        for (int k1 = 0; k1 <= op.order; ++k1)
            for (int k2 = 0; k2 <= op.order; ++k2) {
                if (op.coeff(k1, k2) != 0.0 && k1 + k2 > op.order)
                    bad("/operator", "coefficient above the total-order bound");
                if (s.flavor == Flavor::sine_sine && op.coeff(k1, k2) != 0.0 &&
                    (k1 % 2 != 0 || k2 % 2 != 0))
                    bad("/operator", "sine_sine flavor requires even-even derivative orders only");
            }
        return op.r();
    }
    if (!s.op1) bad("/operator", "1D problem requires a 1D operator");
    const Operator1D& op = *s.op1;
    if (op.order < 2 || op.order % 2 != 0)
        bad("/operator/order", "must be a positive even integer");
    if (static_cast<int>(op.coeffs.size()) != op.order + 1)
        bad("/operator/coeffs", "length must equal order + 1");
    if (op.coeff(op.order) == 0.0)
        bad("/operator", "leading coefficient a_{2r} must be nonzero");
    if (s.flavor == Flavor::half_cosine || s.flavor == Flavor::half_sine)
        for (int k = 1; k <= op.order; k += 2)
            if (op.coeff(k) != 0.0)
                bad("/operator", "half-range flavors require even derivative orders only");
    return op.r();
}

void check_truncation(const ProblemSpec& s) {
    if (s.trunc.M < 1) bad("/truncation/M", "must be >= 1");
    if (s.domain.is_2d() && s.trunc.N < 1) bad("/truncation/N", "must be >= 1");
}

void check_bc_parity(const ProblemSpec& s, Side side, const BoundaryOperator& op,
                     const std::string& path) {
    // Half-range and sine-sine flavors admit only pure-parity operators per
    // axis; the full-range flavors admit any orders <= 2r-1.
    if (s.flavor == Flavor::half_cosine || s.flavor == Flavor::half_sine) {
        if (op.parity(0) == -1)
            bad(path, "half-range flavors require all derivative orders of one parity");
    } else if (s.flavor == Flavor::sine_sine) {
        if (op.parity(0) == -1 || op.parity(1) == -1)
            bad(path, "sine_sine flavor requires pure derivative parity per axis");
    }
    (void)side;
}

void check_bcs(const ProblemSpec& s, int r) {
    const bool two_d = s.domain.is_2d();
    const int order_cap = 2 * r - 1;

    Side needed1[2] = {Side::x1_max, Side::x1_min};
    Side needed2[4] = {Side::x1_max, Side::x1_min, Side::x2_max, Side::x2_min};
    const Side* needed = two_d ? needed2 : needed1;
    const int n_sides = two_d ? 4 : 2;

    for (int i = 0; i < 4; ++i) {
        Side sd = static_cast<Side>(i);
        bool required = false;
        for (int j = 0; j < n_sides; ++j) required |= (needed[j] == sd);
        const auto& conds = s.bcs.on(sd);
        std::string path = std::string("/bcs/") + side_name(sd);
        if (!required) {
            if (!conds.empty()) bad(path, "side not present in this domain");
            continue;
        }
        if (static_cast<int>(conds.size()) != r)
            bad(path, "expected exactly r = " + std::to_string(r) + " boundary operators");
        for (std::size_t l = 0; l < conds.size(); ++l) {
            const BoundaryCondition& bc = conds[l];
            std::string cpath = path + "/" + std::to_string(l);
            if (bc.op.terms.empty()) bad(cpath, "empty boundary operator");
            if (bc.op.max_order() > order_cap)
                bad(cpath, "derivative order exceeds 2r-1");
            if (!two_d)
                for (const auto& t : bc.op.terms)
                    if (t.k2 != 0) bad(cpath, "1D boundary operator cannot involve x2");
            check_bc_parity(s, sd, bc.op, cpath);
            if (!bc.g.valid()) bad(cpath + "/g", "missing boundary data");
        }
    }
}

void check_forcing(const ProblemSpec& s) {
    if (s.domain.is_2d()) {
        if (!s.forcing.f2.valid()) bad("/forcing/f", "missing forcing term");
    } else {
        if (!s.forcing.f1.valid()) bad("/forcing/f", "missing forcing term");
    }
}

} // namespace

ValidatedProblem validate(const ProblemSpec& spec) {
    check_domain(spec);
    int r = check_operator(spec);
    check_truncation(spec);
    check_bcs(spec, r);
    check_forcing(spec);
    return ValidatedProblem{spec, r};
}

} // namespace fsm
