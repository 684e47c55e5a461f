#include "doctest.h"

#include "fsm/errors.hpp"
#include "fsm/series1d.hpp"
#include "fsm/series2d.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using fsm::Flavor;
using fsm::Sampler1D;

namespace {

constexpr double pi = std::numbers::pi;

// Stable two-exponential form of sinh(alpha (a - x)) / sinh(alpha a); safe
// for alpha a up to hundreds where sinh overflows.
Sampler1D layer_exact(double alpha, double a) {
    return Sampler1D::from_function(
        [alpha, a](double x, int k) {
            double den = 1.0 - std::exp(-2.0 * alpha * a);
            double t1 = std::pow(-alpha, k) * std::exp(-alpha * x);
            double t2 = std::pow(alpha, k) * std::exp(-alpha * (2.0 * a - x));
            return (t1 - t2) / den;
        },
        "two-sided decaying layer");
}

fsm::ProblemSpec layer_problem(double alpha, double a, int M) {
    fsm::ProblemSpec spec;
    spec.domain = {fsm::DomainKind::interval, a, 0.0};
    fsm::Operator1D op;
    op.order = 2;
    op.coeffs = {-alpha * alpha, 0.0, 1.0};
    spec.op1 = op;
    spec.flavor = Flavor::half_sine;
    spec.trunc.M = M;
    spec.forcing.f1 = Sampler1D::from_constant(0.0);
    fsm::BoundaryCondition bc_lo;
    bc_lo.op.terms = {{0, 0, 1.0}};
    bc_lo.g = Sampler1D::from_constant(1.0);
    spec.bcs.on(fsm::Side::x1_min).push_back(bc_lo);
    fsm::BoundaryCondition bc_hi;
    bc_hi.op.terms = {{0, 0, 1.0}};
    bc_hi.g = Sampler1D::from_constant(0.0);
    spec.bcs.on(fsm::Side::x1_max).push_back(bc_hi);
    return spec;
}

double sup_rel_error(const fsm::CompositeSolution1D& sol, const Sampler1D& exact,
                     double lo, double hi, int k = 0) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= 100; ++i) {
        double x = lo + (hi - lo) * i / 100.0;
        num = std::max(num, std::abs(sol.eval(x, k) - exact(x, k)));
        den = std::max(den, std::abs(exact(x, k)));
    }
    return num / (den > 0.0 ? den : 1.0);
}

} // namespace

TEST_CASE("series eval matches explicit trig sums including derivatives") {
    fsm::FourierSeries1D s = fsm::FourierSeries1D::zero(Flavor::full, 1.0, 1);
    s.ccos = {2.0, 1.0};
    s.csin = {3.0};
    for (double x : {-0.7, 0.0, 0.3}) {
        double want = 1.0 + std::cos(pi * x) + 3.0 * std::sin(pi * x);
        CHECK(std::abs(s.eval(x, 0) - want) < 1e-14);
        double want1 = -pi * std::sin(pi * x) + 3.0 * pi * std::cos(pi * x);
        CHECK(std::abs(s.eval(x, 1) - want1) < 1e-13);
        double want2 = -pi * pi * std::cos(pi * x) - 3.0 * pi * pi * std::sin(pi * x);
        CHECK(std::abs(s.eval(x, 2) - want2) < 1e-12);
    }
    // the constant term carries weight 1/2 and dies under differentiation
    fsm::FourierSeries1D c = fsm::FourierSeries1D::zero(Flavor::half_cosine, 2.0, 0);
    c.ccos = {5.0};
    CHECK(c.eval(0.4, 0) == doctest::Approx(2.5));
    CHECK(c.eval(0.4, 1) == 0.0);
}

TEST_CASE("sine coefficients of x match the closed form 2a(-1)^(m+1)/(m pi)") {
    const double a = 2.0;
    Sampler1D f = Sampler1D::from_expression("x1");
    fsm::FourierSeries1D s = fsm::fourier_coeffs_1d(f, a, 5, Flavor::half_sine);
    for (int m = 1; m <= 5; ++m) {
        double want = 2.0 * a * (m % 2 == 1 ? 1.0 : -1.0) / (m * pi);
        CHECK(std::abs(s.csin[static_cast<std::size_t>(m - 1)] - want) < 1e-12);
    }
}

TEST_CASE("cosine coefficients of x^2 match the closed form") {
    const double a = 1.5;
    Sampler1D f = Sampler1D::from_expression("x1^2");
    fsm::FourierSeries1D s = fsm::fourier_coeffs_1d(f, a, 4, Flavor::half_cosine);
    CHECK(std::abs(s.ccos[0] - 2.0 * a * a / 3.0) < 1e-12);
    for (int m = 1; m <= 4; ++m) {
        double want = 4.0 * a * a * (m % 2 == 0 ? 1.0 : -1.0) / (m * pi * m * pi);
        CHECK(std::abs(s.ccos[static_cast<std::size_t>(m)] - want) < 1e-12);
    }
}

TEST_CASE("full-range coefficients of exp(x) match the closed form") {
    Sampler1D f = Sampler1D::from_expression("exp(x1)");
    fsm::FourierSeries1D s = fsm::fourier_coeffs_1d(f, 1.0, 4, Flavor::full);
    const double sh = std::sinh(1.0);
    for (int m = 0; m <= 4; ++m) {
        double sign = m % 2 == 0 ? 1.0 : -1.0;
        double den = 1.0 + m * pi * m * pi;
        CHECK(std::abs(s.ccos[static_cast<std::size_t>(m)] - sign * 2.0 * sh / den) < 1e-12);
        if (m >= 1)
            CHECK(std::abs(s.csin[static_cast<std::size_t>(m - 1)] +
                           sign * 2.0 * m * pi * sh / den) < 1e-12);
    }
}

TEST_CASE("particular coefficients divide by the symbol mode by mode") {
    fsm::Operator1D op;
    op.order = 2;
    op.coeffs = {-4.0, 0.0, 1.0};      // u'' - 4u
    Sampler1D f = Sampler1D::from_expression("sin(3*pi*x1)");
    fsm::FourierSeries1D s = fsm::particular_coeffs_1d(op, f, 1.0, 5, Flavor::half_sine);
    double sigma = -9.0 * pi * pi - 4.0;
    for (int m = 1; m <= 5; ++m) {
        double want = m == 3 ? 1.0 / sigma : 0.0;
        CHECK(std::abs(s.csin[static_cast<std::size_t>(m - 1)] - want) < 1e-12);
    }
}

TEST_CASE("a vanishing symbol on a retained mode raises resonance") {
    fsm::Operator1D op;
    op.order = 2;
    op.coeffs = {pi * pi, 0.0, 1.0};   // u'' + pi^2 u, resonant with mode 1 on [0,1]
    Sampler1D f = Sampler1D::from_constant(1.0);
    try {
        fsm::particular_coeffs_1d(op, f, 1.0, 3, Flavor::half_sine);
        FAIL("expected resonance");
    } catch (const fsm::Error& e) {
        CHECK(e.code() == fsm::ErrorCode::resonance);
        CHECK(std::string(e.what()).find("mode 1") != std::string::npos);
    }
}

TEST_CASE("normalized boundary basis columns are sinh ratios for u'' - alpha^2 u") {
    fsm::Operator1D op;
    op.order = 2;
    op.coeffs = {-4.0, 0.0, 1.0};
    fsm::Domain dom{fsm::DomainKind::interval, 1.0, 0.0};
    fsm::BoundaryTemplate1D tpl = fsm::build_boundary_basis_1d(op, dom, Flavor::half_sine);
    REQUIRE(tpl.r == 1);
    // column 0 carries unit data at x = a, column 1 at x = 0
    for (double x : {0.0, 0.25, 0.6, 1.0}) {
        auto row = tpl.row(x, 0);
        double w0 = std::sinh(2.0 * x) / std::sinh(2.0);
        double w1 = std::sinh(2.0 * (1.0 - x)) / std::sinh(2.0);
        CHECK(std::abs(row[0].real() - w0) < 1e-12);
        CHECK(std::abs(row[1].real() - w1) < 1e-12);
        CHECK(std::abs(row[0].imag()) < 1e-12);
        CHECK(std::abs(row[1].imag()) < 1e-12);
    }
}

TEST_CASE("boundary layer solutions are exact at every truncation") {
    for (double alpha : {0.01, 1.0, 10.0, 100.0}) {
        Sampler1D exact = layer_exact(alpha, 1.0);
        for (int M : {1, 4, 16}) {
            auto p = fsm::validate(layer_problem(alpha, 1.0, M));
            fsm::CompositeSolution1D sol = fsm::solve_1d(p);
            CHECK(sup_rel_error(sol, exact, 0.0, 1.0) < 1e-9);
            CHECK(sol.bc_residual < 1e-8 * 2.0);
        }
    }
}

TEST_CASE("polynomial forcing routed through the supplementary part is exact") {
    // L = d^2/dx^2 - 1, u = x^3, f = 6x - x^3 declared as polynomial forcing
    fsm::ProblemSpec spec;
    spec.domain = {fsm::DomainKind::interval, 1.0, 0.0};
    fsm::Operator1D op;
    op.order = 2;
    op.coeffs = {-1.0, 0.0, 1.0};
    spec.op1 = op;
    spec.flavor = Flavor::half_sine;
    spec.trunc.M = 8;
    spec.forcing.f1 = Sampler1D::from_expression("6*x1 - x1^3");
    spec.forcing.fs1 = fsm::RealPoly1{{0.0, 6.0, 0.0, -1.0}};
    fsm::BoundaryCondition lo, hi;
    lo.op.terms = {{0, 0, 1.0}};
    lo.g = Sampler1D::from_constant(0.0);
    hi.op.terms = {{0, 0, 1.0}};
    hi.g = Sampler1D::from_constant(1.0);
    spec.bcs.on(fsm::Side::x1_min).push_back(lo);
    spec.bcs.on(fsm::Side::x1_max).push_back(hi);

    fsm::CompositeSolution1D sol = fsm::solve_1d(fsm::validate(spec));
    REQUIRE(sol.phis.has_value());
    for (int i = 0; i <= 20; ++i) {
        double x = i / 20.0;
        CHECK(std::abs(sol.eval(x, 0) - x * x * x) < 1e-9);
        CHECK(std::abs(sol.eval(x, 1) - 3.0 * x * x) < 1e-8);
    }
}

TEST_CASE("band-limited data is reproduced exactly on the full-range flavor") {
    Sampler1D u = Sampler1D::from_expression("cos(3*pi*x1) + 0.5*sin(pi*x1)");
    fsm::ProblemSpec spec;
    spec.domain = {fsm::DomainKind::interval_symmetric, 1.0, 0.0};
    fsm::Operator1D op;
    op.order = 2;
    op.coeffs = {-4.0, 0.0, 1.0};
    spec.op1 = op;
    spec.flavor = Flavor::full;
    spec.trunc.M = 4;
    spec.forcing.f1 = Sampler1D::from_function(
        [u](double x, int k) { return u(x, k + 2) - 4.0 * u(x, k); }, "L applied to data");
    for (auto [side, xs] : {std::pair{fsm::Side::x1_min, -1.0}, {fsm::Side::x1_max, 1.0}}) {
        fsm::BoundaryCondition bc;
        bc.op.terms = {{0, 0, 1.0}};
        bc.g = Sampler1D::from_constant(u(xs, 0));
        spec.bcs.on(side).push_back(bc);
    }
    fsm::CompositeSolution1D sol = fsm::solve_1d(fsm::validate(spec));
    Sampler1D exact = u;
    CHECK(sup_rel_error(sol, exact, -1.0, 1.0, 0) < 1e-9);
    CHECK(sup_rel_error(sol, exact, -1.0, 1.0, 1) < 1e-9);
    // periodic composite: jumps of the solution across the ends stay zero
    for (int k = 0; k <= 1; ++k)
        CHECK(std::abs(sol.eval(1.0, k) - sol.eval(-1.0, k)) < 1e-9);
}

TEST_CASE("the coupled cos/sin division handles odd-order terms") {
    // u'' + u' - u with band-limited data exercises the off-diagonal blocks
    Sampler1D u = Sampler1D::from_expression("sin(pi*x1) + cos(2*pi*x1)");
    fsm::ProblemSpec spec;
    spec.domain = {fsm::DomainKind::interval_symmetric, 1.0, 0.0};
    fsm::Operator1D op;
    op.order = 2;
    op.coeffs = {-1.0, 1.0, 1.0};
    spec.op1 = op;
    spec.flavor = Flavor::full;
    spec.trunc.M = 3;
    spec.forcing.f1 = Sampler1D::from_function(
        [u](double x, int k) { return u(x, k + 2) + u(x, k + 1) - u(x, k); },
        "L applied to data");
    for (auto [side, xs] : {std::pair{fsm::Side::x1_min, -1.0}, {fsm::Side::x1_max, 1.0}}) {
        fsm::BoundaryCondition bc;
        bc.op.terms = {{0, 0, 1.0}};
        bc.g = Sampler1D::from_constant(u(xs, 0));
        spec.bcs.on(side).push_back(bc);
    }
    fsm::CompositeSolution1D sol = fsm::solve_1d(fsm::validate(spec));
    CHECK(sup_rel_error(sol, u, -1.0, 1.0, 0) < 1e-9);
}

TEST_CASE("baseline interpolant matches the flavor data of the sample") {
    Sampler1D u = Sampler1D::from_expression("exp(x1)");
    fsm::CompositeSolution1D b1 = fsm::baseline_poly_approx(u, 1, 1.0, 4, Flavor::half_sine);
    REQUIRE(b1.phis.has_value());
    CHECK(std::abs(b1.phis->eval(0.0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(b1.phis->eval(1.0, 0) - std::exp(1.0)) < 1e-12);

    fsm::CompositeSolution1D b2 = fsm::baseline_poly_approx(u, 2, 1.0, 4, Flavor::half_sine);
    for (double x : {0.0, 1.0})
        for (int k : {0, 2})
            CHECK(std::abs(b2.phis->eval(x, k) - std::exp(x)) < 1e-10);

    // half-cosine baselines interpolate odd end derivatives instead
    fsm::CompositeSolution1D b3 = fsm::baseline_poly_approx(u, 1, 1.0, 4, Flavor::half_cosine);
    CHECK(std::abs(b3.phis->eval(0.0, 1) - 1.0) < 1e-12);
    CHECK(std::abs(b3.phis->eval(1.0, 1) - std::exp(1.0)) < 1e-12);
}

TEST_CASE("baseline error curves fall with M but stall for stiff layers") {
    const std::vector<int> Ms = {8, 16, 32, 64, 128};
    auto curve_for = [&](double alpha) {
        Sampler1D u = layer_exact(alpha, 1.0);
        return fsm::error_curve(
            u,
            [&, u](int M) { return fsm::baseline_poly_approx(u, 1, 1.0, M, Flavor::half_sine); },
            0, Ms, 0.0, 1.0);
    };
    fsm::ErrorCurve mild = curve_for(0.01);
    fsm::ErrorCurve unit = curve_for(1.0);
    fsm::ErrorCurve stiff = curve_for(100.0);

    for (const fsm::ErrorCurve* c : {&mild, &unit}) {
        REQUIRE(c->points.size() == Ms.size());
        for (std::size_t i = 1; i < c->points.size(); ++i)
            CHECK(c->points[i].second < c->points[i - 1].second);
        CHECK(c->points.back().second > 1e-13);   // above the noise floor
    }
    // the stiff layer pins the error orders of magnitude above the smooth case
    CHECK(stiff.points.back().second > 1e3 * unit.points.back().second);
}

TEST_CASE("validation guards of the evaluation helpers") {
    auto p = fsm::validate(layer_problem(1.0, 1.0, 4));
    fsm::CompositeSolution1D sol = fsm::solve_1d(p);
    CHECK(std::abs(fsm::eval_1d(sol, 0.5, 2) - sol.eval(0.5, 2)) == 0.0);
    CHECK_THROWS_AS((void)fsm::eval_1d(sol, 0.5, 3), fsm::Error);

    Sampler1D u = layer_exact(1.0, 1.0);
    CHECK_THROWS_AS(
        (void)fsm::error_curve(
            u, [&](int M) { return fsm::baseline_poly_approx(u, 1, 1.0, M, Flavor::half_sine); },
            0, {8, 8}, 0.0, 1.0),
        fsm::Error);
}
