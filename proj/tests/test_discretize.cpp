//============================================================================
// Global discretization: fcc and collocation assembly, corner data
// derivation, the equivalent boundary-data transform, and the drivers.
//============================================================================

#include "doctest.h"

#include "fsm/discretize.hpp"
#include "fsm/errors.hpp"

#include <cmath>
#include <random>
#include <tuple>

using namespace fsm;

namespace {

double tcos(double w, double x, int k) {
    return std::pow(w, k) * std::cos(w * x + k * M_PI / 2.0);
}
double tsin(double w, double x, int k) {
    return std::pow(w, k) * std::sin(w * x + k * M_PI / 2.0);
}

Operator2D make_op(int order, std::initializer_list<std::tuple<int, int, double>> terms) {
    Operator2D op = Operator2D::make(order);
    for (const auto& [k1, k2, a] : terms) op.set(k1, k2, a);
    return op;
}

BoundaryCondition value_bc(Sampler1D g, double coeff = 1.0) {
    BoundaryCondition bc;
    bc.op.terms.push_back({0, 0, coeff});
    bc.g = std::move(g);
    return bc;
}

// Dirichlet sine-sine problem on [0,a] x [0,b].
ValidatedProblem sine_problem(Operator2D op, double a, double b, int M, int N,
                              Sampler2D f, Sampler1D g_x1max, Sampler1D g_x1min,
                              Sampler1D g_x2max, Sampler1D g_x2min) {
    ProblemSpec s;
    s.domain = {DomainKind::rect, a, b};
    s.op2 = std::move(op);
    s.flavor = Flavor::sine_sine;
    s.trunc = {M, N};
    s.forcing.f2 = std::move(f);
    s.bcs.on(Side::x1_max).push_back(value_bc(std::move(g_x1max)));
    s.bcs.on(Side::x1_min).push_back(value_bc(std::move(g_x1min)));
    s.bcs.on(Side::x2_max).push_back(value_bc(std::move(g_x2max)));
    s.bcs.on(Side::x2_min).push_back(value_bc(std::move(g_x2min)));
    return validate(s);
}

double sup_error_2d(const CompositeSolution2D& sol,
                    const std::function<double(double, double)>& exact, double x1_lo,
                    double x1_hi, double x2_lo, double x2_hi, int n = 13) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x1 = x1_lo + (x1_hi - x1_lo) * i / (n - 1);
            const double x2 = x2_lo + (x2_hi - x2_lo) * j / (n - 1);
            worst = std::max(worst, std::abs(sol.eval(x1, x2) - exact(x1, x2)));
        }
    return worst;
}

} // namespace

//----------------------------------------------------------------------------

TEST_CASE("solve_global handles square, diagonal and least-squares systems") {
    GlobalSystem sys;
    sys.A = DenseMatrix::identity(4);
    sys.rhs = {cd(1, 0), cd(2, 1), cd(-3, 0), cd(0, 4)};
    GlobalSolveResult r = solve_global(sys);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(r.q[i] - sys.rhs[i]) < 1e-14);
    CHECK(r.residual < 1e-13);
    CHECK_FALSE(r.ill_conditioned);

    GlobalSystem d;
    d.A = DenseMatrix(2, 2);
    d.A(0, 0) = 2.0;
    d.A(1, 1) = 3.0;
    d.rhs = {cd(2, 0), cd(6, 0)};
    r = solve_global(d);
    CHECK(std::abs(r.q[0] - 1.0) < 1e-14);
    CHECK(std::abs(r.q[1] - 2.0) < 1e-14);

    // random diagonally dominant square system: residual at roundoff
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    GlobalSystem rs;
    rs.A = DenseMatrix(50, 50);
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) rs.A(i, j) = cd(uni(rng), uni(rng));
        rs.A(i, i) += 10.0;
    }
    rs.rhs.resize(50);
    for (auto& v : rs.rhs) v = cd(uni(rng), uni(rng));
    r = solve_global(rs);
    double bn = 0.0;
    for (const cd& v : rs.rhs) bn += std::norm(v);
    CHECK(r.residual <= 1e-10 * std::sqrt(bn));
    CHECK_FALSE(r.ill_conditioned);

    // consistent rectangular system recovers the generating vector
    GlobalSystem ls;
    ls.A = DenseMatrix(60, 40);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 40; ++j) ls.A(i, j) = cd(uni(rng), uni(rng)) + (i == j ? 5.0 : 0.0);
    std::vector<cd> x0(40);
    for (auto& v : x0) v = cd(uni(rng), uni(rng));
    ls.rhs.assign(60, cd(0.0));
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 40; ++j) ls.rhs[i] += ls.A(i, j) * x0[j];
    r = solve_global(ls);
    for (int j = 0; j < 40; ++j) CHECK(std::abs(r.q[j] - x0[j]) < 1e-9);
}

TEST_CASE("corner data derivation, sine-sine flavor") {
    // r = 1: plain corner values from the Dirichlet data
    auto u = [](double x1, double x2) { return std::exp(x1) * (x2 * x2 + 1.0); };
    const double a = 1.5, b = 1.0;
    auto gx1 = [u](double x1c) {
        return Sampler1D::from_function(
            [u, x1c](double t, int k) {
                switch (k) {
                    case 0: return std::exp(x1c) * (t * t + 1.0);
                    case 1: return std::exp(x1c) * 2.0 * t;
                    case 2: return std::exp(x1c) * 2.0;
                    default: return 0.0;
                }
            },
            "side data");
    };
    auto gx2 = [u](double x2c) {
        return Sampler1D::from_function(
            [x2c](double t, int k) { return std::exp(t) * (x2c * x2c + 1.0); },
            "side data");
    };
    ProblemSpec s;
    s.domain = {DomainKind::rect, a, b};
    s.op2 = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {0, 0, 1.0}});
    s.flavor = Flavor::sine_sine;
    s.trunc = {4, 4};
    s.forcing.f2 = Sampler2D::from_constant(0.0);
    s.bcs.on(Side::x1_max).push_back(value_bc(gx1(a)));
    s.bcs.on(Side::x1_min).push_back(value_bc(gx1(0.0)));
    s.bcs.on(Side::x2_max).push_back(value_bc(gx2(b)));
    s.bcs.on(Side::x2_min).push_back(value_bc(gx2(0.0)));
    ValidatedProblem p = validate(s);

    SineCornerData data = derive_corner_data_sine(p);
    for (int e1 = 0; e1 < 2; ++e1)
        for (int e2 = 0; e2 < 2; ++e2)
            CHECK(data.at(e1, e2, 0, 0) ==
                  doctest::Approx(u(e1 ? a : 0.0, e2 ? b : 0.0)).epsilon(1e-12));

    // r = 2 with value + second-normal-derivative conditions: derived corner
    // values match the closed-form derivatives of u = cos(x1 + 2 x2)
    ProblemSpec s2;
    s2.domain = {DomainKind::rect, 1.0, 1.0};
    s2.op2 = make_op(4, {{4, 0, 1.0}, {0, 4, 1.0}, {0, 0, 1.0}});
    s2.flavor = Flavor::sine_sine;
    s2.trunc = {4, 4};
    s2.forcing.f2 = Sampler2D::from_constant(0.0);
    auto add_side = [&s2](Side sd, int normal_axis, double sc) {
        auto val = Sampler1D::from_function(
            [sc, normal_axis](double t, int k) {
                const double x1 = normal_axis == 0 ? sc : t;
                const double x2 = normal_axis == 0 ? t : sc;
                const double w = normal_axis == 0 ? 2.0 : 1.0;
                return std::pow(w, k) * std::cos(x1 + 2.0 * x2 + k * M_PI / 2.0);
            },
            "value");
        auto dd = Sampler1D::from_function(
            [sc, normal_axis](double t, int k) {
                const double x1 = normal_axis == 0 ? sc : t;
                const double x2 = normal_axis == 0 ? t : sc;
                const double w = normal_axis == 0 ? 2.0 : 1.0;
                const double amp = normal_axis == 0 ? 1.0 : 4.0;
                return -amp * std::pow(w, k) * std::cos(x1 + 2.0 * x2 + k * M_PI / 2.0);
            },
            "second derivative");
        BoundaryCondition b0;
        b0.op.terms.push_back({0, 0, 1.0});
        b0.g = val;
        BoundaryCondition b2;
        b2.op.terms.push_back(normal_axis == 0 ? BoundaryTerm{2, 0, 1.0}
                                               : BoundaryTerm{0, 2, 1.0});
        b2.g = dd;
        s2.bcs.on(sd).push_back(b0);
        s2.bcs.on(sd).push_back(b2);
    };
    add_side(Side::x1_max, 0, 1.0);
    add_side(Side::x1_min, 0, 0.0);
    add_side(Side::x2_max, 1, 1.0);
    add_side(Side::x2_min, 1, 0.0);
    ValidatedProblem p2 = validate(s2);

    SineCornerData d2 = derive_corner_data_sine(p2);
    for (int e1 = 0; e1 < 2; ++e1)
        for (int e2 = 0; e2 < 2; ++e2)
            for (int j1 = 0; j1 < 2; ++j1)
                for (int j2 = 0; j2 < 2; ++j2) {
                    const double x1 = e1 ? 1.0 : 0.0, x2 = e2 ? 1.0 : 0.0;
                    // d^{2j1}_x1 d^{2j2}_x2 cos(x1+2x2) = (-1)^{j1+j2} 4^{j2} cos
                    const double want = ((j1 + j2) % 2 ? -1.0 : 1.0) *
                                        std::pow(4.0, j2) * std::cos(x1 + 2.0 * x2);
                    CHECK(d2.at(e1, e2, j1, j2) == doctest::Approx(want).epsilon(1e-11));
                }

    // all-Neumann data leaves the corner values underivable
    ProblemSpec s3 = s;
    for (Side sd : {Side::x1_max, Side::x1_min, Side::x2_max, Side::x2_min}) {
        s3.bcs.on(sd)[0].op.terms[0] =
            (sd == Side::x1_max || sd == Side::x1_min) ? BoundaryTerm{1, 0, 1.0}
                                                       : BoundaryTerm{0, 1, 1.0};
    }
    ValidatedProblem p3 = validate(s3);
    CHECK_THROWS_WITH_AS(derive_corner_data_sine(p3),
                         doctest::Contains("cannot derive corner value"), Error);
}

TEST_CASE("corner data derivation, full-range flavor") {
    // u = exp(0.5 x1 + x2), smooth but non-periodic: double jumps against
    // the 4-point oracle
    const double a = 1.0, b = 1.0;
    ProblemSpec s;
    s.domain = {DomainKind::rect_symmetric, a, b};
    s.op2 = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {0, 0, 1.0}});
    s.flavor = Flavor::full_2d;
    s.trunc = {4, 4};
    s.forcing.f2 = Sampler2D::from_constant(0.0);
    auto side_g = [](int normal_axis, double sc) {
        return Sampler1D::from_function(
            [normal_axis, sc](double t, int k) {
                const double x1 = normal_axis == 0 ? sc : t;
                const double x2 = normal_axis == 0 ? t : sc;
                const double w = normal_axis == 0 ? 1.0 : 0.5;
                return std::pow(w, k) * std::exp(0.5 * x1 + x2);
            },
            "trace");
    };
    s.bcs.on(Side::x1_max).push_back(value_bc(side_g(0, a), 2.0));
    s.bcs.on(Side::x1_min).push_back(value_bc(side_g(0, -a), 2.0));
    s.bcs.on(Side::x2_max).push_back(value_bc(side_g(1, b), 2.0));
    s.bcs.on(Side::x2_min).push_back(value_bc(side_g(1, -b), 2.0));
    // scale the data consistently with the operator coefficient 2
    for (Side sd : {Side::x1_max, Side::x1_min, Side::x2_max, Side::x2_min}) {
        Sampler1D g0 = s.bcs.on(sd)[0].g;
        s.bcs.on(sd)[0].g = Sampler1D::from_function(
            [g0](double t, int k) { return 2.0 * g0(t, k); }, "scaled trace");
    }
    ValidatedProblem p = validate(s);

    FullCornerData data = derive_corner_data_full(p);
    auto jump_oracle = [&](int k1) {
        // x2 derivatives of exp(x2) reproduce the factor, so only the x1
        // order changes the amplitude
        auto d = [&](double x1, double x2) {
            return std::pow(0.5, k1) * std::exp(0.5 * x1 + x2);
        };
        return d(a, b) - d(a, -b) - d(-a, b) + d(-a, -b);
    };
    CHECK(data.at(0, 0) == doctest::Approx(jump_oracle(0)).epsilon(1e-12));
}

TEST_CASE("sine-sine Levy problem: fcc exact against per-harmonic oracle") {
    // -Lap u + 2 u = 0, u(1, x2) = sin(2 pi x2) + 0.3 sin(5 pi x2), other
    // sides zero.  Exact: sum of sinh profiles per harmonic.
    const double c = 2.0;
    Operator2D op = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {0, 0, c}});
    auto g_max = Sampler1D::from_function(
        [](double t, int k) { return tsin(2 * M_PI, t, k) + 0.3 * tsin(5 * M_PI, t, k); },
        "two-mode data");
    ValidatedProblem p = sine_problem(op, 1.0, 1.0, 6, 6, Sampler2D::from_constant(0.0),
                                      g_max, Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0));
    auto exact = [c](double x1, double x2) {
        const double k2 = std::sqrt(4 * M_PI * M_PI + c);
        const double k5 = std::sqrt(25 * M_PI * M_PI + c);
        return std::sinh(k2 * x1) / std::sinh(k2) * std::sin(2 * M_PI * x2) +
               0.3 * std::sinh(k5 * x1) / std::sinh(k5) * std::sin(5 * M_PI * x2);
    };

    CompositeSolution2D sol = solve_2d(p, Method::fcc);
    CHECK(sup_error_2d(sol, exact, 0.0, 1.0, 0.0, 1.0) < 1e-8);
    CHECK(sol.bc_residual < 1e-8 * 2.3);
    CHECK_FALSE(sol.ill_conditioned);

    CompositeSolution2D cl = solve_2d(p, Method::collocation);
    CHECK(sup_error_2d(cl, exact, 0.0, 1.0, 0.0, 1.0) < 1e-8);

    double agree = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double x1 = i / 100.0;
        agree = std::max(agree, std::abs(sol.eval(x1, 0.37) - cl.eval(x1, 0.37)));
    }
    CHECK(agree < 1e-7);
}

TEST_CASE("sine-sine fcc matrix block-diagonalizes per harmonic") {
    Operator2D op = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {0, 0, 1.0}});
    ValidatedProblem p = sine_problem(op, 1.0, 1.0, 4, 4, Sampler2D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0));
    const int Nb = boundary_truncation(p);
    FourierSeries2D phi0 = FourierSeries2D::zero(Flavor::sine_sine, 1.0, 1.0, 4, 4);
    BoundaryFunction2D phi1 = boundary_function_phi1(*p.spec.op2, p.spec.domain,
                                                     Flavor::sine_sine, Nb);
    BoundaryFunction2D phi2 = boundary_function_phi2(*p.spec.op2, p.spec.domain,
                                                     Flavor::sine_sine, Nb);
    GlobalSystem sys = assemble_fcc(p, phi0, RealPoly2{}, phi1, phi2, Nb);

    const std::size_t dof1 = static_cast<std::size_t>(phi1.dof());
    const double scale = sys.A.norm_max();
    // x1-side rows (first 2*Nb rows) must not touch phi2 columns, and within
    // the phi1 columns each row touches only its own harmonic's slots
    double cross = 0.0, off = 0.0;
    for (std::size_t row = 0; row < static_cast<std::size_t>(2 * Nb); ++row) {
        const std::size_t mode = row % static_cast<std::size_t>(Nb);   // harmonic - 1
        for (std::size_t c = dof1; c < sys.A.cols(); ++c)
            cross = std::max(cross, std::abs(sys.A(row, c)));
        for (std::size_t c = 0; c < dof1; ++c)
            if (c / 2 != mode)   // r = 1: two slots per harmonic
                off = std::max(off, std::abs(sys.A(row, c)));
    }
    CHECK(cross <= 1e-12 * scale);
    CHECK(off <= 1e-12 * scale);
}

TEST_CASE("full-range 2D manufactured solution: periodic part plus boundary layer") {
    // L = -Lap + d/dx1 + 2.  u = cos(pi x1) sin(pi x2) + e^{eta (x1-1)} cos(pi x2)
    // with eta the positive root of eta^2 - eta - (2 + pi^2) = 0, so the second
    // term is annihilated by L.
    const double eta = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * (2.0 + M_PI * M_PI)));
    Operator2D op = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {1, 0, 1.0}, {0, 0, 2.0}});

    auto uex = [eta](double x1, double x2, int k1, int k2) {
        return tcos(M_PI, x1, k1) * tsin(M_PI, x2, k2) +
               std::pow(eta, k1) * std::exp(eta * (x1 - 1.0)) * tcos(M_PI, x2, k2);
    };
    Sampler2D f = Sampler2D::from_function(
        [](double x1, double x2, int k1, int k2) {
            return (2.0 * M_PI * M_PI + 2.0) * tcos(M_PI, x1, k1) * tsin(M_PI, x2, k2) -
                   M_PI * tsin(M_PI, x1, k1) * tsin(M_PI, x2, k2);
        },
        "band-limited forcing");

    ProblemSpec s;
    s.domain = {DomainKind::rect_symmetric, 1.0, 1.0};
    s.op2 = op;
    s.flavor = Flavor::full_2d;
    s.trunc = {6, 6};
    s.forcing.f2 = f;
    auto side_sampler = [uex](int normal_axis, double sc) {
        return Sampler1D::from_function(
            [uex, normal_axis, sc](double t, int k) {
                return normal_axis == 0 ? uex(sc, t, 0, k) : uex(t, sc, k, 0);
            },
            "trace of u");
    };
    s.bcs.on(Side::x1_max).push_back(value_bc(side_sampler(0, 1.0)));
    s.bcs.on(Side::x1_min).push_back(value_bc(side_sampler(0, -1.0)));
    s.bcs.on(Side::x2_max).push_back(value_bc(side_sampler(1, 1.0)));
    s.bcs.on(Side::x2_min).push_back(value_bc(side_sampler(1, -1.0)));
    ValidatedProblem p = validate(s);

    CompositeSolution2D sol = solve_2d(p, Method::fcc);
    auto exact0 = [uex](double x1, double x2) { return uex(x1, x2, 0, 0); };
    CHECK(sup_error_2d(sol, exact0, -1.0, 1.0, -1.0, 1.0) < 1e-8);
    CHECK(sol.bc_residual < 1e-8 * 3.0);

    // derivative evaluation stays exact as well
    double dworst = 0.0;
    for (int i = 0; i < 9; ++i) {
        const double x1 = -0.9 + 1.8 * i / 8.0;
        dworst = std::max(dworst, std::abs(sol.eval(x1, 0.3, 1, 0) - uex(x1, 0.3, 1, 0)));
        dworst = std::max(dworst, std::abs(sol.eval(x1, -0.4, 1, 1) - uex(x1, -0.4, 1, 1)));
    }
    CHECK(dworst < 1e-6);

    CompositeSolution2D cl = solve_2d(p, Method::collocation);
    double agree = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double x1 = -1.0 + 2.0 * i / 100.0;
        agree = std::max(agree, std::abs(sol.eval(x1, 0.21) - cl.eval(x1, 0.21)));
    }
    CHECK(agree < 1e-7);
}

TEST_CASE("sine-sine with polynomial forcing and nonzero corner data converges") {
    // u = x1^2 x2^2 + sin(pi x1) sin(pi x2) under L = -Lap + 1; the polynomial
    // part is handled by the supplementary solution and the corner function,
    // the rest by the series.
    Operator2D op = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {0, 0, 1.0}});
    auto uex = [](double x1, double x2) {
        return x1 * x1 * x2 * x2 + std::sin(M_PI * x1) * std::sin(M_PI * x2);
    };
    Sampler2D f = Sampler2D::from_function(
        [](double x1, double x2, int k1, int k2) {
            double poly = 0.0;
            if (k1 == 0 && k2 == 0)
                poly = -2.0 * x2 * x2 - 2.0 * x1 * x1 + x1 * x1 * x2 * x2;
            return poly + (2.0 * M_PI * M_PI + 1.0) * tsin(M_PI, x1, k1) * tsin(M_PI, x2, k2);
        },
        "forcing");
    RealPoly2 fs = RealPoly2::zeros(3, 3);
    fs.at(0, 2) = -2.0;
    fs.at(2, 0) = -2.0;
    fs.at(2, 2) = 1.0;

    auto gx1 = [](double sc) {
        return Sampler1D::from_function(
            [sc](double t, int k) {
                const double p = sc * sc;
                const double poly = k == 0 ? p * t * t : (k == 1 ? 2 * p * t : (k == 2 ? 2 * p : 0.0));
                return poly + std::sin(M_PI * sc) * tsin(M_PI, t, k);
            },
            "side");
    };

    auto make = [&](int M, bool with_fs) {
        ProblemSpec s;
        s.domain = {DomainKind::rect, 1.0, 1.0};
        s.op2 = op;
        s.flavor = Flavor::sine_sine;
        s.trunc = {M, M};
        s.forcing.f2 = f;
        if (with_fs) s.forcing.fs2 = fs;
        s.bcs.on(Side::x1_max).push_back(value_bc(gx1(1.0)));
        s.bcs.on(Side::x1_min).push_back(value_bc(gx1(0.0)));
        s.bcs.on(Side::x2_max).push_back(value_bc(gx1(1.0)));   // u symmetric in x1<->x2
        s.bcs.on(Side::x2_min).push_back(value_bc(gx1(0.0)));
        return validate(s);
    };

    // With the polynomial forcing split off, phis = x1^2 x2^2 exactly, the
    // corner polynomial absorbs nothing extra, and the series part is the
    // single retained mode: exact at any truncation.
    CompositeSolution2D exact_sol = solve_2d(make(6, true), Method::fcc);
    CHECK(exact_sol.phis.has_value());
    CHECK(sup_error_2d(exact_sol, uex, 0.0, 1.0, 0.0, 1.0) < 1e-12);
    CHECK(exact_sol.bc_residual < 1e-12);

    // Without it the series chases the polynomial at an algebraic rate.
    std::vector<double> errs;
    for (int M : {6, 12, 24}) {
        CompositeSolution2D sol = solve_2d(make(M, false), Method::fcc);
        errs.push_back(sup_error_2d(sol, uex, 0.0, 1.0, 0.0, 1.0));
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
    CHECK(errs[2] < 2e-4);
}

TEST_CASE("sine-sine discretization rejects odd tangential derivative orders") {
    Operator2D op = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {0, 0, 1.0}});
    ProblemSpec s;
    s.domain = {DomainKind::rect, 1.0, 1.0};
    s.op2 = op;
    s.flavor = Flavor::sine_sine;
    s.trunc = {4, 4};
    s.forcing.f2 = Sampler2D::from_constant(0.0);
    s.bcs.on(Side::x1_max).push_back(value_bc(Sampler1D::from_constant(0.0)));
    s.bcs.on(Side::x1_min).push_back(value_bc(Sampler1D::from_constant(0.0)));
    s.bcs.on(Side::x2_max).push_back(value_bc(Sampler1D::from_constant(0.0)));
    s.bcs.on(Side::x2_min).push_back(value_bc(Sampler1D::from_constant(0.0)));
    // tangential first derivative on an x1 side
    s.bcs.on(Side::x1_max)[0].op.terms[0] = {0, 1, 1.0};
    ValidatedProblem p = validate(s);
    CHECK_THROWS_WITH_AS(solve_2d(p, Method::fcc),
                         doctest::Contains("even tangential"), Error);
}

TEST_CASE("collocation is stable under point doubling") {
    Operator2D op = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {0, 0, 2.0}});
    auto g_max = Sampler1D::from_function([](double t, int k) { return tsin(2 * M_PI, t, k); },
                                          "one-mode data");
    ValidatedProblem p = sine_problem(op, 1.0, 1.0, 6, 6, Sampler2D::from_constant(0.0),
                                      g_max, Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0));
    const int Nb = boundary_truncation(p);
    FourierSeries2D phi0 = FourierSeries2D::zero(Flavor::sine_sine, 1.0, 1.0, 6, 6);
    BoundaryFunction2D phi1 = boundary_function_phi1(*p.spec.op2, p.spec.domain,
                                                     Flavor::sine_sine, Nb);
    BoundaryFunction2D phi2 = boundary_function_phi2(*p.spec.op2, p.spec.domain,
                                                     Flavor::sine_sine, Nb);
    GlobalSolveResult r1 =
        solve_global(assemble_collocation(p, phi0, RealPoly2{}, phi1, phi2, Nb));
    GlobalSolveResult r2 =
        solve_global(assemble_collocation(p, phi0, RealPoly2{}, phi1, phi2, Nb,
                                          4 * (Nb + 1)));
    double diff = 0.0;
    for (std::size_t i = 0; i < r1.q.size(); ++i)
        diff = std::max(diff, std::abs(r1.q[i] - r2.q[i]));
    CHECK(diff < 1e-8);
}

TEST_CASE("equivalent transform: round trip and dual representation (2D)") {
    Operator2D op = make_op(2, {{2, 0, -1.0}, {0, 2, -1.0}, {0, 0, 2.0}});
    auto g_max = Sampler1D::from_function([](double t, int k) { return tsin(2 * M_PI, t, k); },
                                          "one-mode data");
    ValidatedProblem p = sine_problem(op, 1.0, 1.0, 4, 4, Sampler2D::from_constant(0.0),
                                      g_max, Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0),
                                      Sampler1D::from_constant(0.0));
    CompositeSolution2D sol = solve_2d(p, Method::fcc);

    EquivalentTransform t = equivalent_transform(p, sol);
    CHECK(t.cond < 1e10);
    std::vector<cd> q = packed_q12(sol);
    std::vector<cd> qb = boundary_trace_coeffs(t, sol);
    std::vector<cd> qr = recover_q12(t, qb);
    double qmax = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        qmax = std::max(qmax, std::abs(q[i]));
        diff = std::max(diff, std::abs(q[i] - qr[i]));
    }
    CHECK(diff <= 1e-12 * (1.0 + qmax));

    // random consistent constants: the trace representation evaluates to the
    // same function as the direct composite
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    CompositeSolution2D rsol = sol;
    for (ScalarHarmonic& h : rsol.phi1.scalars)
        for (cd& v : h.q) v = uni(rng);
    for (ScalarHarmonic& h : rsol.phi2.scalars)
        for (cd& v : h.q) v = uni(rng);
    std::vector<cd> qb2 = boundary_trace_coeffs(t, rsol);
    double scale = 0.0;
    for (const cd& v : qb2) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < 7; ++i) {
        const double x1 = 0.05 + 0.9 * i / 6.0;
        const double x2 = 0.93 - 0.88 * i / 6.0;
        const double via_traces = dual_eval(t, rsol, qb2, x1, x2);
        const double direct = rsol.eval(x1, x2);
        CHECK(std::abs(via_traces - direct) <= 1e-12 * (1.0 + scale));
    }

    // zero data, zero traces: the represented function vanishes
    CompositeSolution2D zsol = sol;
    zsol.phi0 = FourierSeries2D::zero(Flavor::sine_sine, 1.0, 1.0, 4, 4);
    zsol.phi3 = RealPoly2{};
    for (ScalarHarmonic& h : zsol.phi1.scalars)
        for (cd& v : h.q) v = 0.0;
    for (ScalarHarmonic& h : zsol.phi2.scalars)
        for (cd& v : h.q) v = 0.0;
    EquivalentTransform tz = equivalent_transform(p, zsol);
    std::vector<cd> qbz(tz.t03.size(), cd(0.0));
    CHECK(std::abs(dual_eval(tz, zsol, qbz, 0.4, 0.6)) < 1e-13);
}

TEST_CASE("equivalent transform: 1D round trip and dual evaluation") {
    ProblemSpec s;
    s.domain = {DomainKind::interval, 1.0, 0.0};
    s.op1 = Operator1D{2, {-25.0, 0.0, 1.0}};   // u'' - 25 u
    s.flavor = Flavor::half_sine;
    s.trunc = {8, 0};
    s.forcing.f1 = Sampler1D::from_constant(0.0);
    BoundaryCondition b1;
    b1.op.terms.push_back({0, 0, 1.0});
    b1.g = Sampler1D::from_constant(0.0);
    BoundaryCondition b0;
    b0.op.terms.push_back({0, 0, 1.0});
    b0.g = Sampler1D::from_constant(1.0);
    s.bcs.on(Side::x1_max).push_back(b1);
    s.bcs.on(Side::x1_min).push_back(b0);
    ValidatedProblem p = validate(s);
    CompositeSolution1D sol = solve_1d(p);

    EquivalentTransform1D t = equivalent_transform(p, sol);
    std::vector<cd> qb = boundary_trace_values(t, sol);
    // the value traces are the boundary data themselves
    CHECK(std::abs(qb[0] - 0.0) < 1e-10);
    CHECK(std::abs(qb[1] - 1.0) < 1e-10);
    std::vector<cd> qr = recover_q1(t, qb);
    double diff = 0.0, qmax = 0.0;
    for (std::size_t i = 0; i < qr.size(); ++i) {
        qmax = std::max(qmax, std::abs(sol.phi1->q1[i]));
        diff = std::max(diff, std::abs(qr[i] - sol.phi1->q1[i]));
    }
    CHECK(diff <= 1e-12 * (1.0 + qmax));
    for (double x : {0.1, 0.5, 0.95})
        CHECK(std::abs(dual_eval(t, sol, qb, x) - sol.eval(x)) < 1e-11);
}

TEST_CASE("1D problems collapse to the endpoint system for both methods") {
    ProblemSpec s;
    s.domain = {DomainKind::interval, 1.0, 0.0};
    s.op1 = Operator1D{2, {-9.0, 0.0, 1.0}};
    s.flavor = Flavor::half_sine;
    s.trunc = {6, 0};
    s.forcing.f1 = Sampler1D::from_function(
        [](double x, int) { return std::sin(M_PI * x); }, "one-mode forcing");
    BoundaryCondition hi, lo;
    hi.op.terms.push_back({0, 0, 1.0});
    hi.g = Sampler1D::from_constant(0.0);
    lo.op.terms.push_back({0, 0, 1.0});
    lo.g = Sampler1D::from_constant(1.0);
    s.bcs.on(Side::x1_max).push_back(hi);
    s.bcs.on(Side::x1_min).push_back(lo);
    ValidatedProblem p = validate(s);

    CompositeSolution1D a = solve_problem_1d(p, Method::fcc);
    CompositeSolution1D b = solve_problem_1d(p, Method::collocation);
    CompositeSolution1D c = solve_1d(p);
    for (double x : {0.0, 0.3, 0.77, 1.0}) {
        CHECK(a.eval(x) == b.eval(x));
        CHECK(a.eval(x) == c.eval(x));
    }
}
