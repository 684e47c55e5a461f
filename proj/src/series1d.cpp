//============================================================================
// series1d.cpp
//============================================================================

#include "fsm/series1d.hpp"

#include "fsm/errors.hpp"
#include "fsm/kernels.hpp"
#include "fsm/quadrature.hpp"
#include "fsm/series2d.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fsm {

namespace {

constexpr double pi = std::numbers::pi;

// d^k/dx^k cos(w x) and sin(w x); the quarter-period phase cycle.
double dcos(double w, double x, int k) {
    double amp = std::pow(w, k);
    switch (k & 3) {
        case 0: return amp * std::cos(w * x);
        case 1: return -amp * std::sin(w * x);
        case 2: return -amp * std::cos(w * x);
        default: return amp * std::sin(w * x);
    }
}

double dsin(double w, double x, int k) {
    double amp = std::pow(w, k);
    switch (k & 3) {
        case 0: return amp * std::sin(w * x);
        case 1: return amp * std::cos(w * x);
        case 2: return -amp * std::sin(w * x);
        default: return -amp * std::cos(w * x);
    }
}

double falling(int j, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= static_cast<double>(j - i);
    return r;
}

// k-th derivative of x^j at a point (monomial end data for baselines).
double monomial_deriv(int j, int k, double x) {
    if (k > j) return 0.0;
    double f = falling(j, k);
    return j == k ? f : f * std::pow(x, j - k);
}

// The (point, order, sign) functional lists that parameterize each flavor.
struct EndFunctional {
    int order;
    bool jump;      // value(hi) - value(lo) instead of a single end value
    bool at_hi;     // ignored when jump
};

std::vector<EndFunctional> flavor_functionals(int r, Flavor flavor) {
    std::vector<EndFunctional> fs;
    switch (flavor) {
        case Flavor::full:
            for (int k = 0; k < 2 * r; ++k) fs.push_back({k, true, false});
            break;
        case Flavor::half_cosine:
            for (int j = 0; j < r; ++j) fs.push_back({2 * j + 1, false, true});
            for (int j = 0; j < r; ++j) fs.push_back({2 * j + 1, false, false});
            break;
        case Flavor::half_sine:
            for (int j = 0; j < r; ++j) fs.push_back({2 * j, false, true});
            for (int j = 0; j < r; ++j) fs.push_back({2 * j, false, false});
            break;
        default:
            fail_internal("flavor_functionals: 2D flavor in 1D context");
    }
    return fs;
}

bool steep_end(const Sampler1D& f, double end, double mid) {
    double scale = std::abs(f(mid, 0)) + std::abs(f(end, 0));
    for (int k = 1; k <= 2; ++k)
        if (end_layer_detected(f(end, k), f(mid, k), scale)) return true;
    return false;
}

} // namespace

//----------------------------------------------------------------------------
// FourierSeries1D
//----------------------------------------------------------------------------

FourierSeries1D FourierSeries1D::zero(Flavor flavor, double a, int M) {
    FourierSeries1D s;
    s.flavor = flavor;
    s.a = a;
    s.M = M;
    if (flavor != Flavor::half_sine) s.ccos.assign(static_cast<std::size_t>(M) + 1, 0.0);
    if (flavor != Flavor::half_cosine) s.csin.assign(static_cast<std::size_t>(M), 0.0);
    return s;
}

double FourierSeries1D::eval(double x, int k) const {
    const double unit = pi / a;
    double acc = 0.0;
    if (!ccos.empty()) {
        if (k == 0) acc += 0.5 * ccos[0];
        for (int m = 1; m < static_cast<int>(ccos.size()); ++m)
            acc += ccos[static_cast<std::size_t>(m)] * dcos(unit * m, x, k);
    }
    for (int m = 1; m <= static_cast<int>(csin.size()); ++m)
        acc += csin[static_cast<std::size_t>(m - 1)] * dsin(unit * m, x, k);
    return acc;
}

//----------------------------------------------------------------------------
// Boundary template / function
//----------------------------------------------------------------------------

std::vector<cd> BoundaryTemplate1D::row(double x, int k) const {
    std::vector<cd> raw = basis.eval_row(x, k);
    const std::size_t n = raw.size();
    std::vector<cd> out(n, cd(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out[i] += raw[j] * coeff(j, i);
    return out;
}

cd BoundaryFunction1D::eval_c(double x, int k) const {
    std::vector<cd> r = tpl.row(x, k);
    cd acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r[i] * q1[i];
    return acc;
}

//----------------------------------------------------------------------------
// Composite solution
//----------------------------------------------------------------------------

double CompositeSolution1D::eval(double x, int k) const {
    cd acc = phi0.eval(x, k);
    double mag = std::abs(acc);
    if (phi1) {
        std::vector<cd> row = phi1->tpl.row(x, k);
        for (std::size_t i = 0; i < row.size(); ++i) {
            cd term = row[i] * phi1->q1[i];
            acc += term;
            mag += std::abs(term);
        }
    }
    if (phis) {
        double t = phis->eval(x, k);
        acc += t;
        mag += std::abs(t);
    }
    if (std::abs(acc.imag()) > 1e-10 * (1.0 + mag)) {
        // The boundary terms cancel imaginary parts across entries whose
        // rows peak at the interval ends.  Where the true value has decayed
        // the pointwise magnitudes no longer reflect the size of what was
        // cancelled, so rescale by the endpoint rows before giving up.
        double gross = 0.0;
        if (phi1) {
            const double lo = flavor == Flavor::full ? -a : 0.0;
            for (double xe : {lo, a}) {
                std::vector<cd> row = phi1->tpl.row(xe, k);
                for (std::size_t i = 0; i < row.size(); ++i)
                    gross += std::abs(row[i] * phi1->q1[i]);
            }
        }
        if (std::abs(acc.imag()) > 1e-12 * (1.0 + mag + gross))
            fail_internal("eval: imaginary residue above tolerance");
    }
    return acc.real();
}

double eval_1d(const CompositeSolution1D& sol, double x, int k) {
    if (k < 0 || k > 2 * sol.r)
        fail_validation("eval_1d: derivative order out of range (k <= 2r)");
    return sol.eval(x, k);
}

//----------------------------------------------------------------------------
// Data functionals and coefficients
//----------------------------------------------------------------------------

std::vector<double> flavor_data_1d(const Sampler1D& u, int r, double a, Flavor flavor) {
    const double lo = flavor == Flavor::full ? -a : 0.0;
    std::vector<double> out;
    for (const EndFunctional& f : flavor_functionals(r, flavor)) {
        if (f.jump) out.push_back(u(a, f.order) - u(lo, f.order));
        else out.push_back(u(f.at_hi ? a : lo, f.order));
    }
    return out;
}

FourierSeries1D fourier_coeffs_1d(const Sampler1D& f, double a, int M, Flavor flavor) {
    const double lo = flavor == Flavor::full ? -a : 0.0;
    const double hi = a;
    const double mid = 0.5 * (lo + hi);
    const int panels = std::max(4 * M, 8);
    auto breaks = layer_refined_breaks(lo, hi, panels, steep_end(f, lo, mid),
                                       steep_end(f, hi, mid));
    QuadratureRule rule = panel_rule(breaks);
    const std::size_t np = rule.size();

    std::vector<double> fw(np);
    kernels::sample_1d(f, rule.x, 0, fw);
    for (std::size_t i = 0; i < np; ++i) fw[i] *= rule.w[i];

    const double unit = pi / a;
    const double norm = flavor == Flavor::full ? 1.0 / a : 2.0 / a;
    FourierSeries1D s = FourierSeries1D::zero(flavor, a, M);
    if (!s.ccos.empty()) {
        const int rows = kernels::trig_rows(M, kernels::TrigFamily::cosine);
        std::vector<double> table(static_cast<std::size_t>(rows) * np);
        kernels::trig_table(rule.x, unit, M, kernels::TrigFamily::cosine, table);
        kernels::contract_vec(table, rows, static_cast<int>(np), fw, s.ccos);
        for (double& c : s.ccos) c *= norm;
    }
    if (!s.csin.empty()) {
        const int rows = kernels::trig_rows(M, kernels::TrigFamily::sine);
        std::vector<double> table(static_cast<std::size_t>(rows) * np);
        kernels::trig_table(rule.x, unit, M, kernels::TrigFamily::sine, table);
        kernels::contract_vec(table, rows, static_cast<int>(np), fw, s.csin);
        for (double& c : s.csin) c *= norm;
    }
    return s;
}

FourierSeries1D particular_coeffs_1d(const Operator1D& op, const Sampler1D& f,
                                     double a, int M, Flavor flavor) {
    FourierSeries1D s = fourier_coeffs_1d(f, a, M, flavor);
    const double unit = pi / a;
    auto check = [&](int m, double mag) {
        if (mag < 1e-10 * std::pow(1.0 + m, op.order)) {
            std::ostringstream os;
            os << "operator symbol vanishes at mode " << m << " (|symbol| = " << mag << ")";
            fail_resonance(os.str());
        }
    };
    switch (flavor) {
        case Flavor::half_sine:
            for (int m = 1; m <= M; ++m) {
                cd sym = symbol_1d(op, cd(0.0, unit * m));
                check(m, std::abs(sym));
                s.csin[static_cast<std::size_t>(m - 1)] /= sym.real();
            }
            break;
        case Flavor::half_cosine:
            for (int m = 0; m <= M; ++m) {
                cd sym = symbol_1d(op, cd(0.0, unit * m));
                check(m, std::abs(sym));
                s.ccos[static_cast<std::size_t>(m)] /= sym.real();
            }
            break;
        case Flavor::full: {
            check(0, std::abs(op.coeff(0)));
            s.ccos[0] /= op.coeff(0);
            for (int m = 1; m <= M; ++m) {
                cd sym = symbol_1d(op, cd(0.0, unit * m));
                const double E = sym.real(), O = sym.imag();
                const double det = E * E + O * O;
                check(m, std::sqrt(det));
                const double Af = s.ccos[static_cast<std::size_t>(m)];
                const double Bf = s.csin[static_cast<std::size_t>(m - 1)];
                s.ccos[static_cast<std::size_t>(m)] = (E * Af - O * Bf) / det;
                s.csin[static_cast<std::size_t>(m - 1)] = (O * Af + E * Bf) / det;
            }
            break;
        }
        default:
            fail_internal("particular_coeffs_1d: 2D flavor in 1D context");
    }
    return s;
}

BoundaryTemplate1D build_boundary_basis_1d(const Operator1D& op, const Domain& domain,
                                           Flavor flavor) {
    Polynomial chi = characteristic_1d(op);
    auto roots = find_roots(chi);
    const double lo = domain.x1_lo(), hi = domain.x1_hi();
    BoundaryTemplate1D tpl;
    tpl.flavor = flavor;
    tpl.r = op.r();
    tpl.basis = build_basis(roots, lo, hi);
    const int n = 2 * tpl.r;
    if (static_cast<int>(tpl.basis.entries.size()) != n)
        fail_internal("build_boundary_basis_1d: basis dimension != 2r");

    DenseMatrix R(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    auto fs = flavor_functionals(tpl.r, flavor);
    for (int i = 0; i < n; ++i) {
        const EndFunctional& f = fs[static_cast<std::size_t>(i)];
        std::vector<cd> hi_row = tpl.basis.eval_row(hi, f.order);
        std::vector<cd> lo_row = tpl.basis.eval_row(lo, f.order);
        for (int j = 0; j < n; ++j) {
            std::size_t sj = static_cast<std::size_t>(j);
            cd v = f.jump ? hi_row[sj] - lo_row[sj] : (f.at_hi ? hi_row[sj] : lo_row[sj]);
            R(static_cast<std::size_t>(i), sj) = v;
        }
    }
    tpl.cond = cond_estimate(R);
    if (!(tpl.cond < 1e13)) {
        std::ostringstream os;
        os << "boundary data functionals are dependent on the homogeneous space for flavor "
           << flavor_name(flavor) << " (condition " << tpl.cond
           << "); the operator's roots cannot carry independent data";
        fail_singular(os.str());
    }
    tpl.coeff = lu_inverse(R);
    return tpl;
}

//----------------------------------------------------------------------------
// Solve
//----------------------------------------------------------------------------

CompositeSolution1D solve_1d(const ValidatedProblem& problem) {
    const ProblemSpec& spec = problem.spec;
    const Operator1D& op = *spec.op1;
    const double a = spec.domain.a;
    const double lo = spec.domain.x1_lo();
    const int r = problem.r;

    std::optional<RealPoly1> phis;
    Sampler1D rhs = spec.forcing.f1;
    if (spec.forcing.fs1 && !spec.forcing.fs1->c.empty()) {
        phis = supplementary_solution(op, *spec.forcing.fs1);
        RealPoly1 fs = *spec.forcing.fs1;
        Sampler1D f = spec.forcing.f1;
        rhs = Sampler1D::from_function(
            [f, fs](double x, int k) { return f(x, k) - fs.eval(x, k); },
            "forcing minus polynomial part");
    }

    FourierSeries1D phi0 = particular_coeffs_1d(op, rhs, a, spec.trunc.M, spec.flavor);
    BoundaryTemplate1D tpl = build_boundary_basis_1d(op, spec.domain, spec.flavor);

    const int n = 2 * r;
    DenseMatrix A(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    std::vector<cd> b(static_cast<std::size_t>(n), cd(0.0));
    int row = 0;
    for (Side side : {Side::x1_max, Side::x1_min}) {
        const double xs = side == Side::x1_max ? a : lo;
        for (const BoundaryCondition& bc : spec.bcs.on(side)) {
            double known = 0.0;
            for (const BoundaryTerm& t : bc.op.terms) {
                std::vector<cd> pr = tpl.row(xs, t.k1);
                for (int j = 0; j < n; ++j)
                    A(static_cast<std::size_t>(row), static_cast<std::size_t>(j)) +=
                        t.b * pr[static_cast<std::size_t>(j)];
                known += t.b * phi0.eval(xs, t.k1);
                if (phis) known += t.b * phis->eval(xs, t.k1);
            }
            b[static_cast<std::size_t>(row)] = bc.g(xs, 0) - known;
            ++row;
        }
    }

    std::vector<cd> q1 = lu_solve(A, b);

    // The 2r x 2r system is tiny; its own residual must be at solver level.
    double res = 0.0, scale = A.norm_max();
    double qmax = 0.0, bmax = 0.0;
    for (const cd& q : q1) qmax = std::max(qmax, std::abs(q));
    for (const cd& v : b) bmax = std::max(bmax, std::abs(v));
    for (int i = 0; i < n; ++i) {
        cd acc = -b[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j)
            acc += A(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                   q1[static_cast<std::size_t>(j)];
        res = std::max(res, std::abs(acc));
    }
    if (res > 1e-9 * (1.0 + bmax + scale * qmax))
        fail_internal("solve_1d: boundary system residual above tolerance");

    CompositeSolution1D sol;
    sol.r = r;
    sol.flavor = spec.flavor;
    sol.a = a;
    sol.phi0 = std::move(phi0);
    sol.phi1 = BoundaryFunction1D{std::move(tpl), std::move(q1)};
    sol.phis = std::move(phis);

    // Report the boundary residual by direct differentiation of the result.
    double bc_res = 0.0;
    for (Side side : {Side::x1_max, Side::x1_min}) {
        const double xs = side == Side::x1_max ? a : lo;
        for (const BoundaryCondition& bc : spec.bcs.on(side)) {
            double v = 0.0;
            for (const BoundaryTerm& t : bc.op.terms) v += t.b * sol.eval(xs, t.k1);
            bc_res = std::max(bc_res, std::abs(v - bc.g(xs, 0)));
        }
    }
    sol.bc_residual = bc_res;
    return sol;
}

//----------------------------------------------------------------------------
// Baseline and error curves
//----------------------------------------------------------------------------

CompositeSolution1D baseline_poly_approx(const Sampler1D& u, int r, double a,
                                         int M, Flavor flavor) {
    const int n = 2 * r;
    const double lo = flavor == Flavor::full ? -a : 0.0;

    // Monomial family whose data map is invertible for the flavor: constants
    // carry no odd derivatives or jumps, so those flavors start at degree 1.
    std::vector<int> degs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        degs[static_cast<std::size_t>(j)] = flavor == Flavor::half_sine ? j : j + 1;

    auto fs = flavor_functionals(r, flavor);
    DenseMatrix F(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const EndFunctional& f = fs[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            int d = degs[static_cast<std::size_t>(j)];
            double v = f.jump ? monomial_deriv(d, f.order, a) - monomial_deriv(d, f.order, lo)
                              : monomial_deriv(d, f.order, f.at_hi ? a : lo);
            F(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        }
    }
    std::vector<double> data = flavor_data_1d(u, r, a, flavor);
    std::vector<cd> bc(data.begin(), data.end());
    std::vector<cd> c = lu_solve(F, bc);

    RealPoly1 w;
    w.c.assign(static_cast<std::size_t>(degs.back()) + 1, 0.0);
    for (int j = 0; j < n; ++j)
        w.c[static_cast<std::size_t>(degs[static_cast<std::size_t>(j)])] +=
            c[static_cast<std::size_t>(j)].real();

    Sampler1D v = Sampler1D::from_function(
        [u, w](double x, int k) { return u(x, k) - w.eval(x, k); },
        "sample minus boundary interpolant");

    CompositeSolution1D sol;
    sol.r = r;
    sol.flavor = flavor;
    sol.a = a;
    sol.phi0 = fourier_coeffs_1d(v, a, M, flavor);
    sol.phis = std::move(w);
    return sol;
}

ErrorCurve error_curve(const Sampler1D& exact,
                       const std::function<CompositeSolution1D(int)>& approx_for_M,
                       int k, const std::vector<int>& Ms, double lo, double hi) {
    constexpr int grid_n = 1001;
    std::vector<double> xs(grid_n);
    for (int i = 0; i < grid_n; ++i)
        xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid_n - 1.0);

    std::vector<double> ue(grid_n);
    kernels::grid_eval([&](double x) { return exact(x, k); }, xs, ue);
    double den = 0.0;
    for (double v : ue) den = std::max(den, std::abs(v));
    if (den < 1e-300) den = 1.0;

    ErrorCurve curve;
    curve.k = k;
    int prev = 0;
    for (int M : Ms) {
        if (M <= prev) fail_validation("error_curve: M list must be strictly increasing");
        prev = M;
        CompositeSolution1D sol = approx_for_M(M);
        std::vector<double> ua(grid_n);
        kernels::grid_eval([&](double x) { return sol.eval(x, k); }, xs, ua);
        double num = 0.0;
        for (int i = 0; i < grid_n; ++i)
            num = std::max(num, std::abs(ua[static_cast<std::size_t>(i)] -
                                         ue[static_cast<std::size_t>(i)]));
        curve.points.emplace_back(M, num / den);
    }
    return curve;
}

} // namespace fsm
