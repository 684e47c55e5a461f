//============================================================================
// CLI front-end plumbing: reference solutions, reports, the solve /
// section2 / convergence commands, deterministic CSV emission.
//============================================================================

#include "fsm/harness.hpp"
#include "fsm/errors.hpp"
#include "fsm/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fsm {

using ordered_json = nlohmann::ordered_json;

namespace {

double rel_floor(double denom) { return std::max(denom, 1e-300); }

// parallel_for with exception transport: a throw inside an OpenMP region
// would terminate the process, so capture per index and rethrow the first
// (lowest-index, hence deterministic) failure afterwards.
template <class Body>
void sweep(std::size_t n, Body&& body) {
    std::vector<std::exception_ptr> failures(n);
    par::parallel_for(n, [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    });
    for (std::exception_ptr& e : failures)
        if (e) std::rethrow_exception(e);
}

//----------------------------------------------------------------------------
// Derivative verification for reference entries
//----------------------------------------------------------------------------

void verify_derivatives_1d(const Sampler1D& u, double lo, double hi,
                           const std::string& name) {
    const double h = 1e-5 * (hi - lo);
    for (int k = 1; k <= 4; ++k) {
        for (double frac : {0.23, 0.5, 0.81}) {
            const double x = lo + frac * (hi - lo);
            const double fd = (u(x + h, k - 1) - u(x - h, k - 1)) / (2.0 * h);
            const double an = u(x, k);
            const double scale = rel_floor(std::max(std::abs(an), std::abs(fd)));
            if (std::abs(fd - an) > 1e-6 * scale)
                fail_internal("reference solution \"" + name + "\": derivative order " +
                              std::to_string(k) + " disagrees with finite differences");
        }
    }
}

//----------------------------------------------------------------------------
// Residuals by direct evaluation (never read from solver internals)
//----------------------------------------------------------------------------

double direct_bc_residual(const ValidatedProblem& p, const CompositeSolution1D& sol) {
    double worst = 0.0;
    const double lo = p.spec.domain.x1_lo();
    for (int sd = 0; sd < 2; ++sd) {
        const double x = sd == 0 ? p.spec.domain.a : lo;
        for (const BoundaryCondition& bc : p.spec.bcs.on(static_cast<Side>(sd))) {
            double v = -bc.g(0.0, 0);
            for (const BoundaryTerm& t : bc.op.terms) v += t.b * sol.eval(x, t.k1);
            worst = std::max(worst, std::abs(v));
        }
    }
    return worst;
}

double direct_bc_residual(const ValidatedProblem& p, const CompositeSolution2D& sol) {
    double worst = 0.0;
    const int np = 21;
    for (int sd = 0; sd < 4; ++sd) {
        const bool x1_side = sd < 2;
        const double s = sd == 0   ? p.spec.domain.x1_hi()
                         : sd == 1 ? p.spec.domain.x1_lo()
                         : sd == 2 ? p.spec.domain.x2_hi()
                                   : p.spec.domain.x2_lo();
        const double t_lo = x1_side ? p.spec.domain.x2_lo() : p.spec.domain.x1_lo();
        const double t_hi = x1_side ? p.spec.domain.x2_hi() : p.spec.domain.x1_hi();
        for (const BoundaryCondition& bc : p.spec.bcs.on(static_cast<Side>(sd))) {
            for (int i = 0; i < np; ++i) {
                const double t = t_lo + (t_hi - t_lo) * i / (np - 1);
                const double x1 = x1_side ? s : t;
                const double x2 = x1_side ? t : s;
                double v = -bc.g(t, 0);
                for (const BoundaryTerm& bt : bc.op.terms)
                    v += bt.b * sol.eval(x1, x2, bt.k1, bt.k2);
                worst = std::max(worst, std::abs(v));
            }
        }
    }
    return worst;
}

double direct_pde_residual(const ValidatedProblem& p, const CompositeSolution1D& sol) {
    const Operator1D& op = *p.spec.op1;
    const double lo = p.spec.domain.x1_lo(), hi = p.spec.domain.a;
    double worst = 0.0;
    for (int i = 1; i < 32; ++i) {
        const double x = lo + (hi - lo) * i / 32.0;
        double v = -p.spec.forcing.f1(x, 0);
        for (int k = 0; k <= op.order; ++k)
            if (op.coeff(k) != 0.0) v += op.coeff(k) * sol.eval(x, k);
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

double direct_pde_residual(const ValidatedProblem& p, const CompositeSolution2D& sol) {
    const Operator2D& op = *p.spec.op2;
    const Domain& d = p.spec.domain;
    double worst = 0.0;
    for (int i = 1; i < 9; ++i) {
        for (int j = 1; j < 9; ++j) {
            const double x1 = d.x1_lo() + (d.x1_hi() - d.x1_lo()) * i / 9.0;
            const double x2 = d.x2_lo() + (d.x2_hi() - d.x2_lo()) * j / 9.0;
            double v = -p.spec.forcing.f2(x1, x2, 0, 0);
            for (int k1 = 0; k1 <= op.order; ++k1)
                for (int k2 = 0; k1 + k2 <= op.order; ++k2)
                    if (op.coeff(k1, k2) != 0.0)
                        v += op.coeff(k1, k2) * sol.eval(x1, x2, k1, k2);
            worst = std::max(worst, std::abs(v));
        }
    }
    return worst;
}

std::string problem_digest(const ProblemSpec& spec) {
    std::ostringstream os;
    os << flavor_name(spec.flavor) << " order=" << (spec.domain.is_2d()
                                                        ? spec.op2->order
                                                        : spec.op1->order);
    os << " domain=";
    switch (spec.domain.kind) {
        case DomainKind::interval: os << "[0," << spec.domain.a << "]"; break;
        case DomainKind::interval_symmetric:
            os << "[-" << spec.domain.a << "," << spec.domain.a << "]";
            break;
        case DomainKind::rect:
            os << "[0," << spec.domain.a << "]x[0," << spec.domain.b << "]";
            break;
        case DomainKind::rect_symmetric:
            os << "[-" << spec.domain.a << "," << spec.domain.a << "]x[-"
               << spec.domain.b << "," << spec.domain.b << "]";
            break;
    }
    os << " M=" << spec.trunc.M;
    if (spec.domain.is_2d()) os << " N=" << spec.trunc.N;
    return os.str();
}

// relative sup-norm error of the k-th derivative on a closed uniform grid
double rel_error_1d(const CompositeSolution1D& sol, const Sampler1D& exact, int k,
                    double lo, double hi, int n = 1001) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        const double e = exact(x, k);
        num = std::max(num, std::abs(sol.eval(x, k) - e));
        den = std::max(den, std::abs(e));
    }
    return num / rel_floor(den);
}

} // namespace

//----------------------------------------------------------------------------
// Reference solutions
//----------------------------------------------------------------------------

ReferenceSolution make_boundary_layer_reference(double alpha, double a) {
    if (!(alpha > 0.0) || !(a > 0.0))
        fail_validation("boundary-layer reference needs alpha > 0 and a > 0");
    ReferenceSolution ref;
    ref.name = "boundary_layer";
    ref.params = {{"alpha", alpha}, {"a", a}};
    const double denom = std::sinh(alpha * a);
    ref.u1 = Sampler1D::from_function(
        [alpha, denom, a](double x, int k) {
            const double arg = alpha * (a - x);
            const double amp = std::pow(-alpha, k);
            return amp * (k % 2 == 0 ? std::sinh(arg) : std::cosh(arg)) / denom;
        },
        "sinh(alpha*(a-x1))/sinh(alpha*a)");
    verify_derivatives_1d(ref.u1, 0.0, a, ref.name);
    return ref;
}

std::vector<std::string> reference_names() { return {"boundary_layer"}; }

ReferenceSolution find_reference(const std::string& name, const ProblemSpec& spec) {
    if (name == "boundary_layer") {
        if (spec.domain.is_2d() || !spec.op1 || spec.op1->order != 2)
            fail_validation("reference \"boundary_layer\" needs a second-order interval problem");
        const double c = -spec.op1->coeff(0) / spec.op1->coeff(2);
        if (!(c > 0.0))
            fail_validation("reference \"boundary_layer\" needs u'' - alpha^2 u with alpha^2 > 0");
        return make_boundary_layer_reference(std::sqrt(c), spec.domain.a);
    }
    std::string known;
    for (const std::string& n : reference_names()) known += " " + n;
    fail_validation("unknown reference \"" + name + "\"; available:" + known);
}

//----------------------------------------------------------------------------
// Report / output helpers
//----------------------------------------------------------------------------

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string RunReport::to_json() const {
    ordered_json j;
    j["command"] = command;
    j["problem"] = problem;
    if (!method.empty()) j["method"] = method;
    if (M > 0) j["M"] = M;
    if (N > 0) j["N"] = N;
    j["solve_seconds"] = solve_seconds;
    j["bc_residual"] = bc_residual;
    j["pde_residual"] = pde_residual;
    j["ill_conditioned"] = ill_conditioned;
    j["warnings"] = warnings;
    for (const auto& [k, v] : extra) j[k] = v;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    const auto dir = std::filesystem::path(path).parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_validation("cannot write output file: " + path);
    out << text;
}

//----------------------------------------------------------------------------
// solve
//----------------------------------------------------------------------------

SolveOutput cmd_solve(const ProblemSpec& spec, const SolveOptions& opt) {
    const ValidatedProblem p = validate(spec);
    if (opt.eval_n < 2) fail_validation("--eval must be at least 2");
    for (const auto& [k1, k2] : opt.derivs) {
        if (k1 < 0 || k2 < 0 || k1 + k2 > 2 * p.r)
            fail_validation("--deriv order exceeds the operator order");
        if (!p.is_2d() && k2 != 0)
            fail_validation("--deriv k1,k2 is only meaningful on rectangle problems");
    }

    SolveOutput out;
    out.report.command = "solve";
    out.report.problem = problem_digest(spec);
    out.report.method = method_name(opt.method);
    out.report.M = spec.trunc.M;
    out.report.N = p.is_2d() ? spec.trunc.N : 0;

    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream csv;
    if (p.is_2d()) {
        const CompositeSolution2D sol = solve_2d(p, opt.method);
        out.report.solve_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.report.bc_residual = direct_bc_residual(p, sol);
        out.report.pde_residual = direct_pde_residual(p, sol);
        out.report.ill_conditioned = sol.ill_conditioned;
        if (sol.ill_conditioned)
            out.report.warnings.push_back(
                "global system condition estimate exceeds 1e14; results may be unreliable");

        csv << "x1,x2,u";
        for (const auto& [k1, k2] : opt.derivs) csv << ",u_d" << k1 << "_" << k2;
        csv << "\n";
        const Domain& d = spec.domain;
        for (int i = 0; i < opt.eval_n; ++i) {
            const double x1 =
                d.x1_lo() + (d.x1_hi() - d.x1_lo()) * i / (opt.eval_n - 1);
            for (int j = 0; j < opt.eval_n; ++j) {
                const double x2 =
                    d.x2_lo() + (d.x2_hi() - d.x2_lo()) * j / (opt.eval_n - 1);
                csv << format_float(x1) << ',' << format_float(x2) << ','
                    << format_float(sol.eval(x1, x2));
                for (const auto& [k1, k2] : opt.derivs)
                    csv << ',' << format_float(sol.eval(x1, x2, k1, k2));
                csv << "\n";
            }
        }
    } else {
        const CompositeSolution1D sol = solve_1d(p);
        out.report.solve_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.report.bc_residual = direct_bc_residual(p, sol);
        out.report.pde_residual = direct_pde_residual(p, sol);

        csv << "x1,u";
        for (const auto& [k1, k2] : opt.derivs) csv << ",u_d" << k1;
        csv << "\n";
        const double lo = spec.domain.x1_lo(), hi = spec.domain.a;
        for (int i = 0; i < opt.eval_n; ++i) {
            const double x = lo + (hi - lo) * i / (opt.eval_n - 1);
            csv << format_float(x) << ',' << format_float(sol.eval(x));
            for (const auto& [k1, k2] : opt.derivs) {
                (void)k2;
                csv << ',' << format_float(sol.eval(x, k1));
            }
            csv << "\n";
        }
    }
    out.csv = csv.str();

    if (!opt.out_dir.empty()) {
        write_text_file(opt.out_dir + "/report.json", out.report.to_json());
        write_text_file(opt.out_dir + "/solution.csv", out.csv);
    }
    return out;
}

//----------------------------------------------------------------------------
// section2: layer-strength sweep, polynomial-corrected series approximation
// vs the composite solver
//----------------------------------------------------------------------------

namespace {

// Dirichlet problem u'' - alpha^2 u = 0, u(0) = 1, u(a) = 0, whose exact
// solution is the boundary-layer reference.
ValidatedProblem layer_problem_r1(double alpha, double a, int M) {
    ProblemSpec s;
    s.domain = {DomainKind::interval, a, 0.0};
    s.op1 = Operator1D{2, {-alpha * alpha, 0.0, 1.0}};
    s.flavor = Flavor::half_sine;
    s.trunc = {M, 0};
    s.forcing.f1 = Sampler1D::from_constant(0.0);
    BoundaryCondition hi, lo;
    hi.op.terms.push_back({0, 0, 1.0});
    hi.g = Sampler1D::from_constant(0.0);
    lo.op.terms.push_back({0, 0, 1.0});
    lo.g = Sampler1D::from_constant(1.0);
    s.bcs.on(Side::x1_max).push_back(hi);
    s.bcs.on(Side::x1_min).push_back(lo);
    return validate(s);
}

// Fourth-order analogue with the same exact solution: u'''' - alpha^4 u = 0
// with u(0) = 1, u''(0) = alpha^2, u(a) = 0, u''(a) = 0.
ValidatedProblem layer_problem_r2(double alpha, double a, int M) {
    ProblemSpec s;
    s.domain = {DomainKind::interval, a, 0.0};
    s.op1 = Operator1D{4, {-std::pow(alpha, 4), 0.0, 0.0, 0.0, 1.0}};
    s.flavor = Flavor::half_sine;
    s.trunc = {M, 0};
    s.forcing.f1 = Sampler1D::from_constant(0.0);
    auto cond = [](int k, double g) {
        BoundaryCondition bc;
        bc.op.terms.push_back({k, 0, 1.0});
        bc.g = Sampler1D::from_constant(g);
        return bc;
    };
    s.bcs.on(Side::x1_max).push_back(cond(0, 0.0));
    s.bcs.on(Side::x1_max).push_back(cond(2, 0.0));
    s.bcs.on(Side::x1_min).push_back(cond(0, 1.0));
    s.bcs.on(Side::x1_min).push_back(cond(2, alpha * alpha));
    return validate(s);
}

} // namespace

Section2Output cmd_section2(const Section2Options& opt) {
    if (opt.alphas.empty() || opt.Ms.empty() || opt.ks.empty())
        fail_parse("section2 needs nonempty --alpha, --M and --k lists");
    for (double alpha : opt.alphas)
        if (!(alpha > 0.0)) fail_parse("section2 alpha values must be positive");
    for (int k : opt.ks)
        if (k < 0 || k > 4) fail_parse("section2 supports derivative orders 0..4");
    const double a = 1.0;

    // one cell per (alpha, M): baseline approximation plus the two solver
    // orders, then every requested derivative order is measured on it
    struct Cell {
        std::vector<double> baseline_err;    // per k
        std::vector<double> multiscale_err;  // per k
    };
    const std::size_t na = opt.alphas.size(), nm = opt.Ms.size();
    std::vector<Cell> cells(na * nm);

    const auto t0 = std::chrono::steady_clock::now();
    sweep(na * nm, [&](std::size_t idx) {
        const double alpha = opt.alphas[idx / nm];
        const int M = opt.Ms[idx % nm];
        const ReferenceSolution ref = make_boundary_layer_reference(alpha, a);

        const CompositeSolution1D base = baseline_poly_approx(ref.u1, 2, a, M,
                                                              Flavor::half_sine);
        const CompositeSolution1D ms1 = solve_1d(layer_problem_r1(alpha, a, M));
        const CompositeSolution1D ms2 = solve_1d(layer_problem_r2(alpha, a, M));

        Cell& cell = cells[idx];
        for (int k : opt.ks) {
            cell.baseline_err.push_back(rel_error_1d(base, ref.u1, k, 0.0, a));
            const CompositeSolution1D& ms = k <= 2 ? ms1 : ms2;
            cell.multiscale_err.push_back(rel_error_1d(ms, ref.u1, k, 0.0, a));
        }
    });

    Section2Output out;
    std::ostringstream csv;
    csv << "method,alpha_a,M,k,error\n";
    for (int pass = 0; pass < 2; ++pass) {
        const char* method = pass == 0 ? "baseline" : "multiscale";
        for (std::size_t ia = 0; ia < na; ++ia)
            for (std::size_t im = 0; im < nm; ++im) {
                const Cell& cell = cells[ia * nm + im];
                for (std::size_t ik = 0; ik < opt.ks.size(); ++ik)
                    csv << method << ',' << format_float(opt.alphas[ia]) << ','
                        << opt.Ms[im] << ',' << opt.ks[ik] << ','
                        << format_float(pass == 0 ? cell.baseline_err[ik]
                                                  : cell.multiscale_err[ik])
                        << "\n";
            }
    }
    out.csv = csv.str();

    out.report.command = "section2";
    out.report.problem = "boundary layer sinh(alpha*(1-x1))/sinh(alpha) on [0,1]";
    out.report.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.report.extra["baseline"] =
        "series approximation with end-derivative polynomial correction, r=2";
    out.report.extra["multiscale"] =
        "composite solve of the layer ODE (order 2 for k<=2, order 4 for k>2)";

    if (!opt.out_dir.empty()) {
        write_text_file(opt.out_dir + "/section2.csv", out.csv);
        write_text_file(opt.out_dir + "/report.json", out.report.to_json());
    }
    return out;
}

//----------------------------------------------------------------------------
// convergence
//----------------------------------------------------------------------------

ConvergenceOutput cmd_convergence(const ProblemSpec& spec, const ConvergenceOptions& opt) {
    if (opt.Ms.empty()) fail_parse("convergence needs a nonempty --M list");
    if (opt.reference.empty() == opt.manufactured.empty())
        fail_parse("convergence needs exactly one of --reference and --manufactured");

    const bool is_2d = spec.domain.is_2d();
    ReferenceSolution ref;
    if (!opt.reference.empty()) {
        ref = find_reference(opt.reference, spec);
        if (ref.is_2d != is_2d)
            fail_validation("reference \"" + opt.reference +
                            "\" does not fit the problem's dimension");
    } else {
        ref.name = "manufactured";
        ref.is_2d = is_2d;
        if (is_2d)
            ref.u2 = Sampler2D::from_expression(opt.manufactured);
        else
            ref.u1 = Sampler1D::from_expression(opt.manufactured, 0);
    }

    ConvergenceOutput out;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> errs(opt.Ms.size());
    sweep(opt.Ms.size(), [&](std::size_t i) {
        ProblemSpec run = spec;
        run.trunc.M = opt.Ms[i];
        if (is_2d) run.trunc.N = opt.Ms[i];
        const ValidatedProblem p = validate(run);
        if (is_2d) {
            const CompositeSolution2D sol = solve_2d(p, opt.method);
            double num = 0.0, den = 0.0;
            const Domain& d = run.domain;
            const int n = 41;
            for (int ii = 0; ii < n; ++ii)
                for (int jj = 0; jj < n; ++jj) {
                    const double x1 =
                        d.x1_lo() + (d.x1_hi() - d.x1_lo()) * ii / (n - 1);
                    const double x2 =
                        d.x2_lo() + (d.x2_hi() - d.x2_lo()) * jj / (n - 1);
                    const double e = ref.u2(x1, x2, 0, 0);
                    num = std::max(num, std::abs(sol.eval(x1, x2) - e));
                    den = std::max(den, std::abs(e));
                }
            errs[i] = num / rel_floor(den);
        } else {
            const CompositeSolution1D sol = solve_1d(p);
            errs[i] = rel_error_1d(sol, ref.u1, 0, run.domain.x1_lo(), run.domain.a);
        }
    });

    out.monotone = true;
    for (std::size_t i = 1; i < errs.size(); ++i)
        if (errs[i] > errs[i - 1]) out.monotone = false;

    std::ostringstream csv;
    csv << "M,error\n";
    for (std::size_t i = 0; i < opt.Ms.size(); ++i)
        csv << opt.Ms[i] << ',' << format_float(errs[i]) << "\n";
    out.csv = csv.str();

    out.report.command = "convergence";
    out.report.problem = problem_digest(spec);
    out.report.method = method_name(opt.method);
    out.report.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.report.extra["reference"] = ref.name;
    out.report.extra["monotone"] = out.monotone ? "true" : "false";

    if (!opt.out_dir.empty()) {
        write_text_file(opt.out_dir + "/convergence.csv", out.csv);
        write_text_file(opt.out_dir + "/report.json", out.report.to_json());
    }
    return out;
}

} // namespace fsm
