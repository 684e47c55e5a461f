//============================================================================
// discretize.cpp
//
// Assembly and solution of the global system that fixes the boundary
// harmonic data.  Row functionals come in two families (Fourier coefficient
// comparison, pointwise collocation); both act on the boundary condition
// residual
//
//     B_l [phi1 + phi2] - (g_l - B_l [phi0 + phi3 + phis])     on each side.
//
// The fcc rows need three kinds of coefficient extractions:
//   * a harmonic seen from its own sides lands on its own tangential mode
//     (block diagonal, exact trigonometric algebra),
//   * a harmonic seen from the opposite sides contributes its normal-axis
//     profile, expanded through the closed-form exponential moments,
//   * phi0 traces reduce to weighted sums of the stored coefficients, and
//     polynomial traces to monomial moments, so the right-hand side needs
//     quadrature only for the raw data g.
//============================================================================

#include "fsm/discretize.hpp"

#include "fsm/errors.hpp"
#include "fsm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace fsm {

namespace {

double dcos(double w, double x, int k) {
    const double amp = std::pow(w, k);
    switch (k % 4) {
        case 0: return amp * std::cos(w * x);
        case 1: return -amp * std::sin(w * x);
        case 2: return -amp * std::cos(w * x);
        default: return amp * std::sin(w * x);
    }
}

double dsin(double w, double x, int k) {
    const double amp = std::pow(w, k);
    switch (k % 4) {
        case 0: return amp * std::sin(w * x);
        case 1: return amp * std::cos(w * x);
        case 2: return -amp * std::sin(w * x);
        default: return -amp * std::cos(w * x);
    }
}

double falling(int j, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= static_cast<double>(j - i);
    return v;
}

double monomial_deriv(int j, int k, double x) {
    if (k > j) return 0.0;
    return falling(j, k) * std::pow(x, j - k);
}

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

// k-th tangential derivative acting on a (cos, sin) coefficient pair of one
// harmonic: (C, S) -> P^k (C, S) with P = [[0, beta], [-beta, 0]].
struct PairPow {
    double p00 = 1.0, p01 = 0.0, p10 = 0.0, p11 = 1.0;
};

PairPow pair_pow(double beta, int k) {
    PairPow P;
    for (int i = 0; i < k; ++i) {
        PairPow Q;
        Q.p00 = beta * P.p10;
        Q.p01 = beta * P.p11;
        Q.p10 = -beta * P.p00;
        Q.p11 = -beta * P.p01;
        P = Q;
    }
    return P;
}

// Factor picked up by sin(beta t) under an even-order tangential derivative
// (sine rows cannot see the cosine content an odd order would produce; the
// flavor rules keep those orders out of sine-sine problems).
double even_sin_factor(double beta, int k) {
    if (k % 2 != 0) return 0.0;
    double f = std::pow(beta, k);
    return (k / 2) % 2 == 0 ? f : -f;
}

//----------------------------------------------------------------------------
// Side geometry
//----------------------------------------------------------------------------

struct SideFrame {
    Side side = Side::x1_max;
    int normal_axis = 0;
    double s = 0.0;                   // normal coordinate on the side
    double t_lo = 0.0, t_hi = 0.0;    // tangential interval
    double t_half = 0.0;
};

SideFrame side_frame(const ValidatedProblem& p, Side sd) {
    const Domain& d = p.spec.domain;
    SideFrame f;
    f.side = sd;
    switch (sd) {
        case Side::x1_max: f.normal_axis = 0; f.s = d.x1_hi(); break;
        case Side::x1_min: f.normal_axis = 0; f.s = d.x1_lo(); break;
        case Side::x2_max: f.normal_axis = 1; f.s = d.x2_hi(); break;
        case Side::x2_min: f.normal_axis = 1; f.s = d.x2_lo(); break;
    }
    if (f.normal_axis == 0) {
        f.t_lo = d.x2_lo(); f.t_hi = d.x2_hi(); f.t_half = d.b;
    } else {
        f.t_lo = d.x1_lo(); f.t_hi = d.x1_hi(); f.t_half = d.a;
    }
    return f;
}

// Derivative orders of a boundary term in the side's (normal, tangential)
// split.
void split_orders(const SideFrame& f, const BoundaryTerm& t, int& kn, int& kt) {
    if (f.normal_axis == 0) { kn = t.k1; kt = t.k2; }
    else                    { kn = t.k2; kt = t.k1; }
}

int rows_per_op(Flavor flavor, int Nb) {
    return flavor == Flavor::full_2d ? 2 * Nb + 1 : Nb;
}

constexpr std::array<Side, 4> side_order = {Side::x1_max, Side::x1_min,
                                            Side::x2_max, Side::x2_min};

//----------------------------------------------------------------------------
// Moments of basis entries (dense columns)
//----------------------------------------------------------------------------

// Normalized tangential-family coefficients of the kt-th derivative of an
// anchored entry (x - ref)^p exp(eta (x - ref)) on [lo, hi]:
//   mc[j] = norm * int f^(kt) cos(beta_j x),   ms[j] = ... sin(beta_j x).
// The derivative expands by Leibniz into entries of lower power, each with
// a closed-form moment.
void entry_moments(const BasisEntry& e, int kt, double lo, double hi,
                   double t_half, int Nb, bool want_cos, double norm,
                   std::vector<cd>& mc, std::vector<cd>& ms) {
    mc.assign(want_cos ? Nb + 1 : 0, cd(0.0));
    ms.assign(Nb + 1, cd(0.0));
    const int p = e.power;
    for (int i = 0; i <= std::min(kt, p); ++i) {
        const cd w = binom(kt, i) * falling(p, i) * std::pow(e.eta, kt - i);
        if (w == cd(0.0)) continue;
        for (int j = 0; j <= Nb; ++j) {
            const double beta = j * M_PI / t_half;
            if (want_cos)
                mc[j] += w * exp_cos_moment(e.eta, e.x_ref, p - i, beta, lo, hi);
            if (j >= 1 || !want_cos)
                ms[j] += w * exp_sin_moment(e.eta, e.x_ref, p - i, beta, lo, hi);
        }
    }
    for (cd& v : mc) v *= norm;
    for (cd& v : ms) v *= norm;
}

//----------------------------------------------------------------------------
// fcc rows for one (side, operator) pair
//----------------------------------------------------------------------------

struct ColLayout {
    int phi1_dof = 0;
    int phi2_dof = 0;
    int total() const { return phi1_dof + phi2_dof; }
};

// Columns of the block whose sides these are: the harmonic's own tangential
// mode only.
void own_block_columns(const SideFrame& f, const BoundaryOperator& bop,
                       const BoundaryFunction2D& bf, int col0, int Nb,
                       DenseMatrix& A, std::size_t row0) {
    const int r = bf.r;
    int base = col0;
    if (bf.n0) {
        // constant tangential component: only the j = 0 cosine row sees it,
        // and the 1/2 evaluation weight cancels against the doubled mode-0
        // extraction
        for (const BoundaryTerm& t : bop.terms) {
            int kn, kt;
            split_orders(f, t, kn, kt);
            if (kt != 0) continue;
            std::vector<cd> row = bf.n0->row(f.s, kn);
            for (int i = 0; i < 2 * r; ++i)
                A(row0 + 0, static_cast<std::size_t>(base + i)) += t.b * row[i];
        }
        base += 2 * r;
    }
    for (const ScalarHarmonic& h : bf.scalars) {
        if (h.n <= Nb) {
            const std::size_t rsn = row0 + static_cast<std::size_t>(h.n - 1);
            for (const BoundaryTerm& t : bop.terms) {
                int kn, kt;
                split_orders(f, t, kn, kt);
                const double fac = even_sin_factor(h.beta, kt);
                if (fac == 0.0) continue;
                std::vector<cd> row = h.row(f.s, kn);
                for (int i = 0; i < 2 * r; ++i)
                    A(rsn, static_cast<std::size_t>(base + i)) += t.b * fac * row[i];
            }
        }
        base += 2 * r;
    }
    std::vector<cd> xi1_row, xi2_row;
    for (const VectorHarmonic& h : bf.vectors) {
        if (h.n <= Nb) {
            const std::size_t rc = row0 + static_cast<std::size_t>(h.n);
            const std::size_t rs = row0 + static_cast<std::size_t>(Nb + h.n);
            for (const BoundaryTerm& t : bop.terms) {
                int kn, kt;
                split_orders(f, t, kn, kt);
                const PairPow P = pair_pow(h.beta, kt);
                h.rows(f.s, kn, xi1_row, xi2_row);
                for (int i = 0; i < 4 * r; ++i) {
                    const std::size_t c = static_cast<std::size_t>(base + i);
                    A(rc, c) += t.b * (P.p00 * xi1_row[i] + P.p01 * xi2_row[i]);
                    A(rs, c) += t.b * (P.p10 * xi1_row[i] + P.p11 * xi2_row[i]);
                }
            }
        }
        base += 4 * r;
    }
}

// Columns of the opposite block: its tangential trigonometric factor is
// evaluated on this side while its normal-coordinate profile is expanded in
// this side's tangential family through entry moments.
void other_block_columns(const SideFrame& f, const BoundaryOperator& bop,
                         const BoundaryFunction2D& bf, int col0, int Nb,
                         DenseMatrix& A, std::size_t row0) {
    const int r = bf.r;
    const bool full = bf.flavor == Flavor::full_2d;
    const double norm = (full ? 1.0 : 2.0) / f.t_half;
    // integration interval: this side's tangential span = bf's normal span
    const double lo = bf.n_lo, hi = bf.n_hi;

    std::vector<cd> mc, ms;
    int base = col0;
    if (bf.n0) {
        for (const BoundaryTerm& t : bop.terms) {
            int kn, kt;
            split_orders(f, t, kn, kt);
            if (kn != 0) continue;   // d/dt of a tangential constant
            for (std::size_t e = 0; e < bf.n0->basis.entries.size(); ++e) {
                entry_moments(bf.n0->basis.entries[e], kt, lo, hi, f.t_half,
                              Nb, true, norm, mc, ms);
                for (int i = 0; i < 2 * r; ++i) {
                    const cd w = 0.5 * t.b * bf.n0->coeff(e, static_cast<std::size_t>(i));
                    if (w == cd(0.0)) continue;
                    const std::size_t c = static_cast<std::size_t>(base + i);
                    for (int j = 0; j <= Nb; ++j) A(row0 + j, c) += w * mc[j];
                    for (int j = 1; j <= Nb; ++j)
                        A(row0 + Nb + j, c) += w * ms[j];
                }
            }
        }
        base += 2 * r;
    }
    for (const ScalarHarmonic& h : bf.scalars) {
        for (const BoundaryTerm& t : bop.terms) {
            int kn, kt;
            split_orders(f, t, kn, kt);
            const double tf = dsin(h.beta, f.s, kn);
            if (tf == 0.0) continue;
            for (std::size_t e = 0; e < h.basis.entries.size(); ++e) {
                entry_moments(h.basis.entries[e], kt, lo, hi, f.t_half, Nb,
                              false, norm, mc, ms);
                for (int i = 0; i < 2 * r; ++i) {
                    const cd w = t.b * tf * h.coeff(e, static_cast<std::size_t>(i));
                    if (w == cd(0.0)) continue;
                    const std::size_t c = static_cast<std::size_t>(base + i);
                    for (int j = 1; j <= Nb; ++j)
                        A(row0 + (j - 1), c) += w * ms[j];
                }
            }
        }
        base += 2 * r;
    }
    for (const VectorHarmonic& h : bf.vectors) {
        for (const BoundaryTerm& t : bop.terms) {
            int kn, kt;
            split_orders(f, t, kn, kt);
            const double tc = dcos(h.beta, f.s, kn);
            const double ts = dsin(h.beta, f.s, kn);
            if (tc == 0.0 && ts == 0.0) continue;
            for (std::size_t e = 0; e < h.basis.size(); ++e) {
                const VectorBasisEntry& ve = h.basis[e];
                entry_moments(ve.entry, kt, lo, hi, f.t_half, Nb, true, norm,
                              mc, ms);
                const cd dir = tc * ve.g1 + ts * ve.g2;
                if (dir == cd(0.0)) continue;
                for (int i = 0; i < 4 * r; ++i) {
                    const cd w = t.b * dir * h.coeff(e, static_cast<std::size_t>(i));
                    if (w == cd(0.0)) continue;
                    const std::size_t c = static_cast<std::size_t>(base + i);
                    for (int j = 0; j <= Nb; ++j) A(row0 + j, c) += w * mc[j];
                    for (int j = 1; j <= Nb; ++j)
                        A(row0 + Nb + j, c) += w * ms[j];
                }
            }
        }
        base += 4 * r;
    }
}

void fcc_op_rows(const BoundaryFunction2D& phi1, const BoundaryFunction2D& phi2,
                 int Nb, const SideFrame& f, const BoundaryOperator& bop,
                 const ColLayout& cols, DenseMatrix& A, std::size_t row0) {
    if (f.normal_axis == 0) {
        own_block_columns(f, bop, phi1, 0, Nb, A, row0);
        other_block_columns(f, bop, phi2, cols.phi1_dof, Nb, A, row0);
    } else {
        other_block_columns(f, bop, phi1, 0, Nb, A, row0);
        own_block_columns(f, bop, phi2, cols.phi1_dof, Nb, A, row0);
    }
}

//----------------------------------------------------------------------------
// Traces of phi0 and the polynomial parts (right-hand side, exact algebra)
//----------------------------------------------------------------------------

// Stored-convention tangential coefficients of the kn-th normal derivative
// of phi0 on the side, before tangential differentiation.
void phi0_trace_full(const FourierSeries2D& F, int normal_axis, double s,
                     int kn, std::vector<double>& C, std::vector<double>& S) {
    const int M = F.M, N = F.N;
    const int nt = normal_axis == 0 ? N : M;
    C.assign(nt + 1, 0.0);
    S.assign(nt + 1, 0.0);
    if (normal_axis == 0) {
        for (int m = 0; m <= M; ++m) {
            const double mu = m == 0 ? 0.5 : 1.0;
            const double dc = mu * dcos(m * M_PI / F.a, s, kn);
            if (dc != 0.0)
                for (int n = 0; n <= N; ++n) {
                    C[n] += dc * F.cc[static_cast<std::size_t>(m) * (N + 1) + n];
                    if (n >= 1) S[n] += dc * F.cs[static_cast<std::size_t>(m) * N + n - 1];
                }
        }
        for (int m = 1; m <= M; ++m) {
            const double ds = dsin(m * M_PI / F.a, s, kn);
            if (ds != 0.0)
                for (int n = 0; n <= N; ++n) {
                    C[n] += ds * F.sc[static_cast<std::size_t>(m - 1) * (N + 1) + n];
                    if (n >= 1) S[n] += ds * F.sxs[static_cast<std::size_t>(m - 1) * N + n - 1];
                }
        }
    } else {
        for (int n = 0; n <= N; ++n) {
            const double mu = n == 0 ? 0.5 : 1.0;
            const double dc = mu * dcos(n * M_PI / F.b, s, kn);
            if (dc != 0.0)
                for (int m = 0; m <= M; ++m) {
                    C[m] += dc * F.cc[static_cast<std::size_t>(m) * (N + 1) + n];
                    if (m >= 1) S[m] += dc * F.sc[static_cast<std::size_t>(m - 1) * (N + 1) + n];
                }
        }
        for (int n = 1; n <= N; ++n) {
            const double ds = dsin(n * M_PI / F.b, s, kn);
            if (ds != 0.0)
                for (int m = 0; m <= M; ++m) {
                    C[m] += ds * F.cs[static_cast<std::size_t>(m) * N + n - 1];
                    if (m >= 1) S[m] += ds * F.sxs[static_cast<std::size_t>(m - 1) * N + n - 1];
                }
        }
    }
}

void phi0_trace_sine(const FourierSeries2D& F, int normal_axis, double s,
                     int kn, std::vector<double>& T) {
    const int M = F.M, N = F.N;
    const int nt = normal_axis == 0 ? N : M;
    T.assign(nt + 1, 0.0);
    if (normal_axis == 0) {
        for (int m = 1; m <= M; ++m) {
            const double ds = dsin(m * M_PI / F.a, s, kn);
            if (ds != 0.0)
                for (int n = 1; n <= N; ++n)
                    T[n] += ds * F.ss[static_cast<std::size_t>(m - 1) * N + n - 1];
        }
    } else {
        for (int n = 1; n <= N; ++n) {
            const double ds = dsin(n * M_PI / F.b, s, kn);
            if (ds != 0.0)
                for (int m = 1; m <= M; ++m)
                    T[m] += ds * F.ss[static_cast<std::size_t>(m - 1) * N + n - 1];
        }
    }
}

// Coefficients (ascending powers of the tangential coordinate) of the
// (kn, kt) derivative of a polynomial restricted to the side.
std::vector<double> poly_trace(const RealPoly2& P, int normal_axis, double s,
                               int kn, int kt) {
    std::vector<double> out;
    if (P.empty()) return out;
    const int nn = normal_axis == 0 ? P.n1 : P.n2;
    const int nt = normal_axis == 0 ? P.n2 : P.n1;
    out.assign(static_cast<std::size_t>(std::max(nt - kt, 0)), 0.0);
    for (int jn = kn; jn < nn; ++jn) {
        const double dn = monomial_deriv(jn, kn, s);
        if (dn == 0.0) continue;
        for (int jt = kt; jt < nt; ++jt) {
            const double c = normal_axis == 0 ? P.at(jn, jt) : P.at(jt, jn);
            if (c == 0.0) continue;
            out[static_cast<std::size_t>(jt - kt)] += c * dn * falling(jt, kt);
        }
    }
    return out;
}

// Tangential-family coefficients of B[phi0 + p3s] restricted to one side.
// Layout matches the row blocks: full flavor cos 0..Nb then sin 1..Nb,
// sine flavor modes 1..Nb.
std::vector<cd> fcc_op_traces(const FourierSeries2D& phi0, const RealPoly2& p3s,
                              const SideFrame& f, const BoundaryOperator& bop,
                              int Nb, Flavor flavor) {
    std::vector<cd> out(static_cast<std::size_t>(rows_per_op(flavor, Nb)), cd(0.0));
    std::vector<double> C, S, T;
    for (const BoundaryTerm& t : bop.terms) {
        int kn, kt;
        split_orders(f, t, kn, kt);
        if (flavor == Flavor::full_2d) {
            phi0_trace_full(phi0, f.normal_axis, f.s, kn, C, S);
            const int nt = static_cast<int>(C.size()) - 1;
            for (int j = 0; j <= std::min(Nb, nt); ++j) {
                if (j == 0) {
                    if (kt == 0) out[0] += t.b * C[0];
                    continue;
                }
                const PairPow P = pair_pow(j * M_PI / f.t_half, kt);
                out[static_cast<std::size_t>(j)] += t.b * (P.p00 * C[j] + P.p01 * S[j]);
                out[static_cast<std::size_t>(Nb + j)] += t.b * (P.p10 * C[j] + P.p11 * S[j]);
            }
        } else {
            phi0_trace_sine(phi0, f.normal_axis, f.s, kn, T);
            const int nt = static_cast<int>(T.size()) - 1;
            for (int j = 1; j <= std::min(Nb, nt); ++j)
                out[static_cast<std::size_t>(j - 1)] +=
                    t.b * even_sin_factor(j * M_PI / f.t_half, kt) * T[j];
        }

        const std::vector<double> pc = poly_trace(p3s, f.normal_axis, f.s, kn, kt);
        if (!pc.empty()) {
            const double norm = (flavor == Flavor::full_2d ? 1.0 : 2.0) / f.t_half;
            for (int j = 0; j <= Nb; ++j) {
                const double beta = j * M_PI / f.t_half;
                cd mcos(0.0), msin(0.0);
                for (std::size_t p = 0; p < pc.size(); ++p) {
                    if (pc[p] == 0.0) continue;
                    if (flavor == Flavor::full_2d)
                        mcos += pc[p] * exp_cos_moment(cd(0.0), 0.0, static_cast<int>(p),
                                                       beta, f.t_lo, f.t_hi);
                    if (j >= 1)
                        msin += pc[p] * exp_sin_moment(cd(0.0), 0.0, static_cast<int>(p),
                                                       beta, f.t_lo, f.t_hi);
                }
                if (flavor == Flavor::full_2d) {
                    out[static_cast<std::size_t>(j)] += t.b * norm * mcos;
                    if (j >= 1)
                        out[static_cast<std::size_t>(Nb + j)] += t.b * norm * msin;
                } else if (j >= 1) {
                    out[static_cast<std::size_t>(j - 1)] += t.b * norm * msin;
                }
            }
        }
    }
    return out;
}

// Tangential-family coefficients of the side data g, in row-block order.
std::vector<cd> g_coefficients(const Sampler1D& g, const SideFrame& f, int Nb,
                               Flavor flavor) {
    std::vector<cd> out(static_cast<std::size_t>(rows_per_op(flavor, Nb)), cd(0.0));
    if (flavor == Flavor::full_2d) {
        FourierSeries1D c = fourier_coeffs_1d(g, f.t_half, Nb, Flavor::full);
        for (int j = 0; j <= Nb; ++j) out[static_cast<std::size_t>(j)] = c.ccos[static_cast<std::size_t>(j)];
        for (int j = 1; j <= Nb; ++j) out[static_cast<std::size_t>(Nb + j)] = c.csin[static_cast<std::size_t>(j - 1)];
    } else {
        FourierSeries1D c = fourier_coeffs_1d(g, f.t_half, Nb, Flavor::half_sine);
        for (int j = 1; j <= Nb; ++j) out[static_cast<std::size_t>(j - 1)] = c.csin[static_cast<std::size_t>(j - 1)];
    }
    return out;
}

void require_even_tangential(const ValidatedProblem& prob) {
    if (prob.spec.flavor != Flavor::sine_sine) return;
    for (Side sd : side_order) {
        const SideFrame f = side_frame(prob, sd);
        for (const BoundaryCondition& bc : prob.spec.bcs.on(sd))
            for (const BoundaryTerm& t : bc.op.terms) {
                int kn, kt;
                split_orders(f, t, kn, kt);
                if (kt % 2 != 0)
                    fail_validation(std::string("sine_sine discretization requires even "
                                                "tangential derivative orders on side ") +
                                    side_name(sd));
            }
    }
}

//----------------------------------------------------------------------------
// Spot check of one assembled column against direct quadrature
//----------------------------------------------------------------------------

cd column_value(const BoundaryFunction2D& phi1, const BoundaryFunction2D& phi2,
                const SideFrame& f, const BoundaryOperator& bop, int col,
                int phi1_dof, double t) {
    cd acc(0.0);
    const double x1 = f.normal_axis == 0 ? f.s : t;
    const double x2 = f.normal_axis == 0 ? t : f.s;
    for (const BoundaryTerm& bt : bop.terms) {
        if (col < phi1_dof)
            acc += bt.b * slot_eval(phi1, col, x1, x2, bt.k1, bt.k2);
        else
            acc += bt.b * slot_eval(phi2, col - phi1_dof, x2, x1, bt.k2, bt.k1);
    }
    return acc;
}

void fcc_spot_check(const ValidatedProblem& prob, const BoundaryFunction2D& phi1,
                    const BoundaryFunction2D& phi2, int Nb, const ColLayout& cols,
                    const DenseMatrix& A) {
    const Flavor flavor = prob.spec.flavor;
    const SideFrame f = side_frame(prob, Side::x1_max);
    if (prob.spec.bcs.on(Side::x1_max).empty()) return;
    const BoundaryOperator& bop = prob.spec.bcs.on(Side::x1_max)[0].op;

    // a column with dense moment entries for the full flavor, an own-side
    // block column for sine-sine (whose cross columns vanish identically)
    const int col = flavor == Flavor::full_2d ? cols.phi1_dof : 0;

    QuadratureRule rule = panel_rule(uniform_breaks(f.t_lo, f.t_hi, std::max(4 * Nb, 8)));
    const double norm = (flavor == Flavor::full_2d ? 1.0 : 2.0) / f.t_half;
    const int checks = flavor == Flavor::full_2d ? 2 : 1;
    for (int c = 0; c < checks; ++c) {
        const int j = flavor == Flavor::full_2d ? c : 1;
        cd quad(0.0);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const double trig = flavor == Flavor::full_2d
                                    ? std::cos(j * M_PI / f.t_half * rule.x[i])
                                    : std::sin(j * M_PI / f.t_half * rule.x[i]);
            quad += rule.w[i] * trig *
                    column_value(phi1, phi2, f, bop, col, cols.phi1_dof, rule.x[i]);
        }
        quad *= norm;
        const std::size_t row = flavor == Flavor::full_2d ? static_cast<std::size_t>(j)
                                                          : static_cast<std::size_t>(j - 1);
        const cd entry = A(row, static_cast<std::size_t>(col));
        if (std::abs(quad - entry) > 1e-8 * (1.0 + std::abs(entry)))
            fail_internal("assembled fourier-coefficient entry disagrees with direct "
                          "quadrature (row " + std::to_string(row) + ", col " +
                          std::to_string(col) + ")");
    }
}

ColLayout col_layout(const BoundaryFunction2D& phi1, const BoundaryFunction2D& phi2) {
    ColLayout c;
    c.phi1_dof = phi1.dof();
    c.phi2_dof = phi2.dof();
    return c;
}

} // namespace

const char* method_name(Method m) {
    return m == Method::fcc ? "fcc" : "collocation";
}

int boundary_truncation(const ValidatedProblem& problem) {
    return std::max(problem.spec.trunc.M, problem.spec.trunc.N) + 2 * problem.r;
}

//----------------------------------------------------------------------------
// Slot evaluation
//----------------------------------------------------------------------------

cd slot_eval(const BoundaryFunction2D& bf, int slot, double xn, double xt,
             int kn, int kt) {
    const int r = bf.r;
    if (bf.n0) {
        if (slot < 2 * r) {
            if (kt != 0) return cd(0.0);
            return 0.5 * bf.n0->row(xn, kn)[static_cast<std::size_t>(slot)];
        }
        slot -= 2 * r;
    }
    if (!bf.scalars.empty()) {
        const int per = 2 * r;
        const int nsc = static_cast<int>(bf.scalars.size()) * per;
        if (slot < nsc) {
            const ScalarHarmonic& h = bf.scalars[static_cast<std::size_t>(slot / per)];
            return h.row(xn, kn)[static_cast<std::size_t>(slot % per)] *
                   dsin(h.beta, xt, kt);
        }
        slot -= nsc;
    }
    const int per = 4 * r;
    const VectorHarmonic& h = bf.vectors[static_cast<std::size_t>(slot / per)];
    std::vector<cd> x1r, x2r;
    h.rows(xn, kn, x1r, x2r);
    const int i = slot % per;
    return x1r[static_cast<std::size_t>(i)] * dcos(h.beta, xt, kt) +
           x2r[static_cast<std::size_t>(i)] * dsin(h.beta, xt, kt);
}

//----------------------------------------------------------------------------
// Assembly
//----------------------------------------------------------------------------

GlobalSystem assemble_fcc(const ValidatedProblem& problem, const FourierSeries2D& phi0,
                          const RealPoly2& p3s, const BoundaryFunction2D& phi1,
                          const BoundaryFunction2D& phi2, int Nb) {
    require_even_tangential(problem);
    const Flavor flavor = problem.spec.flavor;
    const ColLayout cols = col_layout(phi1, phi2);
    const int per_op = rows_per_op(flavor, Nb);

    int nrows = 0;
    for (Side sd : side_order)
        nrows += static_cast<int>(problem.spec.bcs.on(sd).size()) * per_op;
    if (nrows != cols.total())
        fail_internal("fcc system is not square: " + std::to_string(nrows) + " rows vs " +
                      std::to_string(cols.total()) + " unknowns");

    GlobalSystem sys;
    sys.Nb = Nb;
    sys.method = Method::fcc;
    sys.A = DenseMatrix(static_cast<std::size_t>(nrows), static_cast<std::size_t>(cols.total()));
    sys.rhs.assign(static_cast<std::size_t>(nrows), cd(0.0));

    std::size_t row0 = 0;
    for (Side sd : side_order) {
        const SideFrame f = side_frame(problem, sd);
        for (const BoundaryCondition& bc : problem.spec.bcs.on(sd)) {
            fcc_op_rows(phi1, phi2, Nb, f, bc.op, cols, sys.A, row0);
            const std::vector<cd> gc = g_coefficients(bc.g, f, Nb, flavor);
            const std::vector<cd> tc = fcc_op_traces(phi0, p3s, f, bc.op, Nb, flavor);
            for (int j = 0; j < per_op; ++j)
                sys.rhs[row0 + static_cast<std::size_t>(j)] =
                    gc[static_cast<std::size_t>(j)] - tc[static_cast<std::size_t>(j)];
            row0 += static_cast<std::size_t>(per_op);
        }
    }

    fcc_spot_check(problem, phi1, phi2, Nb, cols, sys.A);
    return sys;
}

GlobalSystem assemble_collocation(const ValidatedProblem& problem,
                                  const FourierSeries2D& phi0, const RealPoly2& p3s,
                                  const BoundaryFunction2D& phi1,
                                  const BoundaryFunction2D& phi2, int Nb, int P) {
    const ColLayout cols = col_layout(phi1, phi2);
    if (P <= 0) P = 2 * (Nb + 1);

    int nrows = 0;
    for (Side sd : side_order)
        nrows += static_cast<int>(problem.spec.bcs.on(sd).size()) * P;
    if (nrows < cols.total())
        fail_internal("collocation system has fewer rows than unknowns");

    GlobalSystem sys;
    sys.Nb = Nb;
    sys.method = Method::collocation;
    sys.A = DenseMatrix(static_cast<std::size_t>(nrows), static_cast<std::size_t>(cols.total()));
    sys.rhs.assign(static_cast<std::size_t>(nrows), cd(0.0));

    const bool has_phis = !p3s.empty();
    std::size_t row = 0;
    for (Side sd : side_order) {
        const SideFrame f = side_frame(problem, sd);
        const double mid = 0.5 * (f.t_lo + f.t_hi);
        const double half = 0.5 * (f.t_hi - f.t_lo);
        for (const BoundaryCondition& bc : problem.spec.bcs.on(sd)) {
            for (int i = 0; i < P; ++i, ++row) {
                const double t = mid + half * std::cos((2 * i + 1) * M_PI / (2.0 * P));
                const double x1 = f.normal_axis == 0 ? f.s : t;
                const double x2 = f.normal_axis == 0 ? t : f.s;
                cd rhs = bc.g(t, 0);
                for (const BoundaryTerm& bt : bc.op.terms) {
                    for (int c = 0; c < cols.phi1_dof; ++c)
                        sys.A(row, static_cast<std::size_t>(c)) +=
                            bt.b * slot_eval(phi1, c, x1, x2, bt.k1, bt.k2);
                    for (int c = 0; c < cols.phi2_dof; ++c)
                        sys.A(row, static_cast<std::size_t>(cols.phi1_dof + c)) +=
                            bt.b * slot_eval(phi2, c, x2, x1, bt.k2, bt.k1);
                    double trace = phi0.eval(x1, x2, bt.k1, bt.k2);
                    if (has_phis) trace += p3s.eval(x1, x2, bt.k1, bt.k2);
                    rhs -= bt.b * trace;
                }
                sys.rhs[row] = rhs;
            }
        }
    }
    return sys;
}

GlobalSolveResult solve_global(const GlobalSystem& sys) {
    GlobalSolveResult res;
    if (sys.A.rows() == sys.A.cols()) {
        res.q = lu_solve(sys.A, sys.rhs);
        res.cond = cond_estimate(sys.A);
    } else {
        res.q = qr_lstsq(sys.A, sys.rhs);
        // condition through the normal equations; cond(A) = sqrt(cond(A^H A))
        const std::size_t n = sys.A.cols();
        DenseMatrix G(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                cd s(0.0);
                for (std::size_t k = 0; k < sys.A.rows(); ++k)
                    s += std::conj(sys.A(k, i)) * sys.A(k, j);
                G(i, j) = s;
            }
        res.cond = std::sqrt(cond_estimate(G));
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < sys.A.rows(); ++i) {
        cd s = -sys.rhs[i];
        for (std::size_t j = 0; j < sys.A.cols(); ++j) s += sys.A(i, j) * res.q[j];
        r2 += std::norm(s);
    }
    res.residual = std::sqrt(r2);
    res.ill_conditioned = !(res.cond <= 1e14);
    return res;
}

//----------------------------------------------------------------------------
// Corner data derivation
//----------------------------------------------------------------------------

bool SideTraceExtractor::usable(int order) const {
    return ok && std::find(orders.begin(), orders.end(), order) != orders.end();
}

double SideTraceExtractor::trace(int order, int kt, double t) const {
    const auto it = std::find(orders.begin(), orders.end(), order);
    if (!ok || it == orders.end())
        fail_internal("side trace extractor queried for an unavailable order");
    const std::size_t row = static_cast<std::size_t>(it - orders.begin());
    double v = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l)
        v += inv(row, l).real() * g[l](t, kt);
    return v;
}

SideTraceExtractor side_trace_extractor(const ValidatedProblem& problem, Side side) {
    SideTraceExtractor ex;
    const int normal_axis = (side == Side::x1_max || side == Side::x1_min) ? 0 : 1;
    const auto& conds = problem.spec.bcs.on(side);
    const int r = problem.r;

    for (const BoundaryCondition& bc : conds)
        for (const BoundaryTerm& t : bc.op.terms) {
            const int kt = normal_axis == 0 ? t.k2 : t.k1;
            if (kt != 0) {
                ex.why = std::string("operators on side ") + side_name(side) +
                         " are not pure normal";
                return ex;
            }
        }

    std::vector<int> orders;
    for (const BoundaryCondition& bc : conds)
        for (const BoundaryTerm& t : bc.op.terms) {
            const int kn = normal_axis == 0 ? t.k1 : t.k2;
            if (std::find(orders.begin(), orders.end(), kn) == orders.end())
                orders.push_back(kn);
        }
    std::sort(orders.begin(), orders.end());
    if (static_cast<int>(orders.size()) != r) {
        ex.why = std::string("side ") + side_name(side) + " involves " +
                 std::to_string(orders.size()) + " distinct normal orders, need " +
                 std::to_string(r);
        return ex;
    }

    DenseMatrix B(static_cast<std::size_t>(r), static_cast<std::size_t>(r));
    for (std::size_t l = 0; l < conds.size(); ++l)
        for (const BoundaryTerm& t : conds[l].op.terms) {
            const int kn = normal_axis == 0 ? t.k1 : t.k2;
            const std::size_t col = static_cast<std::size_t>(
                std::find(orders.begin(), orders.end(), kn) - orders.begin());
            B(l, col) += t.b;
        }
    if (cond_estimate(B) > 1e13) {
        ex.why = std::string("boundary coefficient matrix on side ") + side_name(side) +
                 " is numerically singular";
        return ex;
    }

    ex.ok = true;
    ex.orders = std::move(orders);
    ex.inv = lu_inverse(B);
    for (const BoundaryCondition& bc : conds) ex.g.push_back(bc.g);
    return ex;
}

SineCornerData derive_corner_data_sine(const ValidatedProblem& problem) {
    const int r = problem.r;
    const Domain& d = problem.spec.domain;
    SineCornerData data = SineCornerData::zero(r);

    const SideTraceExtractor ex1[2] = {side_trace_extractor(problem, Side::x1_min),
                                       side_trace_extractor(problem, Side::x1_max)};
    const SideTraceExtractor ex2[2] = {side_trace_extractor(problem, Side::x2_min),
                                       side_trace_extractor(problem, Side::x2_max)};

    for (int e1 = 0; e1 < 2; ++e1)
        for (int e2 = 0; e2 < 2; ++e2) {
            const double x1c = e1 ? d.x1_hi() : d.x1_lo();
            const double x2c = e2 ? d.x2_hi() : d.x2_lo();
            for (int j1 = 0; j1 < r; ++j1)
                for (int j2 = 0; j2 < r; ++j2) {
                    if (ex1[e1].usable(2 * j1))
                        data.at(e1, e2, j1, j2) = ex1[e1].trace(2 * j1, 2 * j2, x2c);
                    else if (ex2[e2].usable(2 * j2))
                        data.at(e1, e2, j1, j2) = ex2[e2].trace(2 * j2, 2 * j1, x1c);
                    else
                        fail_validation(
                            "cannot derive corner value u^(" + std::to_string(2 * j1) + "," +
                            std::to_string(2 * j2) + ") at corner (" + std::to_string(e1) +
                            "," + std::to_string(e2) + "): " +
                            (ex1[e1].ok ? ex2[e2].why : ex1[e1].why));
                }
        }
    return data;
}

SineCornerData derive_corner_data(const ValidatedProblem& problem, const Sampler2D*) {
    return derive_corner_data_sine(problem);
}

FullCornerData derive_corner_data_full(const ValidatedProblem& problem) {
    const int r = problem.r;
    const Domain& d = problem.spec.domain;
    FullCornerData data = FullCornerData::zero(r);

    const SideTraceExtractor ex1[2] = {side_trace_extractor(problem, Side::x1_min),
                                       side_trace_extractor(problem, Side::x1_max)};
    const SideTraceExtractor ex2[2] = {side_trace_extractor(problem, Side::x2_min),
                                       side_trace_extractor(problem, Side::x2_max)};

    for (int k1 = 0; k1 <= 2 * r - 2; ++k1)
        for (int k2 = 0; k1 + k2 <= 2 * r - 2; ++k2) {
            if (ex1[0].usable(k1) && ex1[1].usable(k1)) {
                const double hi = ex1[1].trace(k1, k2, d.x2_hi()) -
                                  ex1[1].trace(k1, k2, d.x2_lo());
                const double lo = ex1[0].trace(k1, k2, d.x2_hi()) -
                                  ex1[0].trace(k1, k2, d.x2_lo());
                data.at(k1, k2) = hi - lo;
            } else if (ex2[0].usable(k2) && ex2[1].usable(k2)) {
                const double hi = ex2[1].trace(k2, k1, d.x1_hi()) -
                                  ex2[1].trace(k2, k1, d.x1_lo());
                const double lo = ex2[0].trace(k2, k1, d.x1_hi()) -
                                  ex2[0].trace(k2, k1, d.x1_lo());
                data.at(k1, k2) = hi - lo;
            } else {
                fail_validation("cannot derive double jump [[d^" + std::to_string(k1) +
                                " d^" + std::to_string(k2) +
                                " u]] from the boundary operators: " +
                                (ex1[0].ok && ex1[1].ok
                                     ? (ex2[0].ok ? ex2[1].why : ex2[0].why)
                                     : (ex1[0].ok ? ex1[1].why : ex1[0].why)));
            }
        }
    return data;
}

//----------------------------------------------------------------------------
// Drivers
//----------------------------------------------------------------------------

namespace {

void scatter_q(BoundaryFunction2D& bf, std::span<const cd> x, std::size_t& pos) {
    const int r = bf.r;
    if (bf.n0) {
        bf.n0->q.assign(x.begin() + pos, x.begin() + pos + 2 * r);
        pos += static_cast<std::size_t>(2 * r);
    }
    for (ScalarHarmonic& h : bf.scalars) {
        h.q.assign(x.begin() + pos, x.begin() + pos + 2 * r);
        pos += static_cast<std::size_t>(2 * r);
    }
    for (VectorHarmonic& h : bf.vectors) {
        h.q.assign(x.begin() + pos, x.begin() + pos + 4 * r);
        pos += static_cast<std::size_t>(4 * r);
    }
}

double bc_residual_2d(const ValidatedProblem& problem, const CompositeSolution2D& sol) {
    double worst = 0.0;
    const int np = 33;
    for (Side sd : side_order) {
        const SideFrame f = side_frame(problem, sd);
        for (const BoundaryCondition& bc : problem.spec.bcs.on(sd)) {
            for (int i = 0; i < np; ++i) {
                const double t = f.t_lo + (f.t_hi - f.t_lo) * i / (np - 1);
                const double x1 = f.normal_axis == 0 ? f.s : t;
                const double x2 = f.normal_axis == 0 ? t : f.s;
                double v = -bc.g(t, 0);
                for (const BoundaryTerm& bt : bc.op.terms)
                    v += bt.b * sol.eval(x1, x2, bt.k1, bt.k2);
                worst = std::max(worst, std::abs(v));
            }
        }
    }
    return worst;
}

RealPoly2 poly_sum(const RealPoly2& p, const RealPoly2& q) {
    if (p.empty()) return q;
    if (q.empty()) return p;
    RealPoly2 out = RealPoly2::zeros(std::max(p.n1, q.n1), std::max(p.n2, q.n2));
    for (int j1 = 0; j1 < p.n1; ++j1)
        for (int j2 = 0; j2 < p.n2; ++j2) out.at(j1, j2) += p.at(j1, j2);
    for (int j1 = 0; j1 < q.n1; ++j1)
        for (int j2 = 0; j2 < q.n2; ++j2) out.at(j1, j2) += q.at(j1, j2);
    return out;
}

} // namespace

CompositeSolution2D solve_2d(const ValidatedProblem& problem, Method method) {
    if (!problem.is_2d())
        fail_validation("solve_2d requires a rectangle problem");
    const Flavor flavor = problem.spec.flavor;
    const Operator2D& op = *problem.spec.op2;
    const Domain& d = problem.spec.domain;
    const int M = problem.spec.trunc.M, N = problem.spec.trunc.N;
    const int Nb = boundary_truncation(problem);

    CompositeSolution2D sol;
    sol.r = problem.r;
    sol.flavor = flavor;
    sol.a = d.a;
    sol.b = d.b;

    if (problem.spec.forcing.fs2)
        sol.phis = supplementary_solution(op, *problem.spec.forcing.fs2);

    // The corner polynomial absorbs the corner data of u minus the
    // supplementary part; otherwise the corner content of phis would be
    // counted twice.
    if (flavor == Flavor::sine_sine) {
        SineCornerData data = derive_corner_data_sine(problem);
        if (sol.phis)
            for (int e1 = 0; e1 < 2; ++e1)
                for (int e2 = 0; e2 < 2; ++e2)
                    for (int j1 = 0; j1 < problem.r; ++j1)
                        for (int j2 = 0; j2 < problem.r; ++j2)
                            data.at(e1, e2, j1, j2) -= sol.phis->eval(
                                e1 ? d.a : 0.0, e2 ? d.b : 0.0, 2 * j1, 2 * j2);
        sol.phi3 = corner_function(data, d.a, d.b);
    } else {
        FullCornerData data = derive_corner_data_full(problem);
        if (sol.phis)
            for (int k1 = 0; k1 <= 2 * problem.r - 2; ++k1)
                for (int k2 = 0; k1 + k2 <= 2 * problem.r - 2; ++k2)
                    data.at(k1, k2) -= sol.phis->eval(d.a, d.b, k1, k2) -
                                       sol.phis->eval(d.a, -d.b, k1, k2) -
                                       sol.phis->eval(-d.a, d.b, k1, k2) +
                                       sol.phis->eval(-d.a, -d.b, k1, k2);
        sol.phi3 = corner_function(data, d.a, d.b);
    }

    // interior residual forcing: f minus the operator applied to the
    // polynomial parts
    RealPoly2 p3s = sol.phi3;
    if (sol.phis) p3s = poly_sum(p3s, *sol.phis);
    const RealPoly2 lp = apply_operator(op, p3s);
    const Sampler2D f = problem.spec.forcing.f2;
    const Sampler2D rhs = Sampler2D::from_function(
        [f, lp](double x1, double x2, int k1, int k2) {
            return f(x1, x2, k1, k2) - lp.eval(x1, x2, k1, k2);
        },
        "forcing minus polynomial corrections");

    sol.phi0 = particular_2d(op, rhs, d.a, d.b, M, N, flavor);
    sol.phi1 = boundary_function_phi1(op, d, flavor, Nb);
    sol.phi2 = boundary_function_phi2(op, d, flavor, Nb);

    const GlobalSystem sys =
        method == Method::fcc
            ? assemble_fcc(problem, sol.phi0, p3s, sol.phi1, sol.phi2, Nb)
            : assemble_collocation(problem, sol.phi0, p3s, sol.phi1, sol.phi2, Nb);
    const GlobalSolveResult res = solve_global(sys);

    std::size_t pos = 0;
    scatter_q(sol.phi1, res.q, pos);
    scatter_q(sol.phi2, res.q, pos);
    if (pos != res.q.size())
        fail_internal("global solution vector does not match the slot layout");

    sol.ill_conditioned = res.ill_conditioned;
    sol.bc_residual = bc_residual_2d(problem, sol);
    return sol;
}

CompositeSolution1D solve_problem_1d(const ValidatedProblem& problem, Method method) {
    if (problem.is_2d())
        fail_validation("solve_problem_1d requires an interval problem");
    // On an interval both row families collapse to the same 2r endpoint
    // conditions, so the method choice changes nothing.
    (void)method;
    return solve_1d(problem);
}

//----------------------------------------------------------------------------
// Equivalent boundary-data transform (2D)
//----------------------------------------------------------------------------

namespace {

BoundaryOperator trace_operator(int normal_axis, int order) {
    BoundaryOperator bop;
    BoundaryTerm t;
    t.b = 1.0;
    if (normal_axis == 0) t.k1 = order;
    else                  t.k2 = order;
    bop.terms.push_back(t);
    return bop;
}

} // namespace

EquivalentTransform equivalent_transform(const ValidatedProblem& problem,
                                         const CompositeSolution2D& sol) {
    const Flavor flavor = problem.spec.flavor;
    const int r = problem.r;
    const int Nb = static_cast<int>(flavor == Flavor::full_2d ? sol.phi1.vectors.size()
                                                              : sol.phi1.scalars.size());
    const ColLayout cols = col_layout(sol.phi1, sol.phi2);
    const int per_op = rows_per_op(flavor, Nb);
    const int nrows = 4 * r * per_op;
    if (nrows != cols.total())
        fail_internal("trace system is not square");

    EquivalentTransform t;
    t.R12 = DenseMatrix(static_cast<std::size_t>(nrows), static_cast<std::size_t>(cols.total()));
    t.t03.assign(static_cast<std::size_t>(nrows), cd(0.0));

    RealPoly2 p3s = sol.phi3;
    if (sol.phis) p3s = poly_sum(p3s, *sol.phis);

    std::size_t row0 = 0;
    for (Side sd : side_order) {
        const SideFrame f = side_frame(problem, sd);
        for (int j = 0; j < r; ++j) {
            const BoundaryOperator bop = trace_operator(f.normal_axis, j);
            fcc_op_rows(sol.phi1, sol.phi2, Nb, f, bop, cols, t.R12, row0);
            const std::vector<cd> tc = fcc_op_traces(sol.phi0, p3s, f, bop, Nb, flavor);
            for (int i = 0; i < per_op; ++i)
                t.t03[row0 + static_cast<std::size_t>(i)] = tc[static_cast<std::size_t>(i)];
            row0 += static_cast<std::size_t>(per_op);
        }
    }
    t.cond = cond_estimate(t.R12);
    if (!(t.cond < 1e13)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", t.cond);
        fail_singular(std::string("trace block R12 is not invertible at this "
                                  "truncation (condition estimate ") + buf + ")");
    }
    return t;
}

std::vector<cd> packed_q12(const CompositeSolution2D& sol) {
    std::vector<cd> q;
    auto pack = [&q](const BoundaryFunction2D& bf) {
        if (bf.n0) q.insert(q.end(), bf.n0->q.begin(), bf.n0->q.end());
        for (const ScalarHarmonic& h : bf.scalars) q.insert(q.end(), h.q.begin(), h.q.end());
        for (const VectorHarmonic& h : bf.vectors) q.insert(q.end(), h.q.begin(), h.q.end());
    };
    pack(sol.phi1);
    pack(sol.phi2);
    return q;
}

std::vector<cd> boundary_trace_coeffs(const EquivalentTransform& t,
                                      const CompositeSolution2D& sol) {
    const std::vector<cd> q = packed_q12(sol);
    std::vector<cd> qb(t.t03);
    for (std::size_t i = 0; i < t.R12.rows(); ++i) {
        cd s(0.0);
        for (std::size_t j = 0; j < t.R12.cols(); ++j) s += t.R12(i, j) * q[j];
        qb[i] += s;
    }
    return qb;
}

std::vector<cd> recover_q12(const EquivalentTransform& t, std::span<const cd> qb) {
    std::vector<cd> rhs(qb.begin(), qb.end());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= t.t03[i];
    return lu_solve(t.R12, rhs);
}

double dual_eval(const EquivalentTransform& t, const CompositeSolution2D& sol,
                 std::span<const cd> qb, double x1, double x2, int k1, int k2) {
    const std::vector<cd> q = recover_q12(t, qb);
    cd acc = sol.phi0.eval(x1, x2, k1, k2);
    acc += sol.phi3.empty() ? 0.0 : sol.phi3.eval(x1, x2, k1, k2);
    if (sol.phis) acc += sol.phis->eval(x1, x2, k1, k2);
    const int n1 = sol.phi1.dof();
    for (int i = 0; i < n1; ++i)
        acc += q[static_cast<std::size_t>(i)] * slot_eval(sol.phi1, i, x1, x2, k1, k2);
    const int n2 = sol.phi2.dof();
    for (int i = 0; i < n2; ++i)
        acc += q[static_cast<std::size_t>(n1 + i)] * slot_eval(sol.phi2, i, x2, x1, k2, k1);
    return acc.real();
}

//----------------------------------------------------------------------------
// Equivalent boundary-data transform (1D)
//----------------------------------------------------------------------------

EquivalentTransform1D equivalent_transform(const ValidatedProblem& problem,
                                           const CompositeSolution1D& sol) {
    if (!sol.phi1)
        fail_validation("the 1D transform needs a composite solution with a "
                        "boundary function");
    const int r = problem.r;
    const Domain& d = problem.spec.domain;
    const double xs[2] = {d.x1_hi(), d.x1_lo()};

    EquivalentTransform1D t;
    t.R12 = DenseMatrix(static_cast<std::size_t>(2 * r), static_cast<std::size_t>(2 * r));
    t.t03.assign(static_cast<std::size_t>(2 * r), cd(0.0));
    for (int side = 0; side < 2; ++side)
        for (int j = 0; j < r; ++j) {
            const std::size_t row = static_cast<std::size_t>(side * r + j);
            const std::vector<cd> rv = sol.phi1->tpl.row(xs[side], j);
            for (int c = 0; c < 2 * r; ++c) t.R12(row, static_cast<std::size_t>(c)) = rv[static_cast<std::size_t>(c)];
            double v = sol.phi0.eval(xs[side], j);
            if (sol.phis) v += sol.phis->eval(xs[side], j);
            t.t03[row] = v;
        }
    t.cond = cond_estimate(t.R12);
    return t;
}

std::vector<cd> boundary_trace_values(const EquivalentTransform1D& t,
                                      const CompositeSolution1D& sol) {
    std::vector<cd> qb(t.t03);
    for (std::size_t i = 0; i < t.R12.rows(); ++i) {
        cd s(0.0);
        for (std::size_t j = 0; j < t.R12.cols(); ++j) s += t.R12(i, j) * sol.phi1->q1[j];
        qb[i] += s;
    }
    return qb;
}

std::vector<cd> recover_q1(const EquivalentTransform1D& t, std::span<const cd> qb) {
    std::vector<cd> rhs(qb.begin(), qb.end());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= t.t03[i];
    return lu_solve(t.R12, rhs);
}

double dual_eval(const EquivalentTransform1D& t, const CompositeSolution1D& sol,
                 std::span<const cd> qb, double x, int k) {
    const std::vector<cd> q = recover_q1(t, qb);
    cd acc = sol.phi0.eval(x, k);
    if (sol.phis) acc += sol.phis->eval(x, k);
    const std::vector<cd> rv = sol.phi1->tpl.row(x, k);
    for (std::size_t i = 0; i < q.size(); ++i) acc += rv[i] * q[i];
    return acc.real();
}

} // namespace fsm
