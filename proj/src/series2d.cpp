//============================================================================
// series2d.cpp
//============================================================================

#include "fsm/series2d.hpp"

#include "fsm/errors.hpp"
#include "fsm/kernels.hpp"
#include "fsm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fsm {

namespace {

constexpr double pi = std::numbers::pi;

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

double monomial_deriv(int j, int k, double x) {
    if (k > j) return 0.0;
    double f = falling(j, k);
    return j == k ? f : f * std::pow(x, j - k);
}

void trim(RealPoly1& p) {
    while (!p.c.empty() && p.c.back() == 0.0) p.c.pop_back();
}

RealPoly2 trimmed(const RealPoly2& p) {
    int n1 = 0, n2 = 0;
    for (int j1 = 0; j1 < p.n1; ++j1)
        for (int j2 = 0; j2 < p.n2; ++j2)
            if (p.at(j1, j2) != 0.0) {
                n1 = std::max(n1, j1 + 1);
                n2 = std::max(n2, j2 + 1);
            }
    RealPoly2 q = RealPoly2::zeros(n1, n2);
    for (int j1 = 0; j1 < n1; ++j1)
        for (int j2 = 0; j2 < n2; ++j2) q.at(j1, j2) = p.at(j1, j2);
    return q;
}

double max_abs_coeff(const RealPoly1& p) {
    double m = 0.0;
    for (double v : p.c) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_coeff(const RealPoly2& p) {
    double m = 0.0;
    for (double v : p.c) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

//----------------------------------------------------------------------------
// Supplementary polynomial
//----------------------------------------------------------------------------

RealPoly1 supplementary_solution(const Operator1D& op, const RealPoly1& fs) {
    int k0 = -1;
    for (int k = 0; k <= op.order; ++k)
        if (op.coeff(k) != 0.0) { k0 = k; break; }
    if (k0 < 0) fail_validation("supplementary_solution: operator has no nonzero coefficient");

    RealPoly1 res = fs;
    trim(res);
    RealPoly1 p;
    if (res.c.empty()) return p;

    const int d = static_cast<int>(res.c.size()) - 1;
    p.c.assign(static_cast<std::size_t>(d + k0) + 1, 0.0);
    for (int t = d; t >= 0; --t) {
        double v = res.c[static_cast<std::size_t>(t)];
        if (v == 0.0) continue;
        // op.coeff(k0) * d^k0/dx^k0 x^(t+k0) leads at degree t; the other
        // operator terms only feed lower degrees.
        double c = v / (op.coeff(k0) * falling(t + k0, k0));
        p.c[static_cast<std::size_t>(t + k0)] += c;
        for (int k = k0; k <= op.order; ++k) {
            if (op.coeff(k) == 0.0) continue;
            int dd = t + k0 - k;
            if (dd < 0) break;
            res.c[static_cast<std::size_t>(dd)] -= c * op.coeff(k) * falling(t + k0, k);
        }
        res.c[static_cast<std::size_t>(t)] = 0.0;
    }
    trim(p);

    RealPoly1 chk = apply_operator(op, p);
    double scale = 1.0 + max_abs_coeff(fs) + max_abs_coeff(chk);
    std::size_t nmax = std::max(chk.c.size(), fs.c.size());
    for (std::size_t j = 0; j < nmax; ++j) {
        double want = j < fs.c.size() ? fs.c[j] : 0.0;
        double got = j < chk.c.size() ? chk.c[j] : 0.0;
        if (std::abs(got - want) > 1e-10 * scale)
            fail_internal("supplementary_solution: polynomial solve left a residual");
    }
    return p;
}

RealPoly2 supplementary_solution(const Operator2D& op, const RealPoly2& fs) {
    struct Term { int k1, k2; double a; };
    std::vector<Term> terms;
    int k0 = op.order + 1;
    for (int k1 = 0; k1 <= op.order; ++k1)
        for (int k2 = 0; k2 <= op.order; ++k2)
            if (op.coeff(k1, k2) != 0.0) {
                terms.push_back({k1, k2, op.coeff(k1, k2)});
                k0 = std::min(k0, k1 + k2);
            }
    if (terms.empty())
        fail_validation("supplementary_solution: operator has no nonzero coefficient");

    int D = -1;
    for (int j1 = 0; j1 < fs.n1; ++j1)
        for (int j2 = 0; j2 < fs.n2; ++j2)
            if (fs.at(j1, j2) != 0.0) D = std::max(D, j1 + j2);
    if (D < 0) return RealPoly2{};

    RealPoly2 res = RealPoly2::zeros(D + 1, D + 1);
    for (int j1 = 0; j1 < fs.n1 && j1 <= D; ++j1)
        for (int j2 = 0; j2 < fs.n2 && j2 <= D; ++j2)
            if (j1 + j2 <= D) res.at(j1, j2) = fs.at(j1, j2);
    RealPoly2 p = RealPoly2::zeros(D + k0 + 1, D + k0 + 1);

    // One total-degree level at a time, top down.  The minimal-order terms
    // map the level-(t+k0) monomials onto level t; everything else in the
    // operator feeds strictly lower levels and is swept along.
    for (int t = D; t >= 0; --t) {
        const int m = t + 1;            // target monomials x1^i1 x2^(t-i1)
        const int nn = t + k0 + 1;      // source monomials at level t+k0
        std::vector<double> b(static_cast<std::size_t>(m));
        bool any = false;
        for (int i1 = 0; i1 <= t; ++i1) {
            b[static_cast<std::size_t>(i1)] = res.at(i1, t - i1);
            any = any || b[static_cast<std::size_t>(i1)] != 0.0;
        }
        if (!any) continue;

        std::vector<double> A(static_cast<std::size_t>(m) * nn, 0.0);
        for (int j1 = 0; j1 < nn; ++j1) {
            const int j2 = t + k0 - j1;
            for (const Term& tm : terms) {
                if (tm.k1 + tm.k2 != k0) continue;
                int i1 = j1 - tm.k1;
                if (i1 < 0 || i1 > t || j2 < tm.k2) continue;
                A[static_cast<std::size_t>(i1) * nn + j1] +=
                    tm.a * falling(j1, tm.k1) * falling(j2, tm.k2);
            }
        }

        // Minimal-norm underdetermined solve c = A^T (A A^T)^{-1} b; the
        // principal part is surjective on each level, so the Gram matrix is
        // positive definite.
        DenseMatrix G(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int l = 0; l < nn; ++l)
                    s += A[static_cast<std::size_t>(i) * nn + l] *
                         A[static_cast<std::size_t>(j) * nn + l];
                G(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s;
            }
        std::vector<cd> bc(b.begin(), b.end());
        std::vector<cd> y;
        try {
            y = lu_solve(G, bc);
        } catch (const Error&) {
            std::ostringstream os;
            os << "supplementary_solution: no polynomial solution at total degree " << t;
            fail_validation(os.str());
        }
        for (int j1 = 0; j1 < nn; ++j1) {
            const int j2 = t + k0 - j1;
            double c = 0.0;
            for (int i = 0; i < m; ++i)
                c += A[static_cast<std::size_t>(i) * nn + j1] *
                     y[static_cast<std::size_t>(i)].real();
            if (c == 0.0) continue;
            p.at(j1, j2) += c;
            for (const Term& tm : terms) {
                int i1 = j1 - tm.k1, i2 = j2 - tm.k2;
                if (i1 < 0 || i2 < 0) continue;
                res.at(i1, i2) -= c * tm.a * falling(j1, tm.k1) * falling(j2, tm.k2);
            }
        }
        for (int i1 = 0; i1 <= t; ++i1) res.at(i1, t - i1) = 0.0;
    }

    RealPoly2 out = trimmed(p);
    RealPoly2 chk = apply_operator(op, out);
    double scale = 1.0 + max_abs_coeff(fs) + max_abs_coeff(chk);
    int n1 = std::max(chk.n1, fs.n1), n2 = std::max(chk.n2, fs.n2);
    for (int j1 = 0; j1 < n1; ++j1)
        for (int j2 = 0; j2 < n2; ++j2) {
            double want = (j1 < fs.n1 && j2 < fs.n2) ? fs.at(j1, j2) : 0.0;
            double got = (j1 < chk.n1 && j2 < chk.n2) ? chk.at(j1, j2) : 0.0;
            if (std::abs(got - want) > 1e-10 * scale)
                fail_internal("supplementary_solution: polynomial solve left a residual");
        }
    return out;
}

//----------------------------------------------------------------------------
// Corner function
//----------------------------------------------------------------------------

SineCornerData SineCornerData::zero(int r) {
    SineCornerData d;
    d.r = r;
    d.values.assign(static_cast<std::size_t>(4 * r * r), 0.0);
    return d;
}

FullCornerData FullCornerData::zero(int r) {
    FullCornerData d;
    d.r = r;
    d.jumps.assign(static_cast<std::size_t>(2 * r - 1) * (2 * r - 1), 0.0);
    return d;
}

RealPoly2 corner_function(const SineCornerData& data, double a, double b) {
    const int r = data.r;
    const int n = 2 * r;
    bool any = false;
    for (double v : data.values) any = any || v != 0.0;
    if (!any) return RealPoly2{};

    // Per-axis cardinal interpolants on [0, L] for the even-derivative end
    // data (order 2j at L for i = j, then at 0 for i = r + j), monomial
    // degrees 0..2r-1.
    auto cardinal = [&](double L) {
        DenseMatrix F(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            int order = 2 * (i < r ? i : i - r);
            double pt = i < r ? L : 0.0;
            for (int j = 0; j < n; ++j)
                F(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                    monomial_deriv(j, order, pt);
        }
        return lu_inverse(F);
    };
    DenseMatrix inv1 = cardinal(a), inv2 = cardinal(b);

    RealPoly2 out = RealPoly2::zeros(n, n);
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            int e1 = i1 < r ? 1 : 0, j1 = i1 < r ? i1 : i1 - r;
            int e2 = i2 < r ? 1 : 0, j2 = i2 < r ? i2 : i2 - r;
            double v = data.at(e1, e2, j1, j2);
            if (v == 0.0) continue;
            for (int d1 = 0; d1 < n; ++d1)
                for (int d2 = 0; d2 < n; ++d2)
                    out.at(d1, d2) += v *
                        inv1(static_cast<std::size_t>(d1), static_cast<std::size_t>(i1)).real() *
                        inv2(static_cast<std::size_t>(d2), static_cast<std::size_t>(i2)).real();
        }
    return trimmed(out);
}

RealPoly2 corner_function(const FullCornerData& data, double a, double b) {
    const int r = data.r;
    bool any = false;
    for (double v : data.jumps) any = any || v != 0.0;
    if (!any) return RealPoly2{};

    // Conditions and basis monomials share the triangle k1 + k2 <= 2r - 2;
    // basis (k1, k2) -> x1^(k1+1) x2^(k2+1).  The double jump of a monomial
    // factorizes over the axes, and jumps of x^j at order k vanish unless
    // j - k is odd, which makes the system parity-block triangular.
    std::vector<std::pair<int, int>> tri;
    for (int k1 = 0; k1 <= 2 * r - 2; ++k1)
        for (int k2 = 0; k1 + k2 <= 2 * r - 2; ++k2) tri.emplace_back(k1, k2);
    const int n = static_cast<int>(tri.size());

    auto jump1 = [](int j, int k, double L) {
        return monomial_deriv(j, k, L) - monomial_deriv(j, k, -L);
    };

    DenseMatrix A(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    std::vector<cd> rhs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto [k1, k2] = tri[static_cast<std::size_t>(i)];
        rhs[static_cast<std::size_t>(i)] = data.at(k1, k2);
        for (int j = 0; j < n; ++j) {
            auto [c1, c2] = tri[static_cast<std::size_t>(j)];
            A(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                jump1(c1 + 1, k1, a) * jump1(c2 + 1, k2, b);
        }
    }
    std::vector<cd> c = lu_solve(A, rhs);

    RealPoly2 out = RealPoly2::zeros(2 * r, 2 * r);
    for (int j = 0; j < n; ++j) {
        auto [c1, c2] = tri[static_cast<std::size_t>(j)];
        out.at(c1 + 1, c2 + 1) = c[static_cast<std::size_t>(j)].real();
    }
    return trimmed(out);
}

//----------------------------------------------------------------------------
// Double Fourier series
//----------------------------------------------------------------------------

FourierSeries2D FourierSeries2D::zero(Flavor flavor, double a, double b, int M, int N) {
    FourierSeries2D s;
    s.flavor = flavor;
    s.a = a;
    s.b = b;
    s.M = M;
    s.N = N;
    if (flavor == Flavor::sine_sine) {
        s.ss.assign(static_cast<std::size_t>(M) * N, 0.0);
    } else {
        s.cc.assign(static_cast<std::size_t>(M + 1) * (N + 1), 0.0);
        s.cs.assign(static_cast<std::size_t>(M + 1) * N, 0.0);
        s.sc.assign(static_cast<std::size_t>(M) * (N + 1), 0.0);
        s.sxs.assign(static_cast<std::size_t>(M) * N, 0.0);
    }
    return s;
}

double FourierSeries2D::eval(double x1, double x2, int k1, int k2) const {
    const double u1 = pi / a, u2 = pi / b;
    if (flavor == Flavor::sine_sine) {
        double acc = 0.0;
        std::vector<double> s2(static_cast<std::size_t>(N));
        for (int n = 1; n <= N; ++n)
            s2[static_cast<std::size_t>(n - 1)] = dsin(u2 * n, x2, k2);
        for (int m = 1; m <= M; ++m) {
            double s1 = dsin(u1 * m, x1, k1);
            const double* row = ss.data() + static_cast<std::size_t>(m - 1) * N;
            double acc_n = 0.0;
            for (int n = 1; n <= N; ++n)
                acc_n += row[n - 1] * s2[static_cast<std::size_t>(n - 1)];
            acc += s1 * acc_n;
        }
        return acc;
    }

    // weight 1/2 on the m = 0 / n = 0 cosine rows
    std::vector<double> c1(static_cast<std::size_t>(M + 1)), s1(static_cast<std::size_t>(M));
    std::vector<double> c2(static_cast<std::size_t>(N + 1)), s2(static_cast<std::size_t>(N));
    for (int m = 0; m <= M; ++m)
        c1[static_cast<std::size_t>(m)] = (m == 0 ? 0.5 : 1.0) * dcos(u1 * m, x1, k1);
    for (int m = 1; m <= M; ++m)
        s1[static_cast<std::size_t>(m - 1)] = dsin(u1 * m, x1, k1);
    for (int n = 0; n <= N; ++n)
        c2[static_cast<std::size_t>(n)] = (n == 0 ? 0.5 : 1.0) * dcos(u2 * n, x2, k2);
    for (int n = 1; n <= N; ++n)
        s2[static_cast<std::size_t>(n - 1)] = dsin(u2 * n, x2, k2);

    double acc = 0.0;
    for (int m = 0; m <= M; ++m) {
        const double* rc = cc.data() + static_cast<std::size_t>(m) * (N + 1);
        const double* rs = cs.data() + static_cast<std::size_t>(m) * N;
        double an = 0.0;
        for (int n = 0; n <= N; ++n) an += rc[n] * c2[static_cast<std::size_t>(n)];
        for (int n = 1; n <= N; ++n) an += rs[n - 1] * s2[static_cast<std::size_t>(n - 1)];
        acc += c1[static_cast<std::size_t>(m)] * an;
    }
    for (int m = 1; m <= M; ++m) {
        const double* rc = sc.data() + static_cast<std::size_t>(m - 1) * (N + 1);
        const double* rs = sxs.data() + static_cast<std::size_t>(m - 1) * N;
        double an = 0.0;
        for (int n = 0; n <= N; ++n) an += rc[n] * c2[static_cast<std::size_t>(n)];
        for (int n = 1; n <= N; ++n) an += rs[n - 1] * s2[static_cast<std::size_t>(n - 1)];
        acc += s1[static_cast<std::size_t>(m - 1)] * an;
    }
    return acc;
}

FourierSeries2D fourier_coeffs_2d(const Sampler2D& f, double a, double b,
                                  int M, int N, Flavor flavor) {
    const bool full = flavor == Flavor::full_2d;
    const double lo1 = full ? -a : 0.0, lo2 = full ? -b : 0.0;
    // GL64 panels sized so the highest retained mode oscillates a handful of
    // times per panel.
    auto breaks1 = uniform_breaks(lo1, a, std::max(M / 4, 8));
    auto breaks2 = uniform_breaks(lo2, b, std::max(N / 4, 8));
    QuadratureRule r1 = panel_rule(breaks1), r2 = panel_rule(breaks2);
    const std::size_t np1 = r1.size(), np2 = r2.size();

    std::vector<double> F(np1 * np2);
    kernels::sample_2d(f, r1.x, r2.x, 0, 0, F);
    for (std::size_t i1 = 0; i1 < np1; ++i1) {
        double w1 = r1.w[i1];
        double* row = F.data() + i1 * np2;
        for (std::size_t i2 = 0; i2 < np2; ++i2) row[i2] *= w1 * r2.w[i2];
    }

    const double u1 = pi / a, u2 = pi / b;
    const double norm = (full ? 1.0 / a : 2.0 / a) * (full ? 1.0 / b : 2.0 / b);
    FourierSeries2D s = FourierSeries2D::zero(flavor, a, b, M, N);

    auto table = [](const std::vector<double>& x, double unit, int M_, kernels::TrigFamily fam) {
        const int rows = kernels::trig_rows(M_, fam);
        std::vector<double> t(static_cast<std::size_t>(rows) * x.size());
        kernels::trig_table(x, unit, M_, fam, t);
        return t;
    };

    if (flavor == Flavor::sine_sine) {
        auto T1 = table(r1.x, u1, M, kernels::TrigFamily::sine);
        auto T2 = table(r2.x, u2, N, kernels::TrigFamily::sine);
        std::vector<double> G(np1 * static_cast<std::size_t>(N));
        kernels::rowdot(F, static_cast<int>(np1), T2, N, static_cast<int>(np2), G);
        kernels::contract_mat(T1, M, static_cast<int>(np1), G, N, s.ss);
        for (double& v : s.ss) v *= norm;
        return s;
    }

    auto T1c = table(r1.x, u1, M, kernels::TrigFamily::cosine);
    auto T1s = table(r1.x, u1, M, kernels::TrigFamily::sine);
    auto T2c = table(r2.x, u2, N, kernels::TrigFamily::cosine);
    auto T2s = table(r2.x, u2, N, kernels::TrigFamily::sine);
    std::vector<double> Gc(np1 * static_cast<std::size_t>(N + 1));
    std::vector<double> Gs(np1 * static_cast<std::size_t>(N));
    kernels::rowdot(F, static_cast<int>(np1), T2c, N + 1, static_cast<int>(np2), Gc);
    kernels::rowdot(F, static_cast<int>(np1), T2s, N, static_cast<int>(np2), Gs);
    kernels::contract_mat(T1c, M + 1, static_cast<int>(np1), Gc, N + 1, s.cc);
    kernels::contract_mat(T1c, M + 1, static_cast<int>(np1), Gs, N, s.cs);
    kernels::contract_mat(T1s, M, static_cast<int>(np1), Gc, N + 1, s.sc);
    kernels::contract_mat(T1s, M, static_cast<int>(np1), Gs, N, s.sxs);
    for (double& v : s.cc) v *= norm;
    for (double& v : s.cs) v *= norm;
    for (double& v : s.sc) v *= norm;
    for (double& v : s.sxs) v *= norm;
    return s;
}

namespace {

// 2x2 derivative action on one axis' (cos, sin) coefficient pair; the
// m = 0 case degenerates to the 1x1 action on the constant.
struct PairOp {
    int dim = 1;
    std::array<double, 4> m{1.0, 0.0, 0.0, 0.0};   // row-major 2x2 (or [0] for 1x1)

    static PairOp ident(int dim) {
        PairOp p;
        p.dim = dim;
        p.m = dim == 1 ? std::array<double, 4>{1.0, 0.0, 0.0, 0.0}
                       : std::array<double, 4>{1.0, 0.0, 0.0, 1.0};
        return p;
    }
    double at(int i, int j) const { return dim == 1 ? m[0] : m[static_cast<std::size_t>(i * 2 + j)]; }
};

PairOp pair_mul(const PairOp& a, const PairOp& b) {
    PairOp c;
    c.dim = a.dim;
    if (a.dim == 1) {
        c.m[0] = a.m[0] * b.m[0];
        return c;
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int l = 0; l < 2; ++l) s += a.at(i, l) * b.at(l, j);
            c.m[static_cast<std::size_t>(i * 2 + j)] = s;
        }
    return c;
}

std::vector<PairOp> pair_powers(double omega, int dim, int kmax) {
    PairOp d;
    d.dim = dim;
    if (dim == 1) d.m[0] = 0.0;
    else d.m = {0.0, omega, -omega, 0.0};
    std::vector<PairOp> pows;
    pows.push_back(PairOp::ident(dim));
    for (int k = 1; k <= kmax; ++k) pows.push_back(pair_mul(pows.back(), d));
    return pows;
}

// Gaussian elimination with partial pivoting for the per-mode blocks
// (dim <= 4); kept local to avoid per-mode allocation of a full solver.
bool tiny_solve(double* A, double* b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::abs(A[i * n + col]) > std::abs(A[piv * n + col])) piv = i;
        if (A[piv * n + col] == 0.0) return false;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(A[col * n + j], A[piv * n + j]);
            std::swap(b[col], b[piv]);
        }
        for (int i = col + 1; i < n; ++i) {
            double f = A[i * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) A[i * n + j] -= f * A[col * n + j];
            b[i] -= f * b[col];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A[i * n + j] * b[j];
        b[i] = s / A[i * n + i];
    }
    return true;
}

[[noreturn]] void resonant_mode(int m, int n, double mag) {
    std::ostringstream os;
    os << "operator symbol vanishes at mode (" << m << ", " << n << ") (|symbol| = "
       << mag << ")";
    fail_resonance(os.str());
}

} // namespace

FourierSeries2D particular_2d(const Operator2D& op, const Sampler2D& rhs,
                              double a, double b, int M, int N, Flavor flavor) {
    FourierSeries2D s = fourier_coeffs_2d(rhs, a, b, M, N, flavor);
    const double u1 = pi / a, u2 = pi / b;

    if (flavor == Flavor::sine_sine) {
        for (int m = 1; m <= M; ++m)
            for (int n = 1; n <= N; ++n) {
                cd sym = symbol_2d(op, cd(0.0, u1 * m), cd(0.0, u2 * n));
                double tol = 1e-10 * std::pow(1.0 + std::max(m, n), op.order);
                if (std::abs(sym) < tol) resonant_mode(m, n, std::abs(sym));
                s.ss[static_cast<std::size_t>(m - 1) * N + (n - 1)] /= sym.real();
            }
        return s;
    }

    struct Term { int k1, k2; double a; };
    std::vector<Term> terms;
    for (int k1 = 0; k1 <= op.order; ++k1)
        for (int k2 = 0; k2 <= op.order; ++k2)
            if (op.coeff(k1, k2) != 0.0) terms.push_back({k1, k2, op.coeff(k1, k2)});

    for (int m = 0; m <= M; ++m) {
        const double alpha = u1 * m;
        const int d1 = m > 0 ? 2 : 1;
        auto P1 = pair_powers(alpha, d1, op.order);
        for (int n = 0; n <= N; ++n) {
            const double beta = u2 * n;
            const int d2 = n > 0 ? 2 : 1;
            const int dim = d1 * d2;

            double tol = 1e-10 * std::pow(1.0 + std::max(m, n), op.order);
            double mag = std::min(std::abs(symbol_2d(op, cd(0.0, alpha), cd(0.0, beta))),
                                  std::abs(symbol_2d(op, cd(0.0, alpha), cd(0.0, -beta))));
            if (mag < tol) resonant_mode(m, n, mag);

            auto P2 = pair_powers(beta, d2, op.order);
            double A[16] = {0.0};
            for (const Term& t : terms)
                for (int p1 = 0; p1 < d1; ++p1)
                    for (int p2 = 0; p2 < d1; ++p2) {
                        double v1 = P1[static_cast<std::size_t>(t.k1)].at(p1, p2);
                        if (v1 == 0.0) continue;
                        for (int q1 = 0; q1 < d2; ++q1)
                            for (int q2 = 0; q2 < d2; ++q2)
                                A[(p1 * d2 + q1) * dim + (p2 * d2 + q2)] +=
                                    t.a * v1 * P2[static_cast<std::size_t>(t.k2)].at(q1, q2);
                    }

            double v[4] = {0.0};
            auto idx_cc = static_cast<std::size_t>(m) * (N + 1) + n;
            auto idx_cs = static_cast<std::size_t>(m) * N + (n - 1);
            auto idx_sc = static_cast<std::size_t>(m - 1) * (N + 1) + n;
            auto idx_ss = static_cast<std::size_t>(m - 1) * N + (n - 1);
            {
                int i = 0;
                v[i++] = s.cc[idx_cc];
                if (d2 == 2) v[i++] = s.cs[idx_cs];
                if (d1 == 2) {
                    v[i++] = s.sc[idx_sc];
                    if (d2 == 2) v[i++] = s.sxs[idx_ss];
                }
            }
            if (!tiny_solve(A, v, dim)) resonant_mode(m, n, 0.0);
            {
                int i = 0;
                s.cc[idx_cc] = v[i++];
                if (d2 == 2) s.cs[idx_cs] = v[i++];
                if (d1 == 2) {
                    s.sc[idx_sc] = v[i++];
                    if (d2 == 2) s.sxs[idx_ss] = v[i++];
                }
            }
        }
    }
    return s;
}

//----------------------------------------------------------------------------
// Boundary functions
//----------------------------------------------------------------------------

std::vector<cd> ScalarHarmonic::row(double x, int k) const {
    std::vector<cd> raw = basis.eval_row(x, k);
    const std::size_t n = raw.size();
    std::vector<cd> out(n, cd(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += raw[j] * coeff(j, i);
    return out;
}

cd ScalarHarmonic::xi(double x, int k) const {
    std::vector<cd> r = row(x, k);
    cd acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r[i] * q[i];
    return acc;
}

void VectorHarmonic::rows(double x, int k, std::vector<cd>& xi1_row,
                          std::vector<cd>& xi2_row) const {
    const std::size_t n = basis.size();
    std::vector<cd> raw(n);
    for (std::size_t j = 0; j < n; ++j) raw[j] = eval_entry(basis[j].entry, x, k);
    xi1_row.assign(n, cd(0.0));
    xi2_row.assign(n, cd(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cd w = raw[j] * coeff(j, i);
            xi1_row[i] += basis[j].g1 * w;
            xi2_row[i] += basis[j].g2 * w;
        }
}

void VectorHarmonic::xi(double x, int k, cd& xi1, cd& xi2) const {
    const std::size_t n = basis.size();
    xi1 = xi2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cd raw = eval_entry(basis[j].entry, x, k);
        cd s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += coeff(j, i) * q[i];
        xi1 += basis[j].g1 * raw * s;
        xi2 += basis[j].g2 * raw * s;
    }
}

int BoundaryFunction2D::dof() const {
    int d = n0 ? 2 * r : 0;
    d += static_cast<int>(scalars.size()) * 2 * r;
    d += static_cast<int>(vectors.size()) * 4 * r;
    return d;
}

cd BoundaryFunction2D::eval_c(double xn, double xt, int kn, int kt, double* mag) const {
    cd acc = 0.0;
    double m = 0.0;
    if (n0) {
        // tangentially constant component, weight 1/2 like the series rows
        if (kt == 0) {
            cd v = 0.5 * n0->xi(xn, kn);
            acc += v;
            m += std::abs(v);
        }
    }
    for (const ScalarHarmonic& h : scalars) {
        cd v = h.xi(xn, kn) * dsin(h.beta, xt, kt);
        acc += v;
        m += std::abs(v);
    }
    for (const VectorHarmonic& h : vectors) {
        cd xi1, xi2;
        h.xi(xn, kn, xi1, xi2);
        cd v = xi1 * dcos(h.beta, xt, kt) + xi2 * dsin(h.beta, xt, kt);
        acc += v;
        m += std::abs(v);
    }
    if (mag) *mag += m;
    return acc;
}

namespace {

// Normalization matrix of a scalar harmonic: data functionals applied to
// the basis entries.  sine_sine carries even end derivatives (order 2j at
// the high end for i = j, at the low end for i = r + j); the full-range
// flavor carries the jumps of orders 0..2r-1.
ScalarHarmonic make_scalar_harmonic(const Polynomial& chi, int n, double beta,
                                    int r, double lo, double hi, Flavor flavor,
                                    const char* axis_label) {
    ScalarHarmonic h;
    h.n = n;
    h.beta = beta;
    h.basis = build_basis(find_roots(chi), lo, hi);
    const int dim = 2 * r;
    if (static_cast<int>(h.basis.entries.size()) != dim)
        fail_internal("make_scalar_harmonic: basis dimension != 2r");

    DenseMatrix R(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        std::vector<cd> row;
        if (flavor == Flavor::sine_sine) {
            int order = 2 * (i < r ? i : i - r);
            row = h.basis.eval_row(i < r ? hi : lo, order);
        } else {
            std::vector<cd> hr = h.basis.eval_row(hi, i);
            std::vector<cd> lr = h.basis.eval_row(lo, i);
            row.resize(hr.size());
            for (std::size_t j = 0; j < hr.size(); ++j) row[j] = hr[j] - lr[j];
        }
        for (int j = 0; j < dim; ++j)
            R(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                row[static_cast<std::size_t>(j)];
    }
    h.cond = cond_estimate(R);
    if (!(h.cond < 1e13)) {
        std::ostringstream os;
        os << "boundary data functionals degenerate for " << axis_label
           << "-normal harmonic " << n << " (condition " << h.cond << ")";
        fail_singular(os.str());
    }
    h.coeff = lu_inverse(R);
    h.q.assign(static_cast<std::size_t>(dim), cd(0.0));
    return h;
}

VectorHarmonic make_vector_harmonic(const Operator2D& op, int n, double beta,
                                    double lo, double hi, const char* axis_label) {
    VectorHarmonic h;
    h.n = n;
    h.beta = beta;
    PerHarmonicSystem sys = per_harmonic_system(op, n, beta);
    h.basis = system_basis(sys, lo, hi);
    const int r = sys.r;
    const int dim = 4 * r;
    if (static_cast<int>(h.basis.size()) != dim)
        fail_internal("make_vector_harmonic: basis dimension != 4r");

    // Data functionals: jumps of xi1 at orders 0..2r-1, then jumps of xi2.
    DenseMatrix R(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    for (int k = 0; k < 2 * r; ++k)
        for (int j = 0; j < dim; ++j) {
            const VectorBasisEntry& e = h.basis[static_cast<std::size_t>(j)];
            cd jump = eval_entry(e.entry, hi, k) - eval_entry(e.entry, lo, k);
            R(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) = e.g1 * jump;
            R(static_cast<std::size_t>(2 * r + k), static_cast<std::size_t>(j)) = e.g2 * jump;
        }
    h.cond = cond_estimate(R);
    if (!(h.cond < 1e13)) {
        std::ostringstream os;
        os << "boundary data functionals degenerate for " << axis_label
           << "-normal harmonic " << n << " (condition " << h.cond << ")";
        fail_singular(os.str());
    }
    h.coeff = lu_inverse(R);
    h.q.assign(static_cast<std::size_t>(dim), cd(0.0));
    return h;
}

BoundaryFunction2D build_boundary_block(const Operator2D& op, double n_lo, double n_hi,
                                        double t_half, Flavor flavor, int Nb,
                                        int axis, const char* axis_label) {
    BoundaryFunction2D bf;
    bf.axis = axis;
    bf.flavor = flavor;
    bf.r = op.r();
    bf.n_lo = n_lo;
    bf.n_hi = n_hi;
    bf.t_half = t_half;

    if (flavor == Flavor::sine_sine) {
        bf.scalars.reserve(static_cast<std::size_t>(Nb));
        for (int n = 1; n <= Nb; ++n) {
            double beta = pi * n / t_half;
            PerHarmonicSystem sys = per_harmonic_system(op, n, beta);
            bf.scalars.push_back(make_scalar_harmonic(sys.t11, n, beta, bf.r,
                                                      n_lo, n_hi, flavor, axis_label));
        }
        return bf;
    }

    bf.n0 = make_scalar_harmonic(characteristic_n0(op), 0, 0.0, bf.r,
                                 n_lo, n_hi, flavor, axis_label);
    bf.vectors.reserve(static_cast<std::size_t>(Nb));
    for (int n = 1; n <= Nb; ++n) {
        double beta = pi * n / t_half;
        bf.vectors.push_back(make_vector_harmonic(op, n, beta, n_lo, n_hi, axis_label));
    }
    return bf;
}

} // namespace

BoundaryFunction2D boundary_function_phi1(const Operator2D& op, const Domain& domain,
                                          Flavor flavor, int Nb) {
    return build_boundary_block(op, domain.x1_lo(), domain.x1_hi(), domain.b,
                                flavor, Nb, 0, "x1");
}

BoundaryFunction2D boundary_function_phi2(const Operator2D& op, const Domain& domain,
                                          Flavor flavor, int Nb) {
    Operator2D t = Operator2D::make(op.order);
    for (int k1 = 0; k1 <= op.order; ++k1)
        for (int k2 = 0; k2 <= op.order; ++k2) t.set(k1, k2, op.coeff(k2, k1));
    return build_boundary_block(t, domain.x2_lo(), domain.x2_hi(), domain.a,
                                flavor, Nb, 1, "x2");
}

//----------------------------------------------------------------------------
// Composite evaluation
//----------------------------------------------------------------------------

double CompositeSolution2D::eval(double x1, double x2, int k1, int k2) const {
    cd acc = phi0.eval(x1, x2, k1, k2);
    double mag = std::abs(acc);
    acc += phi1.eval_c(x1, x2, k1, k2, &mag);
    acc += phi2.eval_c(x2, x1, k2, k1, &mag);
    if (!phi3.empty()) {
        double v = phi3.eval(x1, x2, k1, k2);
        acc += v;
        mag += std::abs(v);
    }
    if (phis) {
        double v = phis->eval(x1, x2, k1, k2);
        acc += v;
        mag += std::abs(v);
    }
    if (std::abs(acc.imag()) > 1e-10 * (1.0 + mag))
        fail_internal("eval: imaginary residue above tolerance");
    return acc.real();
}

double eval_2d(const CompositeSolution2D& sol, double x1, double x2, int k1, int k2) {
    if (k1 < 0 || k2 < 0 || k1 > 2 * sol.r || k2 > 2 * sol.r)
        fail_validation("eval_2d: derivative order out of range (k <= 2r)");
    return sol.eval(x1, x2, k1, k2);
}

} // namespace fsm
