//============================================================================
// charpoly.cpp
//============================================================================

#define EIGEN_DONT_PARALLELIZE
#include "fsm/charpoly.hpp"
#include "fsm/errors.hpp"
#include "fsm/linsolve.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fsm {

namespace {

// Lexicographic (Re, Im) with a tolerance on the real part so roots that
// differ only by eigen-solver noise (conjugate pairs on the imaginary axis,
// say) order the same way on every run.
bool root_order(const cd& a, const cd& b, double tol) {
    if (std::abs(a.real() - b.real()) > tol) return a.real() < b.real();
    return a.imag() < b.imag();
}

} // namespace

std::vector<RootCluster> find_roots(const Polynomial& p, double cluster_radius) {
    Polynomial q = p;
    q.trim();
    int deg = q.degree();
    if (deg < 1) fail_internal("find_roots: polynomial has no roots (degree < 1)");

    // Companion matrix of the monic normalization.
    using EMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>;
    EMat C = EMat::Zero(deg, deg);
    cd lead = q.c[static_cast<std::size_t>(deg)];
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -q.c[static_cast<std::size_t>(i)] / lead;

    Eigen::ComplexEigenSolver<EMat> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        fail_internal("find_roots: eigenvalue iteration failed");

    std::vector<cd> raw(static_cast<std::size_t>(deg));
    double max_abs = 0.0;
    for (int i = 0; i < deg; ++i) {
        raw[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        max_abs = std::max(max_abs, std::abs(raw[static_cast<std::size_t>(i)]));
    }
    const double scale = 1.0 + max_abs;
    const double order_tol = 1e-9 * scale;
    std::sort(raw.begin(), raw.end(),
              [&](const cd& a, const cd& b) { return root_order(a, b, order_tol); });

    // A multiplicity-m root perturbs its companion eigenvalues by
    // O(eps^(1/m)), so the clustering radius has to grow with the
    // hypothesized multiplicity.  For each unclaimed seed, try multiplicity
    // hypotheses from high to low and accept the first ball that contains
    // enough eigenvalues to support its own radius.
    const double eps = std::numeric_limits<double>::epsilon();
    auto radius_for = [&](int m) {
        return std::max(cluster_radius, std::pow(100.0 * eps, 1.0 / m)) * scale;
    };
    struct Acc { cd sum; int count; };
    std::vector<Acc> acc;
    std::vector<char> used(raw.size(), 0);
    for (std::size_t s = 0; s < raw.size(); ++s) {
        if (used[s]) continue;
        int remaining = 0;
        for (std::size_t i = s; i < raw.size(); ++i)
            if (!used[i]) ++remaining;
        std::vector<std::size_t> ball;
        for (int m = std::min(remaining, deg); m >= 1; --m) {
            ball.clear();
            const double radius = radius_for(m);
            for (std::size_t i = s; i < raw.size(); ++i)
                if (!used[i] && std::abs(raw[i] - raw[s]) <= radius) ball.push_back(i);
            if (static_cast<int>(ball.size()) >= m) break;
        }
        cd sum = 0.0;
        for (std::size_t i : ball) {
            used[i] = 1;
            sum += raw[i];
        }
        acc.push_back({sum, static_cast<int>(ball.size())});
    }

    // One Newton step on the (m-1)-th derivative polishes each cluster; a
    // multiplicity-m root is a simple root of p^(m-1).
    std::vector<Polynomial> derivs;
    derivs.push_back(q);
    int max_mult = 0;
    for (const Acc& a : acc) max_mult = std::max(max_mult, a.count);
    for (int m = 1; m <= max_mult; ++m) derivs.push_back(derivs.back().derivative());

    std::vector<RootCluster> out;
    out.reserve(acc.size());
    for (const Acc& a : acc) {
        cd eta = a.sum / static_cast<double>(a.count);
        int m = a.count;
        cd num = derivs[static_cast<std::size_t>(m - 1)].eval(eta);
        cd den = derivs[static_cast<std::size_t>(m)].eval(eta);
        if (std::abs(den) > 1e-300) eta -= num / den;
        out.push_back({eta, m});
    }
    std::sort(out.begin(), out.end(), [&](const RootCluster& a, const RootCluster& b) {
        return root_order(a.value, b.value, order_tol);
    });
    return out;
}

cd eval_entry(const BasisEntry& e, double x, int k) {
    const double t = x - e.x_ref;
    const cd ex = std::exp(e.eta * t);
    // d^k/dx^k [ t^j e^{eta t} ] = sum_i C(k,i) j!/(j-i)! t^{j-i} eta^{k-i} e^{eta t}
    cd sum = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= std::min(e.power, k); ++i) {
        double fall = 1.0;
        for (int q = 0; q < i; ++q) fall *= static_cast<double>(e.power - q);
        cd etapow = 1.0;
        for (int q = 0; q < k - i; ++q) etapow *= e.eta;
        double tpow = 1.0;
        for (int q = 0; q < e.power - i; ++q) tpow *= t;
        sum += binom * fall * tpow * etapow;
        binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
    return sum * ex;
}

std::vector<cd> HomogeneousBasis1D::eval_row(double x, int k) const {
    std::vector<cd> row(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        row[i] = eval_entry(entries[i], x, k);
    return row;
}

HomogeneousBasis1D build_basis(const std::vector<RootCluster>& roots, double lo, double hi) {
    HomogeneousBasis1D basis;
    basis.lo = lo;
    basis.hi = hi;
    for (const RootCluster& rc : roots) {
        double x_ref = rc.value.real() > 0.0 ? hi : lo;
        for (int j = 0; j < rc.multiplicity; ++j)
            basis.entries.push_back({rc.value, j, x_ref});
    }
    return basis;
}

Polynomial characteristic_1d(const Operator1D& op) {
    Polynomial p = Polynomial::from_real(op.coeffs);
    p.trim();
    // Keep the leading coefficient even if tiny relative trim removed others.
    if (p.degree() != op.order) {
        p = Polynomial::from_real(op.coeffs);
    }
    return p;
}

Polynomial characteristic_n0(const Operator2D& op) {
    std::vector<double> c(static_cast<std::size_t>(op.order) + 1, 0.0);
    for (int k1 = 0; k1 <= op.order; ++k1) c[static_cast<std::size_t>(k1)] = op.coeff(k1, 0);
    return Polynomial::from_real(c);
}

//----------------------------------------------------------------------------
// Per-harmonic systems
//----------------------------------------------------------------------------

PerHarmonicSystem per_harmonic_system(const Operator2D& op, int n, double beta) {
    PerHarmonicSystem sys;
    sys.n = n;
    sys.beta = beta;
    sys.r = op.r();

    const int deg = op.order;
    Polynomial t11, t12;
    t11.c.assign(static_cast<std::size_t>(deg) + 1, cd(0.0, 0.0));
    t12.c.assign(static_cast<std::size_t>(deg) + 1, cd(0.0, 0.0));

    // Substituting phi = xi_1(x1) cos(beta x2) + xi_2(x1) sin(beta x2) into
    // the operator: each tangential derivative pair flips sign, and odd
    // tangential orders swap the cos/sin components.
    for (int k1 = 0; k1 <= deg; ++k1)
        for (int k2 = 0; k2 + k1 <= deg; ++k2) {
            double a = op.coeff(k1, k2);
            if (a == 0.0) continue;
            double bp = std::pow(beta, k2);
            if (k2 % 2 == 0) {
                double sign = (k2 / 2) % 2 == 0 ? 1.0 : -1.0;
                t11.c[static_cast<std::size_t>(k1)] += a * sign * bp;
            } else {
                double sign = ((k2 - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
                t12.c[static_cast<std::size_t>(k1)] += a * sign * bp;
            }
        }
    t11.trim();
    t12.trim();

    sys.t11 = t11;
    sys.t12 = t12;
    sys.t21 = t12.scaled(cd(-1.0, 0.0));
    sys.det = t11 * t11 + t12 * t12;
    sys.det.trim();
    return sys;
}

std::vector<AmplitudeDirection> amplitude_relation(const PerHarmonicSystem& sys,
                                                   const RootCluster& root) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (sys.t12.is_zero())
        return {{cd(1.0, 0.0), cd(0.0, 0.0)}, {cd(0.0, 0.0), cd(1.0, 0.0)}};

    const cd eta = root.value;
    const cd v11 = sys.t11.eval(eta);
    const cd v12 = sys.t12.eval(eta);

    double scale = std::max(sys.t11.max_coeff(), sys.t12.max_coeff()) *
                   std::pow(1.0 + std::abs(eta), 2.0 * sys.r);
    if (std::abs(v11) + std::abs(v12) <= 1e-8 * scale) {
        // Both scalar factors vanish here; the full 2D nullspace.
        return {{cd(inv_sqrt2, 0.0), cd(0.0, -inv_sqrt2)},
                {cd(inv_sqrt2, 0.0), cd(0.0, inv_sqrt2)}};
    }

    DenseMatrix T(2, 2);
    T(0, 0) = v11;
    T(0, 1) = v12;
    T(1, 0) = -v12;
    T(1, 1) = v11;
    auto v = nullspace_2x2(T);
    return {{v[0], v[1]}};
}

std::vector<VectorBasisEntry> system_basis(const PerHarmonicSystem& sys,
                                           double lo, double hi) {
    std::vector<VectorBasisEntry> out;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    if (sys.t12.is_zero()) {
        // Decoupled: xi_1 and xi_2 independently span the t11 solution space.
        auto roots = find_roots(sys.t11);
        auto basis = build_basis(roots, lo, hi);
        for (const BasisEntry& e : basis.entries) {
            out.push_back({e, cd(1.0, 0.0), cd(0.0, 0.0)});
            out.push_back({e, cd(0.0, 0.0), cd(1.0, 0.0)});
        }
        return out;
    }

    // Coupled: factor the determinant as (t11 - i t12)(t11 + i t12) and
    // attach the fixed complex directions to each scalar factor's chains.
    Polynomial gneg = sys.t11 - sys.t12.scaled(cd(0.0, 1.0));
    Polynomial gpos = sys.t11 + sys.t12.scaled(cd(0.0, 1.0));

    auto emit = [&](const Polynomial& g, cd g1, cd g2) {
        auto roots = find_roots(g);
        auto basis = build_basis(roots, lo, hi);
        for (const BasisEntry& e : basis.entries)
            out.push_back({e, g1, g2});
    };
    emit(gneg, cd(inv_sqrt2, 0.0), cd(0.0, -inv_sqrt2));
    emit(gpos, cd(inv_sqrt2, 0.0), cd(0.0, inv_sqrt2));
    return out;
}

} // namespace fsm
