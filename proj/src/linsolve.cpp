//============================================================================
// linsolve.cpp
//
// Eigen supplies the factorizations; this file adapts them to the library's
// row-major complex matrix type, adds the scale-aware singularity checks,
// and implements the 1-norm condition estimator on top of the LU factors so
// no explicit inverse is ever formed.
//============================================================================

#define EIGEN_DONT_PARALLELIZE
#include "fsm/linsolve.hpp"
#include "fsm/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace fsm {

namespace {

using EMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>;
using EVec = Eigen::Matrix<cd, Eigen::Dynamic, 1>;

EMat to_eigen(const DenseMatrix& A) {
    EMat m(static_cast<Eigen::Index>(A.rows()), static_cast<Eigen::Index>(A.cols()));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = A(i, j);
    return m;
}

EVec to_eigen(std::span<const cd> b) {
    EVec v(static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i) v(static_cast<Eigen::Index>(i)) = b[i];
    return v;
}

std::vector<cd> from_eigen(const EVec& v) {
    std::vector<cd> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
}

// Hager/Higham power iteration estimating ||A^-1||_1 from solves with the
// factored matrix and its adjoint.
double inv_norm1_estimate(const Eigen::PartialPivLU<EMat>& lu, Eigen::Index n) {
    EVec x = EVec::Constant(n, cd(1.0 / static_cast<double>(n), 0.0));
    double est = 0.0;
    Eigen::Index last_j = -1;
    for (int iter = 0; iter < 5; ++iter) {
        EVec y = lu.solve(x);
        double y1 = y.template lpNorm<1>();
        est = std::max(est, y1);

        // xi = sign(y), then z = A^-H xi
        EVec xi(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double m = std::abs(y(i));
            xi(i) = m > 0.0 ? y(i) / m : cd(1.0, 0.0);
        }
        EVec z = lu.adjoint().solve(xi);

        Eigen::Index j = 0;
        double zmax = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double m = std::abs(z(i));
            if (m > zmax) { zmax = m; j = i; }
        }
        double zx = std::abs(z.dot(x));
        if (zmax <= zx || j == last_j) break;
        x.setZero();
        x(j) = 1.0;
        last_j = j;
    }
    return est;
}

} // namespace

bool DenseMatrix::all_finite() const {
    for (const cd& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double DenseMatrix::norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double DenseMatrix::norm_max() const {
    double best = 0.0;
    for (const cd& v : a_) best = std::max(best, std::abs(v));
    return best;
}

std::vector<cd> lu_solve(const DenseMatrix& A, std::span<const cd> b) {
    if (A.rows() != A.cols()) fail_internal("lu_solve: matrix not square");
    if (A.rows() != b.size()) fail_internal("lu_solve: dimension mismatch");
    if (!A.all_finite()) fail_internal("lu_solve: non-finite matrix entry");

    EMat m = to_eigen(A);
    Eigen::PartialPivLU<EMat> lu(m);

    // Partial pivoting leaves the singularity evidence on the U diagonal.
    double scale = A.norm_max();
    double umin = std::numeric_limits<double>::infinity();
    const auto& LU = lu.matrixLU();
    for (Eigen::Index i = 0; i < LU.rows(); ++i)
        umin = std::min(umin, std::abs(LU(i, i)));
    if (!(umin > scale * 1e-300) || scale == 0.0)
        fail_singular("lu_solve: matrix is singular to working precision");

    return from_eigen(lu.solve(to_eigen(b)));
}

DenseMatrix lu_inverse(const DenseMatrix& A) {
    if (A.rows() != A.cols()) fail_internal("lu_inverse: matrix not square");
    const std::size_t n = A.rows();
    EMat m = to_eigen(A);
    Eigen::PartialPivLU<EMat> lu(m);
    double scale = A.norm_max();
    double umin = std::numeric_limits<double>::infinity();
    const auto& LU = lu.matrixLU();
    for (Eigen::Index i = 0; i < LU.rows(); ++i)
        umin = std::min(umin, std::abs(LU(i, i)));
    if (!(umin > scale * 1e-300) || scale == 0.0)
        fail_singular("lu_inverse: matrix is singular to working precision");
    EMat inv = lu.inverse();
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

std::vector<cd> qr_lstsq(const DenseMatrix& A, std::span<const cd> b) {
    if (A.rows() < A.cols()) fail_internal("qr_lstsq: fewer rows than columns");
    if (A.rows() != b.size()) fail_internal("qr_lstsq: dimension mismatch");
    if (!A.all_finite()) fail_internal("qr_lstsq: non-finite matrix entry");

    EMat m = to_eigen(A);
    Eigen::ColPivHouseholderQR<EMat> qr(m);
    qr.setThreshold(1e-13);
    if (qr.rank() < static_cast<Eigen::Index>(A.cols()))
        fail_singular("qr_lstsq: rank-deficient least-squares system");
    return from_eigen(qr.solve(to_eigen(b)));
}

double cond_estimate(const DenseMatrix& A) {
    if (A.rows() != A.cols()) fail_internal("cond_estimate: matrix not square");
    const Eigen::Index n = static_cast<Eigen::Index>(A.rows());
    if (n == 0) return 1.0;

    EMat m = to_eigen(A);
    Eigen::PartialPivLU<EMat> lu(m);
    double umin = std::numeric_limits<double>::infinity();
    const auto& LU = lu.matrixLU();
    for (Eigen::Index i = 0; i < n; ++i)
        umin = std::min(umin, std::abs(LU(i, i)));
    if (!(umin > 0.0)) return std::numeric_limits<double>::infinity();

    return A.norm1() * inv_norm1_estimate(lu, n);
}

std::array<cd, 2> nullspace_2x2(const DenseMatrix& A) {
    if (A.rows() != 2 || A.cols() != 2) fail_internal("nullspace_2x2: matrix not 2x2");

    const cd a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
    const double scale = A.norm_max();
    if (scale == 0.0) return {cd(1.0, 0.0), cd(0.0, 0.0)};

    // A singular 2x2 has parallel rows; the orthogonal complement of the
    // larger row annihilates both.
    double r0 = std::abs(a) + std::abs(b);
    double r1 = std::abs(c) + std::abs(d);
    cd v0, v1;
    if (r0 >= r1) { v0 = b; v1 = -a; }
    else          { v0 = d; v1 = -c; }
    double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
    if (nrm == 0.0) { v0 = 1.0; v1 = 0.0; nrm = 1.0; }
    v0 /= nrm;
    v1 /= nrm;

    double res = std::hypot(std::abs(a * v0 + b * v1), std::abs(c * v0 + d * v1));
    if (res > 1e-10 * scale)
        fail_singular("nullspace_2x2: matrix has no nullspace at the requested tolerance");
    return {v0, v1};
}

} // namespace fsm
