#pragma once
//============================================================================
// linsolve.hpp
//
// Dense complex linear algebra used by the solver: LU with partial pivoting,
// Householder least squares, a 1-norm condition estimate, and the 2x2
// nullspace extraction that fixes per-harmonic amplitude ratios.  Matrices
// stay small (n <= ~2000), so a dense row-major layout is all we need.
//============================================================================

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fsm {

using cd = std::complex<double>;

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cd(0.0, 0.0)) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cd& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cd& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    cd* data() { return a_.data(); }
    const cd* data() const { return a_.data(); }

    bool all_finite() const;
    double norm1() const;        // max column sum of |entries|
    double norm_max() const;     // largest |entry|

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cd> a_;
};

// Solve the square system A x = b by LU with partial pivoting.
// Throws fsm::Error(singular) when a pivot is negligible relative to the
// matrix scale.
std::vector<cd> lu_solve(const DenseMatrix& A, std::span<const cd> b);

// Minimize ||A x - b||_2 for rows >= cols via Householder QR.
// Throws fsm::Error(singular) on rank deficiency.
std::vector<cd> qr_lstsq(const DenseMatrix& A, std::span<const cd> b);

// Estimate of the 1-norm condition number ||A||_1 ||A^-1||_1 (Hager-style
// power iteration on the LU factors; reliable within a factor of ~10).
// Returns +inf for numerically singular input.
double cond_estimate(const DenseMatrix& A);

// Unit-norm v with A v ~= 0 for a (near-)singular 2x2 matrix.  Throws
// fsm::Error(singular) when no direction achieves ||A v|| <= 1e-10 ||A||,
// which signals that the matrix was not actually singular.
std::array<cd, 2> nullspace_2x2(const DenseMatrix& A);

// Matrix inverse helper used when normalizing boundary bases (small n).
DenseMatrix lu_inverse(const DenseMatrix& A);

} // namespace fsm
