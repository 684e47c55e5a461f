#include "doctest.h"

#include "fsm/errors.hpp"
#include "fsm/linsolve.hpp"

#include <cmath>
#include <complex>
#include <vector>

using fsm::cd;
using fsm::DenseMatrix;

namespace {

// Binomial-formula inverse of the n-by-n Hilbert matrix, kept independent of
// any factorization in the library.
double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

double hilbert_inverse_entry(int n, int i, int j) {
    double s = ((i + j) % 2 == 0) ? 1.0 : -1.0;
    return s * (i + j + 1) * binom(n + i, n - j - 1) * binom(n + j, n - i - 1) *
           binom(i + j, i) * binom(i + j, i);
}

} // namespace

TEST_CASE("lu_solve reproduces a hand-checked system") {
    DenseMatrix A(3, 3);
    A(0, 0) = 2.0; A(0, 1) = 1.0;  A(0, 2) = -1.0;
    A(1, 0) = -3.0; A(1, 1) = -1.0; A(1, 2) = 2.0;
    A(2, 0) = -2.0; A(2, 1) = 1.0;  A(2, 2) = 2.0;
    std::vector<cd> b = {8.0, -11.0, -3.0};
    std::vector<cd> x = fsm::lu_solve(A, b);
    CHECK(std::abs(x[0] - cd(2.0)) < 1e-12);
    CHECK(std::abs(x[1] - cd(3.0)) < 1e-12);
    CHECK(std::abs(x[2] - cd(-1.0)) < 1e-12);
}

TEST_CASE("lu_solve rejects a singular matrix") {
    DenseMatrix A(2, 2);
    A(0, 0) = 1.0; A(0, 1) = 2.0;
    A(1, 0) = 2.0; A(1, 1) = 4.0;
    std::vector<cd> b = {1.0, 2.0};
    CHECK_THROWS_AS(fsm::lu_solve(A, b), fsm::Error);
}

TEST_CASE("qr_lstsq matches the normal-equations solution") {
    // Overdetermined fit of y = 1 + 2 t + 3 t^2 sampled with no noise.
    const int m = 12, n = 3;
    DenseMatrix A(m, n);
    std::vector<cd> b(m);
    for (int i = 0; i < m; ++i) {
        double t = -1.0 + 2.0 * i / (m - 1);
        A(i, 0) = 1.0;
        A(i, 1) = t;
        A(i, 2) = t * t;
        b[static_cast<std::size_t>(i)] = 1.0 + 2.0 * t + 3.0 * t * t;
    }
    std::vector<cd> x = fsm::qr_lstsq(A, b);
    REQUIRE(x.size() == 3);
    CHECK(std::abs(x[0] - cd(1.0)) < 1e-12);
    CHECK(std::abs(x[1] - cd(2.0)) < 1e-12);
    CHECK(std::abs(x[2] - cd(3.0)) < 1e-12);
}

TEST_CASE("cond_estimate tracks the Hilbert matrix condition number") {
    const int n = 6;
    DenseMatrix H(n, n);
    double norm1_H = 0.0;
    for (int j = 0; j < n; ++j) {
        double colsum = 0.0;
        for (int i = 0; i < n; ++i) {
            double v = 1.0 / (i + j + 1.0);
            H(i, j) = v;
            colsum += v;
        }
        norm1_H = std::max(norm1_H, colsum);
    }
    double norm1_Hinv = 0.0;
    for (int j = 0; j < n; ++j) {
        double colsum = 0.0;
        for (int i = 0; i < n; ++i) colsum += std::abs(hilbert_inverse_entry(n, i, j));
        norm1_Hinv = std::max(norm1_Hinv, colsum);
    }
    const double cond_true = norm1_H * norm1_Hinv;
    const double est = fsm::cond_estimate(H);
    CHECK(est <= cond_true * 1.01);
    CHECK(est >= cond_true / 10.0);
}

TEST_CASE("nullspace_2x2 agrees with the smallest singular direction") {
    // Rank-one matrix u v^H; the null direction is orthogonal to v.
    cd u1(1.3, -0.4), u2(0.2, 0.9);
    cd v1(0.6, 0.8), v2(-1.1, 0.5);
    DenseMatrix A(2, 2);
    A(0, 0) = u1 * std::conj(v1);
    A(0, 1) = u1 * std::conj(v2);
    A(1, 0) = u2 * std::conj(v1);
    A(1, 1) = u2 * std::conj(v2);
    auto [g1, g2] = fsm::nullspace_2x2(A);
    CHECK(std::abs(A(0, 0) * g1 + A(0, 1) * g2) < 1e-12);
    CHECK(std::abs(A(1, 0) * g1 + A(1, 1) * g2) < 1e-12);
    // Orthogonal to v up to normalization.
    CHECK(std::abs(std::conj(v1) * g1 + std::conj(v2) * g2) < 1e-12);
    CHECK(std::abs(g1) * std::abs(g1) + std::abs(g2) * std::abs(g2) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nullspace_2x2 rejects a well-conditioned matrix") {
    DenseMatrix A(2, 2);
    A(0, 0) = 1.0; A(0, 1) = 0.0;
    A(1, 0) = 0.0; A(1, 1) = 1.0;
    CHECK_THROWS_AS(fsm::nullspace_2x2(A), fsm::Error);
}
