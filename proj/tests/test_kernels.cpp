//============================================================================
// test_kernels.cpp
//
// The contract here is exact: every parallel kernel must produce the same
// bits as its serial twin, because each output element is computed with the
// identical arithmetic order.  All comparisons below use operator== on
// doubles deliberately.
//============================================================================

#include "doctest.h"

#include <fsm/kernels.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace fsm;
using namespace fsm::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(gen);
    return v;
}

bool identical(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

} // namespace

TEST_CASE("sampling kernels: parallel output is bit-identical to serial") {
    const std::size_t np = 1003;
    std::vector<double> x = random_vec(np, 11);

    Sampler1D f = Sampler1D::from_expression("sin(3*x1)+x1*x1*x1");
    for (int k = 0; k <= 2; ++k) {
        std::vector<double> s(np), p(np);
        sample_1d_serial(f, x, k, s);
        sample_1d_parallel(f, x, k, p);
        CHECK(identical(s, p));
        CHECK(s[0] == f(x[0], k));
    }

    const std::size_t n1 = 53, n2 = 41;
    std::vector<double> x1 = random_vec(n1, 12), x2 = random_vec(n2, 13);
    Sampler2D g = Sampler2D::from_expression("exp(x1)*cos(2*x2)");
    std::vector<double> s(n1 * n2), p(n1 * n2);
    sample_2d_serial(g, x1, x2, 1, 0, s);
    sample_2d_parallel(g, x1, x2, 1, 0, p);
    CHECK(identical(s, p));
    CHECK(s[7 * n2 + 5] == g(x1[7], x2[5], 1, 0));
}

TEST_CASE("trig tables: layout, values and serial/parallel identity") {
    const std::size_t np = 517;
    const int M = 37;
    const double unit = 3.1;
    std::vector<double> x = random_vec(np, 21);

    for (TrigFamily fam : {TrigFamily::cosine, TrigFamily::sine}) {
        const std::size_t rows = static_cast<std::size_t>(trig_rows(M, fam));
        std::vector<double> s(rows * np), p(rows * np);
        trig_table_serial(x, unit, M, fam, s);
        trig_table_parallel(x, unit, M, fam, p);
        CHECK(identical(s, p));
        if (fam == TrigFamily::cosine) {
            CHECK(s[0] == 1.0);                       // mode 0 row
            CHECK(s[2 * np + 9] == std::cos(2 * unit * x[9]));
        } else {
            CHECK(s[9] == std::sin(unit * x[9]));     // first row is mode 1
            CHECK(s[3 * np + 9] == std::sin(4 * unit * x[9]));
        }
    }
}

TEST_CASE("contraction kernels: serial/parallel identity and values") {
    const int rows = 39, np = 211, cols = 23;
    std::vector<double> A = random_vec(static_cast<std::size_t>(rows) * np, 31);
    std::vector<double> B = random_vec(static_cast<std::size_t>(np) * cols, 32);
    std::vector<double> v = random_vec(np, 33);

    std::vector<double> s(rows), p(rows);
    contract_vec_serial(A, rows, np, v, s);
    contract_vec_parallel(A, rows, np, v, p);
    CHECK(identical(s, p));
    {
        double acc = 0.0;
        for (int i = 0; i < np; ++i) acc += A[5 * np + i] * v[i];
        CHECK(s[5] == acc);
    }

    std::vector<double> sm(static_cast<std::size_t>(rows) * cols);
    std::vector<double> pm(sm.size());
    contract_mat_serial(A, rows, np, B, cols, sm);
    contract_mat_parallel(A, rows, np, B, cols, pm);
    CHECK(identical(sm, pm));
    {
        double acc = 0.0;
        for (int i = 0; i < np; ++i) acc += A[4 * np + i] * B[i * cols + 7];
        CHECK(sm[4 * cols + 7] == acc);
    }

    const int rows2 = 17;
    std::vector<double> C = random_vec(static_cast<std::size_t>(rows2) * np, 34);
    std::vector<double> sd(static_cast<std::size_t>(rows) * rows2);
    std::vector<double> pd(sd.size());
    rowdot_serial(A, rows, C, rows2, np, sd);
    rowdot_parallel(A, rows, C, rows2, np, pd);
    CHECK(identical(sd, pd));
    {
        double acc = 0.0;
        for (int i = 0; i < np; ++i) acc += A[6 * np + i] * C[9 * np + i];
        CHECK(sd[6 * rows2 + 9] == acc);
    }
}

TEST_CASE("grid_eval: serial/parallel identity for an opaque callable") {
    const std::size_t np = 777;
    std::vector<double> x = random_vec(np, 41);
    auto f = [](double t) { return std::tgamma(2.0 + t * t); };
    std::vector<double> s(np), p(np);
    grid_eval_serial(f, x, s);
    grid_eval_parallel(f, x, p);
    CHECK(identical(s, p));
    CHECK(s[3] == f(x[3]));
}

TEST_CASE("dispatching kernel names agree with the serial variant") {
    const std::size_t np = 301;
    const int M = 19;
    std::vector<double> x = random_vec(np, 51);
    std::vector<double> s(static_cast<std::size_t>(M + 1) * np), d(s.size());
    trig_table_serial(x, 2.0, M, TrigFamily::cosine, s);
    trig_table(x, 2.0, M, TrigFamily::cosine, d);
    CHECK(identical(s, d));

    std::vector<double> v = random_vec(np, 52);
    std::vector<double> sv(M + 1), dv(M + 1);
    contract_vec_serial(s, M + 1, np, v, sv);
    contract_vec(s, M + 1, np, v, dv);
    CHECK(identical(sv, dv));
}
