//============================================================================
// kernels.cpp
//============================================================================

#include "fsm/kernels.hpp"
#include "fsm/parallel.hpp"

#include <cmath>
#include <cstddef>

namespace fsm::kernels {

namespace {

inline std::size_t sz(int v) { return static_cast<std::size_t>(v); }

} // namespace

//----------------------------------------------------------------------------
// sampling
//----------------------------------------------------------------------------

void sample_1d_serial(const Sampler1D& f, std::span<const double> x, int k,
                      std::span<double> out) {
    par::serial_for(x.size(), [&](std::size_t i) { out[i] = f(x[i], k); });
}

void sample_1d_parallel(const Sampler1D& f, std::span<const double> x, int k,
                        std::span<double> out) {
    par::parallel_for(x.size(), [&](std::size_t i) { out[i] = f(x[i], k); });
}

void sample_1d(const Sampler1D& f, std::span<const double> x, int k,
               std::span<double> out) {
    sample_1d_parallel(f, x, k, out);
}

void sample_2d_serial(const Sampler2D& f, std::span<const double> x1,
                      std::span<const double> x2, int k1, int k2,
                      std::span<double> out) {
    const std::size_t n2 = x2.size();
    par::serial_for(x1.size(), [&](std::size_t i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2)
            out[i1 * n2 + i2] = f(x1[i1], x2[i2], k1, k2);
    });
}

void sample_2d_parallel(const Sampler2D& f, std::span<const double> x1,
                        std::span<const double> x2, int k1, int k2,
                        std::span<double> out) {
    const std::size_t n2 = x2.size();
    par::parallel_for(x1.size(), [&](std::size_t i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2)
            out[i1 * n2 + i2] = f(x1[i1], x2[i2], k1, k2);
    });
}

void sample_2d(const Sampler2D& f, std::span<const double> x1,
               std::span<const double> x2, int k1, int k2,
               std::span<double> out) {
    sample_2d_parallel(f, x1, x2, k1, k2, out);
}

//----------------------------------------------------------------------------
// mode tables and contractions
//----------------------------------------------------------------------------

namespace {

inline void trig_table_row(std::span<const double> x, double unit, int M,
                           TrigFamily fam, std::span<double> table,
                           std::size_t r) {
    const std::size_t np = x.size();
    const int mode = fam == TrigFamily::cosine ? static_cast<int>(r)
                                               : static_cast<int>(r) + 1;
    const double w = unit * mode;
    double* row = table.data() + r * np;
    if (fam == TrigFamily::cosine)
        for (std::size_t i = 0; i < np; ++i) row[i] = std::cos(w * x[i]);
    else
        for (std::size_t i = 0; i < np; ++i) row[i] = std::sin(w * x[i]);
    (void)M;
}

} // namespace

void trig_table_serial(std::span<const double> x, double unit, int M,
                       TrigFamily fam, std::span<double> table) {
    par::serial_for(sz(trig_rows(M, fam)),
                    [&](std::size_t r) { trig_table_row(x, unit, M, fam, table, r); });
}

void trig_table_parallel(std::span<const double> x, double unit, int M,
                         TrigFamily fam, std::span<double> table) {
    par::parallel_for(sz(trig_rows(M, fam)),
                      [&](std::size_t r) { trig_table_row(x, unit, M, fam, table, r); });
}

void trig_table(std::span<const double> x, double unit, int M, TrigFamily fam,
                std::span<double> table) {
    trig_table_parallel(x, unit, M, fam, table);
}

void contract_vec_serial(std::span<const double> A, int rows, int np,
                         std::span<const double> v, std::span<double> out) {
    par::serial_for(sz(rows), [&](std::size_t r) {
        const double* row = A.data() + r * sz(np);
        double acc = 0.0;
        for (int i = 0; i < np; ++i) acc += row[sz(i)] * v[sz(i)];
        out[r] = acc;
    });
}

void contract_vec_parallel(std::span<const double> A, int rows, int np,
                           std::span<const double> v, std::span<double> out) {
    par::parallel_for(sz(rows), [&](std::size_t r) {
        const double* row = A.data() + r * sz(np);
        double acc = 0.0;
        for (int i = 0; i < np; ++i) acc += row[sz(i)] * v[sz(i)];
        out[r] = acc;
    });
}

void contract_vec(std::span<const double> A, int rows, int np,
                  std::span<const double> v, std::span<double> out) {
    contract_vec_parallel(A, rows, np, v, out);
}

namespace {

inline void contract_mat_row(std::span<const double> A, int np,
                             std::span<const double> B, int cols,
                             std::span<double> out, std::size_t r) {
    const double* arow = A.data() + r * sz(np);
    double* orow = out.data() + r * sz(cols);
    for (int j = 0; j < cols; ++j) orow[sz(j)] = 0.0;
    for (int i = 0; i < np; ++i) {
        const double a = arow[sz(i)];
        const double* brow = B.data() + sz(i) * sz(cols);
        for (int j = 0; j < cols; ++j) orow[sz(j)] += a * brow[sz(j)];
    }
}

inline void rowdot_row(std::span<const double> A, std::span<const double> B,
                       int rows2, int np, std::span<double> out, std::size_t r1) {
    const double* arow = A.data() + r1 * sz(np);
    double* orow = out.data() + r1 * sz(rows2);
    for (int r2 = 0; r2 < rows2; ++r2) {
        const double* brow = B.data() + sz(r2) * sz(np);
        double acc = 0.0;
        for (int i = 0; i < np; ++i) acc += arow[sz(i)] * brow[sz(i)];
        orow[sz(r2)] = acc;
    }
}

} // namespace

void contract_mat_serial(std::span<const double> A, int rows, int np,
                         std::span<const double> B, int cols,
                         std::span<double> out) {
    par::serial_for(sz(rows),
                    [&](std::size_t r) { contract_mat_row(A, np, B, cols, out, r); });
}

void contract_mat_parallel(std::span<const double> A, int rows, int np,
                           std::span<const double> B, int cols,
                           std::span<double> out) {
    par::parallel_for(sz(rows),
                      [&](std::size_t r) { contract_mat_row(A, np, B, cols, out, r); });
}

void contract_mat(std::span<const double> A, int rows, int np,
                  std::span<const double> B, int cols, std::span<double> out) {
    contract_mat_parallel(A, rows, np, B, cols, out);
}

void rowdot_serial(std::span<const double> A, int rows1,
                   std::span<const double> B, int rows2, int np,
                   std::span<double> out) {
    par::serial_for(sz(rows1),
                    [&](std::size_t r) { rowdot_row(A, B, rows2, np, out, r); });
}

void rowdot_parallel(std::span<const double> A, int rows1,
                     std::span<const double> B, int rows2, int np,
                     std::span<double> out) {
    par::parallel_for(sz(rows1),
                      [&](std::size_t r) { rowdot_row(A, B, rows2, np, out, r); });
}

void rowdot(std::span<const double> A, int rows1, std::span<const double> B,
            int rows2, int np, std::span<double> out) {
    rowdot_parallel(A, rows1, B, rows2, np, out);
}

//----------------------------------------------------------------------------
// grid evaluation
//----------------------------------------------------------------------------

void grid_eval_serial(const std::function<double(double)>& f,
                      std::span<const double> x, std::span<double> out) {
    par::serial_for(x.size(), [&](std::size_t i) { out[i] = f(x[i]); });
}

void grid_eval_parallel(const std::function<double(double)>& f,
                        std::span<const double> x, std::span<double> out) {
    par::parallel_for(x.size(), [&](std::size_t i) { out[i] = f(x[i]); });
}

void grid_eval(const std::function<double(double)>& f,
               std::span<const double> x, std::span<double> out) {
    grid_eval_parallel(f, x, out);
}

} // namespace fsm::kernels
