#pragma once
//============================================================================
// kernels.hpp
//
// The numerical hot loops, each in a serial and an OpenMP variant.  Every
// kernel writes each output element independently with the same arithmetic
// order in both variants, so the parallel results are bit-identical to the
// serial ones; the unit tests assert exact equality and the bench target
// times the pairs against each other.
//
// The undecorated name dispatches to the parallel variant (which itself
// degrades to the serial loop when only one thread is available).
//============================================================================

#include "fsm/problem.hpp"

#include <functional>
#include <span>

namespace fsm::kernels {

//----------------------------------------------------------------------------
// Sampling closed-form data onto quadrature / evaluation grids
//----------------------------------------------------------------------------

void sample_1d_serial(const Sampler1D& f, std::span<const double> x, int k,
                      std::span<double> out);
void sample_1d_parallel(const Sampler1D& f, std::span<const double> x, int k,
                        std::span<double> out);
void sample_1d(const Sampler1D& f, std::span<const double> x, int k,
               std::span<double> out);

// Tensor grid, row-major out[i1*n2 + i2].
void sample_2d_serial(const Sampler2D& f, std::span<const double> x1,
                      std::span<const double> x2, int k1, int k2,
                      std::span<double> out);
void sample_2d_parallel(const Sampler2D& f, std::span<const double> x1,
                        std::span<const double> x2, int k1, int k2,
                        std::span<double> out);
void sample_2d(const Sampler2D& f, std::span<const double> x1,
               std::span<const double> x2, int k1, int k2,
               std::span<double> out);

//----------------------------------------------------------------------------
// Trigonometric mode tables and contractions (Fourier coefficient engines)
//----------------------------------------------------------------------------

enum class TrigFamily { cosine, sine };

// Number of table rows for modes up to M: cosine keeps m = 0..M, sine m = 1..M.
inline int trig_rows(int M, TrigFamily fam) {
    return fam == TrigFamily::cosine ? M + 1 : M;
}

// table[row*np + i] = trig(mode * unit * x[i]) with mode = row (cosine) or
// row + 1 (sine).  No weights folded in; callers fold weights into the data.
void trig_table_serial(std::span<const double> x, double unit, int M,
                       TrigFamily fam, std::span<double> table);
void trig_table_parallel(std::span<const double> x, double unit, int M,
                         TrigFamily fam, std::span<double> table);
void trig_table(std::span<const double> x, double unit, int M, TrigFamily fam,
                std::span<double> table);

// out[r] = sum_i A[r*np + i] * v[i]   (matrix-vector over a shared grid axis)
void contract_vec_serial(std::span<const double> A, int rows, int np,
                         std::span<const double> v, std::span<double> out);
void contract_vec_parallel(std::span<const double> A, int rows, int np,
                           std::span<const double> v, std::span<double> out);
void contract_vec(std::span<const double> A, int rows, int np,
                  std::span<const double> v, std::span<double> out);

// out[r*cols + j] = sum_i A[r*np + i] * B[i*cols + j]
void contract_mat_serial(std::span<const double> A, int rows, int np,
                         std::span<const double> B, int cols,
                         std::span<double> out);
void contract_mat_parallel(std::span<const double> A, int rows, int np,
                           std::span<const double> B, int cols,
                           std::span<double> out);
void contract_mat(std::span<const double> A, int rows, int np,
                  std::span<const double> B, int cols, std::span<double> out);

// out[r1*rows2 + r2] = sum_i A[r1*np + i] * B[r2*np + i]   (A · B^T)
void rowdot_serial(std::span<const double> A, int rows1,
                   std::span<const double> B, int rows2, int np,
                   std::span<double> out);
void rowdot_parallel(std::span<const double> A, int rows1,
                     std::span<const double> B, int rows2, int np,
                     std::span<double> out);
void rowdot(std::span<const double> A, int rows1, std::span<const double> B,
            int rows2, int np, std::span<double> out);

//----------------------------------------------------------------------------
// Pointwise evaluation of assembled solutions on output grids
//----------------------------------------------------------------------------

void grid_eval_serial(const std::function<double(double)>& f,
                      std::span<const double> x, std::span<double> out);
void grid_eval_parallel(const std::function<double(double)>& f,
                        std::span<const double> x, std::span<double> out);
void grid_eval(const std::function<double(double)>& f,
               std::span<const double> x, std::span<double> out);

} // namespace fsm::kernels
