//============================================================================
// bench_kernels.cpp
//
// Times each serial/parallel kernel pair on solver-realistic sizes and
// prints a speedup table.  The parallel variants promise bit-identical
// results, so the winner is purely a matter of wall clock; the run aborts
// if the outputs ever differ.
//
//   usage: bench_kernels [repeats]      (default 5, best-of timing)
//   FSM_THREADS caps the parallel side, as everywhere else.
//============================================================================

#include <fsm/kernels.hpp>
#include <fsm/parallel.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
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

template <class F>
double best_of(int repeats, F&& run) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        run();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s,
            const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) {
            std::fprintf(stderr, "%s: serial and parallel outputs differ\n",
                         name);
            std::exit(1);
        }
    std::printf("%-14s %10.3f ms %10.3f ms %8.2fx\n", name, serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s);
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
    if (repeats < 1) {
        std::fprintf(stderr, "usage: bench_kernels [repeats >= 1]\n");
        return 2;
    }
    std::printf("threads: %d, best of %d runs\n", par::thread_count(), repeats);
    std::printf("%-14s %13s %13s %9s\n", "kernel", "serial", "parallel",
                "speedup");

    {
        const std::size_t n1 = 512, n2 = 512;
        std::vector<double> x1 = random_vec(n1, 1), x2 = random_vec(n2, 2);
        Sampler2D f = Sampler2D::from_expression(
            "exp(0.3*x1)*sin(2*x2)+cos(x1*3)*x2*x2");
        std::vector<double> s(n1 * n2), p(n1 * n2);
        double ts = best_of(repeats, [&] { sample_2d_serial(f, x1, x2, 1, 0, s); });
        double tp = best_of(repeats, [&] { sample_2d_parallel(f, x1, x2, 1, 0, p); });
        report("sample_2d", ts, tp, s, p);
    }

    {
        const std::size_t np = 8192;
        const int M = 511;
        std::vector<double> x = random_vec(np, 3);
        std::vector<double> s(static_cast<std::size_t>(M + 1) * np), p(s.size());
        double ts = best_of(repeats, [&] {
            trig_table_serial(x, 2.0, M, TrigFamily::cosine, s);
        });
        double tp = best_of(repeats, [&] {
            trig_table_parallel(x, 2.0, M, TrigFamily::cosine, p);
        });
        report("trig_table", ts, tp, s, p);

        std::vector<double> v = random_vec(np, 4);
        std::vector<double> sv(M + 1), pv(M + 1);
        double cs = best_of(repeats, [&] { contract_vec_serial(s, M + 1, np, v, sv); });
        double cp = best_of(repeats, [&] { contract_vec_parallel(s, M + 1, np, v, pv); });
        report("contract_vec", cs, cp, sv, pv);

        const int cols = 256;
        std::vector<double> B = random_vec(np * cols, 5);
        std::vector<double> sm(static_cast<std::size_t>(M + 1) * cols), pm(sm.size());
        double ms = best_of(repeats, [&] {
            contract_mat_serial(s, M + 1, np, B, cols, sm);
        });
        double mp = best_of(repeats, [&] {
            contract_mat_parallel(s, M + 1, np, B, cols, pm);
        });
        report("contract_mat", ms, mp, sm, pm);

        const int rows2 = 256;
        std::vector<double> C = random_vec(static_cast<std::size_t>(rows2) * np, 6);
        std::vector<double> sd(static_cast<std::size_t>(M + 1) * rows2), pd(sd.size());
        double ds = best_of(repeats, [&] { rowdot_serial(s, M + 1, C, rows2, np, sd); });
        double dp = best_of(repeats, [&] { rowdot_parallel(s, M + 1, C, rows2, np, pd); });
        report("rowdot", ds, dp, sd, pd);
    }

    {
        const std::size_t np = 2'000'000;
        std::vector<double> x = random_vec(np, 7);
        auto f = [](double t) { return std::sin(3 * t) * std::exp(-t * t); };
        std::vector<double> s(np), p(np);
        double ts = best_of(repeats, [&] { grid_eval_serial(f, x, s); });
        double tp = best_of(repeats, [&] { grid_eval_parallel(f, x, p); });
        report("grid_eval", ts, tp, s, p);
    }

    return 0;
}
