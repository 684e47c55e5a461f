#pragma once
//============================================================================
// harness.hpp
//
// Front-end plumbing shared by the fsm CLI and the test suite: reference
// solutions with verified derivatives, run reports, deterministic CSV
// emission, and the three commands
//
//   solve        one problem file -> report + sampled solution
//   section2     boundary-layer comparison: polynomial-corrected series
//                approximation (baseline) vs the composite solver, error
//                curves over truncation for several layer strengths
//   convergence  error vs truncation against a named reference or a
//                manufactured exact solution
//
// Every command is deterministic: fixed row ordering and "%.12e" floats,
// so repeated runs produce byte-identical output.
//============================================================================

#include "fsm/discretize.hpp"
#include "fsm/series1d.hpp"

#include <map>
#include <string>
#include <vector>

namespace fsm {

//----------------------------------------------------------------------------
// Reference solutions
//----------------------------------------------------------------------------

// A closed-form solution with derivative access.  Registration verifies the
// sampler's derivatives against central finite differences (relative 1e-6,
// step 1e-5 * a); a failing entry is a defect, not user error.
struct ReferenceSolution {
    std::string name;
    bool is_2d = false;
    Sampler1D u1;
    Sampler2D u2;
    std::map<std::string, double> params;
};

// sinh(alpha (a - x)) / sinh(alpha a): value 1 at x = 0, 0 at x = a, with a
// layer of width 1/alpha at the left end for large alpha * a.
ReferenceSolution make_boundary_layer_reference(double alpha, double a);

// Looks a name up and instantiates it from the problem (the boundary-layer
// entry reads alpha out of the operator's zero-order coefficient).
ReferenceSolution find_reference(const std::string& name, const ProblemSpec& spec);
std::vector<std::string> reference_names();

//----------------------------------------------------------------------------
// Run report
//----------------------------------------------------------------------------

struct RunReport {
    std::string command;
    std::string problem;            // one-line digest of the problem
    std::string method;
    int M = 0, N = 0;
    double solve_seconds = 0.0;
    double bc_residual = 0.0;       // recomputed here by direct evaluation
    double pde_residual = 0.0;      // ditto, interior points
    bool ill_conditioned = false;
    std::vector<std::string> warnings;
    std::map<std::string, std::string> extra;   // command-specific fields

    std::string to_json() const;
};

//----------------------------------------------------------------------------
// Commands
//----------------------------------------------------------------------------

struct SolveOptions {
    Method method = Method::fcc;
    int eval_n = 101;                             // grid points per axis
    std::vector<std::pair<int, int>> derivs;      // extra derivative columns
    std::string out_dir;                          // empty: nothing written
};

struct SolveOutput {
    RunReport report;
    std::string csv;       // sampled solution
};

SolveOutput cmd_solve(const ProblemSpec& spec, const SolveOptions& opt);

struct Section2Options {
    std::vector<double> alphas = {0.01, 1.0, 10.0, 100.0};   // alpha * a values
    std::vector<int> Ms = {8, 16, 32, 64, 128};
    std::vector<int> ks = {0, 1, 2, 4};
    std::string out_dir;
};

struct Section2Output {
    RunReport report;
    std::string csv;       // method,alpha_a,M,k,error
};

Section2Output cmd_section2(const Section2Options& opt);

struct ConvergenceOptions {
    std::vector<int> Ms;
    std::string reference;       // registry name, or
    std::string manufactured;    // expression for the exact solution
    Method method = Method::fcc;
    std::string out_dir;
};

struct ConvergenceOutput {
    RunReport report;
    std::string csv;       // M,error
    bool monotone = false; // error nonincreasing over the sweep
};

ConvergenceOutput cmd_convergence(const ProblemSpec& spec, const ConvergenceOptions& opt);

//----------------------------------------------------------------------------
// Output helpers
//----------------------------------------------------------------------------

std::string format_float(double v);   // "%.12e"
void write_text_file(const std::string& path, const std::string& text);

} // namespace fsm
