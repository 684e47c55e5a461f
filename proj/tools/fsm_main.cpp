//============================================================================
// fsm: spectral boundary-value solver CLI.
//
//   fsm solve <file> [--method fcc|collocation] [--eval N]
//                    [--deriv k1[,k2]]... [--out dir]
//   fsm section2 [--alpha list] [--M list] [--k list] [--out dir]
//   fsm convergence <file> --M list (--reference name | --manufactured expr)
//                    [--method ...] [--out dir]
//
// Exit codes: 0 ok, 2 bad input (parse/validation), 3 resonant mode,
// 4 singular system, 1 internal failure.
//============================================================================

#include "fsm/errors.hpp"
#include "fsm/harness.hpp"
#include "fsm/problem_json.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

fsm::Method method_from(const std::string& s) {
    if (s == "fcc") return fsm::Method::fcc;
    if (s == "collocation") return fsm::Method::collocation;
    fsm::fail_parse("unknown method \"" + s + "\" (use fcc or collocation)");
}

std::pair<int, int> parse_deriv(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return {std::stoi(s), 0};
        return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
    } catch (const std::exception&) {
        fsm::fail_parse("bad --deriv value \"" + s + "\" (expected k1 or k1,k2)");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier-series multiscale solver for constant-coefficient "
                 "boundary value problems on intervals and rectangles"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "solve one problem file");
    std::string solve_file, solve_method = "fcc", solve_out;
    int eval_n = 101;
    std::vector<std::string> deriv_specs;
    solve->add_option("file", solve_file, "problem JSON file")->required();
    solve->add_option("--method", solve_method, "fcc or collocation");
    solve->add_option("--eval", eval_n, "sample grid points per axis");
    solve->add_option("--deriv", deriv_specs, "extra derivative column k1[,k2]");
    solve->add_option("--out", solve_out, "output directory");

    // section2
    auto* section2 = app.add_subcommand(
        "section2", "boundary-layer comparison: baseline vs multiscale");
    fsm::Section2Options s2;
    section2->add_option("--alpha", s2.alphas, "layer strengths alpha*a")
        ->delimiter(',');
    section2->add_option("--M", s2.Ms, "truncation orders")->delimiter(',');
    section2->add_option("--k", s2.ks, "derivative orders")->delimiter(',');
    section2->add_option("--out", s2.out_dir, "output directory");

    // convergence
    auto* conv = app.add_subcommand("convergence", "error vs truncation sweep");
    std::string conv_file, conv_method = "fcc";
    fsm::ConvergenceOptions co;
    conv->add_option("file", conv_file, "problem JSON file")->required();
    conv->add_option("--M", co.Ms, "truncation orders")->delimiter(',');
    conv->add_option("--reference", co.reference, "named reference solution");
    conv->add_option("--manufactured", co.manufactured,
                     "expression for the exact solution");
    conv->add_option("--method", conv_method, "fcc or collocation");
    conv->add_option("--out", co.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);   // --help
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) {
            fsm::SolveOptions opt;
            opt.method = method_from(solve_method);
            opt.eval_n = eval_n;
            for (const std::string& d : deriv_specs)
                opt.derivs.push_back(parse_deriv(d));
            opt.out_dir = solve_out;
            const fsm::ProblemSpec spec = fsm::load_problem_file(solve_file);
            const fsm::SolveOutput out = fsm::cmd_solve(spec, opt);
            std::fputs(out.report.to_json().c_str(), stdout);
        } else if (section2->parsed()) {
            const fsm::Section2Output out = fsm::cmd_section2(s2);
            if (s2.out_dir.empty())
                std::fputs(out.csv.c_str(), stdout);
            else
                std::fputs(out.report.to_json().c_str(), stdout);
        } else if (conv->parsed()) {
            co.method = method_from(conv_method);
            const fsm::ProblemSpec spec = fsm::load_problem_file(conv_file);
            const fsm::ConvergenceOutput out = fsm::cmd_convergence(spec, co);
            if (co.out_dir.empty())
                std::fputs(out.csv.c_str(), stdout);
            else
                std::fputs(out.report.to_json().c_str(), stdout);
        }
    } catch (const fsm::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return fsm::exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return 0;
}
