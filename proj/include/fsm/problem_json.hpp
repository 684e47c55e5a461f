#pragma once
//============================================================================
// problem_json.hpp
//
// JSON problem files.  Schema (UTF-8, numbers as IEEE double decimal text):
//
//   {
//     "domain":     {"kind": "interval"|"interval_symmetric"|
//                            "rect"|"rect_symmetric",
//                    "a": number, "b": number (2D only)},
//     "operator":   {"order": 2r,
//                    "coeffs": [{"k": [k1] | [k1,k2], "a": number}, ...]},
//     "flavor":     "full"|"half_cosine"|"half_sine"|"full_2d"|"sine_sine",
//     "truncation": {"M": int, "N": int (2D, default M)},
//     "forcing":    {"f": number|expr,
//                    "fs_poly": [{"k": [...], "c": number}, ...] (optional)},
//     "bcs":        {"x1_max": [{"coeffs": [{"k": [...], "b": number}, ...],
//                                "g": number|expr}, ...],
//                    "x1_min": [...], "x2_max": [...], "x2_min": [...]}
//   }
//
// Expressions use the grammar of expression.hpp (x1, x2, pi, + - * / ^,
// sin cos sinh cosh exp).  Boundary data g is a number on interval domains
// and a number or expression in the tangential coordinate on rectangles.
//
// Errors carry the JSON pointer of the offending element.
//============================================================================

#include "fsm/problem.hpp"

#include <string>

namespace fsm {

// Parses (without validating) a problem file.  Call validate() afterwards.
ProblemSpec parse_problem(const std::string& text);

// Emits the schema above; parse_problem(serialize_problem(s)) reproduces s
// up to floating-point text round-trip for specs whose samplers came from
// expressions or constants.
std::string serialize_problem(const ProblemSpec& spec);

// Reads a file and parses it; parse errors are prefixed with the path.
ProblemSpec load_problem_file(const std::string& path);

} // namespace fsm
