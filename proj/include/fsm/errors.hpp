#pragma once
//============================================================================
// errors.hpp
//
// Error taxonomy for the solver library.  Every failure the library can
// signal falls into one of a few categories that the CLI maps to process
// exit codes:
//   validation / parse  -> exit 2
//   resonance           -> exit 3
//   singular system     -> exit 4
//============================================================================

#include <stdexcept>
#include <string>

namespace fsm {

enum class ErrorCode {
    validation,     // malformed or inconsistent problem description
    parse,          // unreadable input file / expression
    resonance,      // operator symbol vanishes on a retained Fourier mode
    singular,       // singular or numerically unusable linear system
    internal        // invariant violated inside the library itself
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Process exit codes for the CLI: bad input 2, resonance 3, singular 4,
// internal invariant failures 1.
inline int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::validation:
        case ErrorCode::parse: return 2;
        case ErrorCode::resonance: return 3;
        case ErrorCode::singular: return 4;
        case ErrorCode::internal: return 1;
    }
    return 1;
}

// Convenience throwers; keep call sites terse.
[[noreturn]] inline void fail_validation(const std::string& msg) {
    throw Error(ErrorCode::validation, msg);
}
[[noreturn]] inline void fail_parse(const std::string& msg) {
    throw Error(ErrorCode::parse, msg);
}
[[noreturn]] inline void fail_resonance(const std::string& msg) {
    throw Error(ErrorCode::resonance, msg);
}
[[noreturn]] inline void fail_singular(const std::string& msg) {
    throw Error(ErrorCode::singular, msg);
}
[[noreturn]] inline void fail_internal(const std::string& msg) {
    throw Error(ErrorCode::internal, msg);
}

} // namespace fsm
