#pragma once
//============================================================================
// polynomial.hpp
//
// Complex polynomials in one variable (ascending coefficients).  Used for
// characteristic polynomials of the interior operator and the per-harmonic
// ODE systems.
//============================================================================

#include <complex>
#include <vector>

namespace fsm {

using cd = std::complex<double>;

struct Polynomial {
    std::vector<cd> c;   // c[k] multiplies z^k

    static Polynomial zero() { return {}; }
    static Polynomial from_real(const std::vector<double>& re);

    int degree() const;                      // -1 for the zero polynomial
    bool is_zero() const;
    double max_coeff() const;

    cd eval(cd z) const;
    Polynomial derivative() const;

    // Drop trailing coefficients below rel_tol * max|c|.
    void trim(double rel_tol = 1e-14);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(cd s) const;
};

} // namespace fsm
