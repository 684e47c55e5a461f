#include "doctest.h"

#include "fsm/polynomial.hpp"

#include <cmath>

using fsm::cd;
using fsm::Polynomial;

TEST_CASE("polynomial arithmetic and evaluation") {
    Polynomial p = Polynomial::from_real({1.0, 0.0, -2.0});        // 1 - 2 x^2
    Polynomial q = Polynomial::from_real({0.0, 3.0});              // 3 x
    Polynomial s = p + q;
    CHECK(std::abs(s.eval(2.0) - cd(1.0 + 6.0 - 8.0)) < 1e-14);
    Polynomial m = p * q;                                          // 3x - 6x^3
    CHECK(m.degree() == 3);
    CHECK(std::abs(m.eval(0.5) - cd(1.5 - 0.75)) < 1e-14);
    Polynomial d = m.derivative();                                 // 3 - 18 x^2
    CHECK(std::abs(d.eval(1.0) - cd(-15.0)) < 1e-14);
}

TEST_CASE("polynomial degree ignores trailing zeros after trim") {
    Polynomial p;
    p.c = {cd(1.0), cd(1e-20), cd(0.0), cd(1e-18)};
    p.trim();
    CHECK(p.degree() == 0);
    Polynomial z;
    z.c = {cd(0.0), cd(0.0)};
    CHECK(z.is_zero());
    CHECK(z.degree() == -1);
}

TEST_CASE("polynomial eval handles complex arguments") {
    Polynomial p = Polynomial::from_real({0.0, 0.0, 1.0});         // x^2
    cd z(0.0, 2.0);
    CHECK(std::abs(p.eval(z) - cd(-4.0, 0.0)) < 1e-14);
}
