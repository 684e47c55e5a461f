#include "doctest.h"

#include "fsm/errors.hpp"
#include "fsm/expression.hpp"

#include <cmath>

using fsm::expr::Expr;

TEST_CASE("expression parse and eval") {
    Expr e = Expr::parse("sin(pi*x1) + 2*x2^2");
    CHECK(e.valid());
    CHECK(e.eval(0.5, 1.0) == doctest::Approx(1.0 + 2.0).epsilon(1e-14));
    CHECK(e.eval(1.0, 3.0) == doctest::Approx(std::sin(std::acos(-1.0)) + 18.0).epsilon(1e-12));

    Expr c = Expr::parse("3/4 - 2^3");
    double v = 0.0;
    CHECK(c.is_constant(&v));
    CHECK(v == doctest::Approx(0.75 - 8.0));
}

TEST_CASE("expression unary minus and precedence") {
    CHECK(Expr::parse("-x1^2").eval(3.0) == doctest::Approx(-9.0));
    CHECK(Expr::parse("2^3^2").eval(0.0) == doctest::Approx(512.0));
    CHECK(Expr::parse("1 - 2 - 3").eval(0.0) == doctest::Approx(-4.0));
    CHECK(Expr::parse("6/2/3").eval(0.0) == doctest::Approx(1.0));
}

TEST_CASE("expression derivative matches finite differences") {
    Expr e = Expr::parse("exp(-2*x1)*cos(3*x1) + sinh(x1)*x2");
    Expr d1 = e.derivative(0);
    Expr d2 = e.derivative(1);
    const double h = 1e-6;
    for (double x : {0.2, 0.9, 1.7}) {
        double fd1 = (e.eval(x + h, 0.4) - e.eval(x - h, 0.4)) / (2 * h);
        CHECK(d1.eval(x, 0.4) == doctest::Approx(fd1).epsilon(1e-7));
        double fd2 = (e.eval(x, 0.4 + h) - e.eval(x, 0.4 - h)) / (2 * h);
        CHECK(d2.eval(x, 0.4) == doctest::Approx(fd2).epsilon(1e-7));
    }
}

TEST_CASE("expression round trips through to_string") {
    const char* sources[] = {
        "sin(pi*x1)*cos(pi*x2)",
        "x1^4 - 3*x1^2 + 2",
        "exp(-10*x1) + cosh(x2/3)",
    };
    for (const char* src : sources) {
        Expr e = Expr::parse(src);
        Expr back = Expr::parse(e.to_string());
        for (double x : {0.1, 0.6, 0.95})
            CHECK(back.eval(x, 0.3) == doctest::Approx(e.eval(x, 0.3)).epsilon(1e-14));
    }
}

TEST_CASE("expression parse errors carry offsets") {
    CHECK_THROWS_AS(Expr::parse("sin(x1"), fsm::Error);
    CHECK_THROWS_AS(Expr::parse("1 + * 2"), fsm::Error);
    CHECK_THROWS_AS(Expr::parse("foo(x1)"), fsm::Error);
    try {
        Expr::parse("1 + * 2");
    } catch (const fsm::Error& err) {
        CHECK(err.code() == fsm::ErrorCode::parse);
        CHECK(std::string(err.what()).find("offset") != std::string::npos);
    }
}
