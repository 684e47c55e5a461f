#pragma once
//============================================================================
// expression.hpp
//
// Closed-form scalar expressions in the variables x1, x2.  Grammar:
//
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := '-' factor | power             unary minus below '^': -x^2 = -(x^2)
//   power   := primary ('^' factor)?          right-associative
//   primary := number | 'pi' | 'x1' | 'x2' | name '(' expr ')' | '(' expr ')'
//   name    := sin | cos | sinh | cosh | exp
//
// Expressions evaluate to double and differentiate symbolically, which is
// how forcing terms and boundary data supply the derivative orders the
// solver needs.  Parse errors carry the character offset of the failure.
//============================================================================

#include <memory>
#include <string>
#include <string_view>

namespace fsm::expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

class Expr {
public:
    Expr() = default;

    // Throws fsm::Error(parse) with the character offset on failure.
    static Expr parse(std::string_view src);
    static Expr constant(double v);

    bool valid() const { return root_ != nullptr; }
    double eval(double x1, double x2 = 0.0) const;

    // Symbolic partial derivative; var is 0 for x1, 1 for x2.
    Expr derivative(int var) const;

    // True (and the value) when the expression folds to a constant.
    bool is_constant(double* value = nullptr) const;

    std::string to_string() const;

private:
    explicit Expr(NodePtr root) : root_(std::move(root)) {}
    NodePtr root_;
};

} // namespace fsm::expr
