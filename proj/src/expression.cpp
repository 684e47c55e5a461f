//============================================================================
// expression.cpp
//
// Recursive-descent parser, evaluator and symbolic differentiation for the
// small closed-form expression grammar.  Differentiation applies light
// algebraic simplification (constant folding, identity/annihilator removal)
// so that repeated derivatives stay compact.
//============================================================================

#include "fsm/expression.hpp"
#include "fsm/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fsm::expr {

enum class Kind { constant, var, add, sub, mul, div, pow, neg, call };
// 'log' is not part of the public grammar; it only appears in derivatives
// of general powers u^v.
enum class Fn { sin, cos, sinh, cosh, exp, log };

struct Node {
    Kind kind;
    double value = 0.0;   // constant
    int var = 0;          // var: 0 = x1, 1 = x2
    Fn fn = Fn::sin;      // call
    NodePtr a, b;
};

namespace {

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = v;
    return n;
}

NodePtr make_var(int var) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::var;
    n->var = var;
    return n;
}

NodePtr make_call(Fn fn, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::call;
    n->fn = fn;
    n->a = std::move(a);
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n->kind == Kind::constant && n->value == v;
}

NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
    // Constant folding and trivial identities keep derivative trees small.
    if (a->kind == Kind::constant && b->kind == Kind::constant) {
        switch (k) {
            case Kind::add: return make_const(a->value + b->value);
            case Kind::sub: return make_const(a->value - b->value);
            case Kind::mul: return make_const(a->value * b->value);
            case Kind::div:
                if (b->value != 0.0) return make_const(a->value / b->value);
                break;
            case Kind::pow: return make_const(std::pow(a->value, b->value));
            default: break;
        }
    }
    switch (k) {
        case Kind::add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case Kind::sub:
            if (is_const(b, 0.0)) return a;
            break;
        case Kind::mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            break;
        case Kind::div:
            if (is_const(a, 0.0)) return make_const(0.0);
            if (is_const(b, 1.0)) return a;
            break;
        case Kind::pow:
            if (is_const(b, 1.0)) return a;
            if (is_const(b, 0.0)) return make_const(1.0);
            break;
        default: break;
    }
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    if (a->kind == Kind::constant) return make_const(-a->value);
    if (a->kind == Kind::neg) return a->a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::neg;
    n->a = std::move(a);
    return n;
}

//----------------------------------------------------------------------------
// Parser
//----------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size())
            fail(pos_, "unexpected trailing input");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(std::size_t at, const std::string& what) {
        std::ostringstream os;
        os << "expression error at offset " << at << ": " << what;
        fsm::fail_parse(os.str());
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        for (;;) {
            if (accept('+')) e = make_binary(Kind::add, e, parse_term());
            else if (accept('-')) e = make_binary(Kind::sub, e, parse_term());
            else return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_factor();
        for (;;) {
            if (accept('*')) e = make_binary(Kind::mul, e, parse_factor());
            else if (accept('/')) e = make_binary(Kind::div, e, parse_factor());
            else return e;
        }
    }

    // Unary minus binds looser than '^' so -x^2 means -(x^2).
    NodePtr parse_factor() {
        if (accept('-')) return make_neg(parse_factor());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^'))
            return make_binary(Kind::pow, base, parse_factor());
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail(pos_, "unexpected end of input");
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return parse_name();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) fail(pos_, "expected ')'");
            return e;
        }
        fail(pos_, std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail(start, "malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_const(v);
    }

    NodePtr parse_name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        if (name == "pi") return make_const(std::numbers::pi);
        if (name == "x1") return make_var(0);
        if (name == "x2") return make_var(1);

        Fn fn;
        if (name == "sin") fn = Fn::sin;
        else if (name == "cos") fn = Fn::cos;
        else if (name == "sinh") fn = Fn::sinh;
        else if (name == "cosh") fn = Fn::cosh;
        else if (name == "exp") fn = Fn::exp;
        else fail(start, "unknown name '" + name + "'");

        if (!accept('(')) fail(pos_, "expected '(' after function name");
        NodePtr arg = parse_expr();
        if (!accept(')')) fail(pos_, "expected ')'");
        return make_call(fn, arg);
    }
};

//----------------------------------------------------------------------------
// Evaluation / differentiation / printing
//----------------------------------------------------------------------------

double eval_node(const Node& n, double x1, double x2) {
    switch (n.kind) {
        case Kind::constant: return n.value;
        case Kind::var: return n.var == 0 ? x1 : x2;
        case Kind::add: return eval_node(*n.a, x1, x2) + eval_node(*n.b, x1, x2);
        case Kind::sub: return eval_node(*n.a, x1, x2) - eval_node(*n.b, x1, x2);
        case Kind::mul: return eval_node(*n.a, x1, x2) * eval_node(*n.b, x1, x2);
        case Kind::div: return eval_node(*n.a, x1, x2) / eval_node(*n.b, x1, x2);
        case Kind::pow: return std::pow(eval_node(*n.a, x1, x2), eval_node(*n.b, x1, x2));
        case Kind::neg: return -eval_node(*n.a, x1, x2);
        case Kind::call: {
            double v = eval_node(*n.a, x1, x2);
            switch (n.fn) {
                case Fn::sin: return std::sin(v);
                case Fn::cos: return std::cos(v);
                case Fn::sinh: return std::sinh(v);
                case Fn::cosh: return std::cosh(v);
                case Fn::exp: return std::exp(v);
                case Fn::log: return std::log(v);
            }
        }
    }
    return 0.0;
}

NodePtr diff_node(const NodePtr& n, int var);

NodePtr diff_call(const NodePtr& n, int var) {
    const NodePtr& u = n->a;
    NodePtr du = diff_node(u, var);
    NodePtr outer;
    switch (n->fn) {
        case Fn::sin:  outer = make_call(Fn::cos, u); break;
        case Fn::cos:  outer = make_neg(make_call(Fn::sin, u)); break;
        case Fn::sinh: outer = make_call(Fn::cosh, u); break;
        case Fn::cosh: outer = make_call(Fn::sinh, u); break;
        case Fn::exp:  outer = make_call(Fn::exp, u); break;
        case Fn::log:  outer = make_binary(Kind::div, make_const(1.0), u); break;
    }
    return make_binary(Kind::mul, outer, du);
}

NodePtr diff_node(const NodePtr& n, int var) {
    switch (n->kind) {
        case Kind::constant: return make_const(0.0);
        case Kind::var: return make_const(n->var == var ? 1.0 : 0.0);
        case Kind::add: return make_binary(Kind::add, diff_node(n->a, var), diff_node(n->b, var));
        case Kind::sub: return make_binary(Kind::sub, diff_node(n->a, var), diff_node(n->b, var));
        case Kind::mul:
            return make_binary(Kind::add,
                               make_binary(Kind::mul, diff_node(n->a, var), n->b),
                               make_binary(Kind::mul, n->a, diff_node(n->b, var)));
        case Kind::div:
            // (u/v)' = u'/v - u v'/v^2
            return make_binary(Kind::sub,
                               make_binary(Kind::div, diff_node(n->a, var), n->b),
                               make_binary(Kind::div,
                                           make_binary(Kind::mul, n->a, diff_node(n->b, var)),
                                           make_binary(Kind::mul, n->b, n->b)));
        case Kind::pow: {
            const NodePtr& u = n->a;
            const NodePtr& v = n->b;
            if (v->kind == Kind::constant) {
                // d(u^c) = c u^(c-1) u'
                NodePtr p = make_binary(Kind::pow, u, make_const(v->value - 1.0));
                return make_binary(Kind::mul, make_const(v->value),
                                   make_binary(Kind::mul, p, diff_node(u, var)));
            }
            // d(u^v) = u^v (v' log u + v u'/u)
            NodePtr term1 = make_binary(Kind::mul, diff_node(v, var), make_call(Fn::log, u));
            NodePtr term2 = make_binary(Kind::div,
                                        make_binary(Kind::mul, v, diff_node(u, var)), u);
            return make_binary(Kind::mul, n, make_binary(Kind::add, term1, term2));
        }
        case Kind::neg: return make_neg(diff_node(n->a, var));
        case Kind::call: return diff_call(n, var);
    }
    return make_const(0.0);
}

void print_node(const Node& n, std::ostream& os) {
    switch (n.kind) {
        case Kind::constant: os << n.value; return;
        case Kind::var: os << (n.var == 0 ? "x1" : "x2"); return;
        case Kind::add: os << '('; print_node(*n.a, os); os << " + "; print_node(*n.b, os); os << ')'; return;
        case Kind::sub: os << '('; print_node(*n.a, os); os << " - "; print_node(*n.b, os); os << ')'; return;
        case Kind::mul: os << '('; print_node(*n.a, os); os << " * "; print_node(*n.b, os); os << ')'; return;
        case Kind::div: os << '('; print_node(*n.a, os); os << " / "; print_node(*n.b, os); os << ')'; return;
        case Kind::pow: os << '('; print_node(*n.a, os); os << " ^ "; print_node(*n.b, os); os << ')'; return;
        case Kind::neg: os << "(-"; print_node(*n.a, os); os << ')'; return;
        case Kind::call: {
            const char* name = "";
            switch (n.fn) {
                case Fn::sin: name = "sin"; break;
                case Fn::cos: name = "cos"; break;
                case Fn::sinh: name = "sinh"; break;
                case Fn::cosh: name = "cosh"; break;
                case Fn::exp: name = "exp"; break;
                case Fn::log: name = "log"; break;
            }
            os << name << '(';
            print_node(*n.a, os);
            os << ')';
            return;
        }
    }
}

} // namespace

Expr Expr::parse(std::string_view src) {
    Parser p(src);
    return Expr(p.run());
}

Expr Expr::constant(double v) { return Expr(make_const(v)); }

double Expr::eval(double x1, double x2) const {
    if (!root_) fail_internal("eval on empty expression");
    return eval_node(*root_, x1, x2);
}

Expr Expr::derivative(int var) const {
    if (!root_) fail_internal("derivative on empty expression");
    return Expr(diff_node(root_, var));
}

bool Expr::is_constant(double* value) const {
    if (root_ && root_->kind == Kind::constant) {
        if (value) *value = root_->value;
        return true;
    }
    return false;
}

std::string Expr::to_string() const {
    if (!root_) return "<empty>";
    std::ostringstream os;
    os.precision(17);
    print_node(*root_, os);
    return os.str();
}

} // namespace fsm::expr
