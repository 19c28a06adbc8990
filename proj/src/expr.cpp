#include "tsvar/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

namespace tsvar {

struct Expr::Node {
    enum class Kind { number, variable, negate, add, subtract, multiply, divide, power, call };
    enum class Func { sin, cos, exp, ln, sqrt };

    Kind kind;
    double number = 0.0;
    char var = 0; // 't', 'x' or 'v'
    Func func = Func::sin;
    NodePtr a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = Expr::NodePtr;
using Kind = Node::Kind;
using Func = Node::Func;

NodePtr make_number(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::number;
    n->number = value;
    return n;
}

NodePtr make_variable(char var) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->var = var;
    return n;
}

NodePtr make_unary(Kind kind, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->a = std::move(a);
    return n;
}

NodePtr make_binary(Kind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_call(Func func, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::call;
    n->func = func;
    n->a = std::move(a);
    return n;
}

const char* func_name(Func f) {
    switch (f) {
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::exp: return "exp";
        case Func::ln: return "ln";
        case Func::sqrt: return "sqrt";
    }
    return "?";
}

std::string format_number(double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    return os.str();
}

// Precedence levels for printing: sum 1, product 2, unary minus 3,
// power 4, atom 5. A subtree is parenthesized when its level is below
// what its context requires.
int node_level(const Node& n) {
    switch (n.kind) {
        case Kind::add:
        case Kind::subtract: return 1;
        case Kind::multiply:
        case Kind::divide: return 2;
        case Kind::negate: return 3;
        case Kind::power: return 4;
        default: return 5;
    }
}

void print_node(std::ostream& os, const Node& n, int min_level) {
    const int level = node_level(n);
    const bool parens = level < min_level;
    if (parens) os << '(';
    switch (n.kind) {
        case Kind::number: os << format_number(n.number); break;
        case Kind::variable: os << n.var; break;
        case Kind::negate:
            os << '-';
            print_node(os, *n.a, 3);
            break;
        case Kind::add:
            print_node(os, *n.a, 1);
            os << " + ";
            print_node(os, *n.b, 2);
            break;
        case Kind::subtract:
            print_node(os, *n.a, 1);
            os << " - ";
            print_node(os, *n.b, 2);
            break;
        case Kind::multiply:
            print_node(os, *n.a, 2);
            os << '*';
            print_node(os, *n.b, 3);
            break;
        case Kind::divide:
            print_node(os, *n.a, 2);
            os << '/';
            print_node(os, *n.b, 3);
            break;
        case Kind::power:
            print_node(os, *n.a, 5);
            os << '^';
            print_node(os, *n.b, 4);
            break;
        case Kind::call:
            os << func_name(n.func) << '(';
            print_node(os, *n.a, 0);
            os << ')';
            break;
    }
    if (parens) os << ')';
}

std::string print_subtree(const Node& n) {
    std::ostringstream os;
    print_node(os, n, 0);
    return os.str();
}

class Parser {
  public:
    explicit Parser(std::string_view source) : src_(source) {}

    NodePtr run() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ < src_.size())
            fail(std::string("unexpected character '") + src_[pos_] + "'");
        return e;
    }

  private:
    std::string src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make_binary(Kind::add, std::move(lhs), parse_term());
            else if (accept('-'))
                lhs = make_binary(Kind::subtract, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_binary(Kind::multiply, std::move(lhs), parse_unary());
            else if (accept('/'))
                lhs = make_binary(Kind::divide, std::move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_unary(Kind::negate, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept('^')) return make_binary(Kind::power, std::move(base), parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expected expression");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        std::size_t digits = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
            ++digits;
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++digits;
            }
        }
        if (digits == 0) fail("malformed number");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            std::size_t exp_digits = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++exp_digits;
            }
            if (exp_digits == 0) pos_ = mark; // bare 'e' is not an exponent
        }
        return make_number(std::strtod(src_.c_str() + start, nullptr));
    }

    NodePtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        if (name == "t" || name == "x" || name == "v") {
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '(')
                fail("'" + name + "' is a variable, not a function");
            return make_variable(name[0]);
        }
        Func func;
        if (name == "sin")
            func = Func::sin;
        else if (name == "cos")
            func = Func::cos;
        else if (name == "exp")
            func = Func::exp;
        else if (name == "ln")
            func = Func::ln;
        else if (name == "sqrt")
            func = Func::sqrt;
        else {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        expect('(');
        NodePtr arg = parse_sum();
        expect(')');
        return make_call(func, std::move(arg));
    }
};

bool is_integral(double c) { return std::rint(c) == c && std::abs(c) < 9.0e15; }

HyperDual eval_node(const Node& n, double t, const HyperDual& x, const HyperDual& v) {
    switch (n.kind) {
        case Kind::number: return HyperDual{n.number};
        case Kind::variable:
            if (n.var == 't') return HyperDual{t};
            return n.var == 'x' ? x : v;
        case Kind::negate: return -eval_node(*n.a, t, x, v);
        case Kind::add: return eval_node(*n.a, t, x, v) + eval_node(*n.b, t, x, v);
        case Kind::subtract: return eval_node(*n.a, t, x, v) - eval_node(*n.b, t, x, v);
        case Kind::multiply: return eval_node(*n.a, t, x, v) * eval_node(*n.b, t, x, v);
        case Kind::divide: {
            HyperDual num = eval_node(*n.a, t, x, v);
            HyperDual den = eval_node(*n.b, t, x, v);
            if (den.val == 0.0)
                throw eval_error("division by zero in '" + print_subtree(n) + "'");
            return num / den;
        }
        case Kind::power: {
            HyperDual base = eval_node(*n.a, t, x, v);
            HyperDual expo = eval_node(*n.b, t, x, v);
            if (expo.is_constant()) {
                if (is_integral(expo.val)) {
                    const auto k = static_cast<long long>(expo.val);
                    if (k < 0 && base.val == 0.0)
                        throw eval_error("zero raised to a negative power in '" +
                                         print_subtree(n) + "'");
                    return pow_int(base, k);
                }
                if (base.val <= 0.0)
                    throw eval_error("non-integer power of a non-positive base in '" +
                                     print_subtree(n) + "'");
                return pow_real(base, expo.val);
            }
            if (base.val <= 0.0)
                throw eval_error("variable exponent needs a positive base in '" +
                                 print_subtree(n) + "'");
            return exp(expo * log(base));
        }
        case Kind::call: {
            HyperDual u = eval_node(*n.a, t, x, v);
            switch (n.func) {
                case Func::sin: return sin(u);
                case Func::cos: return cos(u);
                case Func::exp: return exp(u);
                case Func::ln:
                    if (u.val <= 0.0)
                        throw eval_error("ln of a non-positive value in '" + print_subtree(n) +
                                         "'");
                    return log(u);
                case Func::sqrt:
                    if (u.val < 0.0)
                        throw eval_error("sqrt of a negative value in '" + print_subtree(n) +
                                         "'");
                    if (u.val == 0.0 && !u.is_constant())
                        throw eval_error("sqrt has an unbounded derivative at zero in '" +
                                         print_subtree(n) + "'");
                    return sqrt(u);
            }
            break;
        }
    }
    throw eval_error("malformed expression node");
}

VarMask node_variables(const Node& n) {
    switch (n.kind) {
        case Kind::number: return 0;
        case Kind::variable:
            return n.var == 't' ? var_t : (n.var == 'x' ? var_x : var_v);
        case Kind::negate:
        case Kind::call: return node_variables(*n.a);
        default: return node_variables(*n.a) | node_variables(*n.b);
    }
}

bool nodes_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Kind::number: return a.number == b.number;
        case Kind::variable: return a.var == b.var;
        case Kind::negate: return nodes_equal(*a.a, *b.a);
        case Kind::call: return a.func == b.func && nodes_equal(*a.a, *b.a);
        default: return nodes_equal(*a.a, *b.a) && nodes_equal(*a.b, *b.b);
    }
}

} // namespace

Expr::Expr() : root_(make_number(0.0)) {}

Expr::Expr(NodePtr root) : root_(std::move(root)) {}

Expr Expr::parse(std::string_view source) { return Expr(Parser(source).run()); }

HyperDual Expr::eval(double t, const HyperDual& x, const HyperDual& v) const {
    return eval_node(*root_, t, x, v);
}

std::string Expr::to_string() const { return print_subtree(*root_); }

VarMask Expr::variables() const { return node_variables(*root_); }

bool Expr::same_structure(const Expr& other) const { return nodes_equal(*root_, *other.root_); }

std::string describe_variables(VarMask mask) {
    std::string out;
    for (auto [bit, name] : {std::pair{var_t, 't'}, {var_x, 'x'}, {var_v, 'v'}}) {
        if (mask & bit) {
            if (!out.empty()) out += ", ";
            out += name;
        }
    }
    return out;
}

void require_variables(const Expr& e, VarMask allowed, const std::string& role) {
    const VarMask extra = e.variables() & ~allowed;
    if (extra)
        throw validation_error(role + " may only depend on {" + describe_variables(allowed) +
                               "} but references {" + describe_variables(extra) + "}");
}

} // namespace tsvar
