#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "tsvar/errors.hpp"
#include "tsvar/hyperdual.hpp"

namespace tsvar {

/// Bitmask of the variables an expression may reference.
using VarMask = unsigned;
inline constexpr VarMask var_t = 1u;
inline constexpr VarMask var_x = 2u;
inline constexpr VarMask var_v = 4u;

/// Parsed scalar expression in the variables (t, x, v).
///
/// Grammar (standard precedence, ^ right-associative and binding
/// tighter than unary minus):
///   sum    := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?
///   atom   := number | ident | ident '(' sum ')' | '(' sum ')'
/// Identifiers: t, x, v, sin, cos, exp, ln, sqrt. Numbers are decimal
/// with optional exponent. '^' accepts real exponents for positive
/// bases and integer exponents for any base.
///
/// Immutable after parse; evaluation is pure and thread-safe.
class Expr {
  public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    /// The literal 0.
    Expr();

    /// Throws parse_error (with byte offset) on malformed input.
    static Expr parse(std::string_view source);

    /// Evaluate with caller-supplied differentiation seeds for x and v.
    HyperDual eval(double t, const HyperDual& x, const HyperDual& v) const;

    /// Evaluate at a plain point, producing the value and all partials
    /// in (x, v) through second order.
    HyperDual eval2(double t, double x, double v) const {
        return eval(t, HyperDual::var_x(x), HyperDual::var_v(v));
    }

    /// Convenience for t-only expressions.
    double eval_t(double t) const { return eval(t, HyperDual{0.0}, HyperDual{0.0}).val; }

    std::string to_string() const;
    VarMask variables() const;
    bool same_structure(const Expr& other) const;

    const NodePtr& root() const { return root_; }

  private:
    explicit Expr(NodePtr root);
    NodePtr root_;
};

std::string describe_variables(VarMask mask);

/// Throws validation_error naming `role` and the offending variables if
/// `e` references anything outside `allowed`.
void require_variables(const Expr& e, VarMask allowed, const std::string& role);

} // namespace tsvar
