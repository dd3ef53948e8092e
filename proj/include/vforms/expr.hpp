#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vforms {

/// Raised by Expr::eval on division by zero and similar point-wise failures.
/// `subexpr` carries the printed subexpression that failed.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, std::string subexpr_)
        : std::runtime_error(what), subexpr(std::move(subexpr_)) {}
    std::string subexpr;
};

/// Raised by parse_expr; `offset` is the byte position in the input text.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset_, const std::string& message)
        : std::runtime_error("parse error at byte " + std::to_string(offset_) + ": " + message),
          offset(offset_) {}
    std::size_t offset;
};

enum class ExprKind : std::uint8_t {
    constant,
    variable,
    add,
    sub,
    mul,
    div,
    ipow,
    fn_sin,
    fn_cos,
    fn_exp,
    fn_sqrt,
    fn_atan,
    bump,
    cutoff,   // internal: evaluates its body inside an open ball, 0 on and outside it
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind;
    double value = 0.0;            // constant
    int var = 0;                   // variable index, 1-based
    int power = 0;                 // ipow exponent, >= 0
    double radius = 0.0;           // bump / cutoff
    std::vector<double> center;    // bump / cutoff
    // Operands. bump: the ball arguments (one per center entry; empty means the
    // identity point x1..xn). cutoff: ball arguments followed by the body.
    std::vector<ExprPtr> kids;
    int max_var = 0;               // largest variable index reachable below
};

/// Immutable arithmetic expression tree over variables x1..xN.
///
/// The building blocks are the grammar of parse_expr plus an internal cutoff
/// node produced by differentiation of bump: a bump and all its derivatives
/// vanish identically on and outside the open ball, so the derivative is the
/// closed-form rational-times-bump expression guarded by that ball.
class Expr {
public:
    Expr() : Expr(constant(0.0)) {}
    explicit Expr(ExprPtr node) : node_(std::move(node)) {}

    static Expr constant(double v);
    static Expr variable(int index);  // 1-based

    /// Radial bump exp(1 - r^2/(r^2 - |x-c|^2)) inside the open ball |x-c| < r, 0 outside.
    /// With `args` present the ball reads the point (args_1(x), ..., args_n(x)) instead of
    /// the raw variables; this is how compositions with chart maps stay in the algebra.
    static Expr bump(double radius, std::vector<double> center);
    static Expr bump(double radius, std::vector<double> center, std::vector<Expr> args);

    /// Internal guard node: body inside the open ball, 0 on and outside it.
    static Expr cutoff(double radius, std::vector<double> center, std::vector<Expr> args, Expr body);

    const ExprNode& node() const { return *node_; }
    ExprPtr ptr() const { return node_; }
    ExprKind kind() const { return node_->kind; }
    int max_variable() const { return node_->max_var; }
    bool is_constant(double v) const {
        return node_->kind == ExprKind::constant && node_->value == v;
    }

    /// Pointwise evaluation. Requires point.size() >= max_variable().
    /// Multiplication short-circuits on an exact zero left factor, which gives
    /// products with compactly supported factors their continuous extension
    /// through singular points of the other factor.
    double eval(std::span<const double> point) const;

    /// Symbolic partial derivative with respect to x_i (1-based), constant-folded.
    Expr diff(int i) const;

    /// Substitute x_i -> replacements[i-1] everywhere. Every variable index in
    /// this expression must be covered.
    Expr substitute(std::span<const Expr> replacements) const;

    std::string str() const;

private:
    ExprPtr node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
inline Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
inline Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }
inline Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }

Expr powi(const Expr& base, int exponent);  // exponent >= 0
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr sqrt(const Expr& a);
Expr atan(const Expr& a);

/// Parse the scenario expression grammar: infix + - * / ^ with the usual
/// precedence, parentheses, decimal literals, variables x1..xN, calls
/// sin(e), cos(e), exp(e), sqrt(e), atan(e) and bump(r; c1,...,cN) or
/// bump(r; c1,...,ck; a1,...,ak) with literal radius and centers.
Expr parse_expr(std::string_view text, int arity);

/// Central finite differences (e(x+h e_i) - e(x-h e_i)) / 2h, the independent
/// oracle for Expr::diff.
std::vector<double> fd_gradient(const Expr& e, std::span<const double> point, double h);

}  // namespace vforms
