#include "vforms/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace vforms {

namespace {

int kids_max_var(const std::vector<ExprPtr>& kids) {
    int m = 0;
    for (const auto& k : kids) m = std::max(m, k->max_var);
    return m;
}

ExprPtr make_node(ExprNode n) {
    return std::make_shared<const ExprNode>(std::move(n));
}

ExprPtr make_op(ExprKind kind, ExprPtr a, ExprPtr b) {
    ExprNode n;
    n.kind = kind;
    n.kids = {std::move(a), std::move(b)};
    n.max_var = kids_max_var(n.kids);
    return make_node(std::move(n));
}

ExprPtr make_fn(ExprKind kind, ExprPtr a) {
    ExprNode n;
    n.kind = kind;
    n.kids = {std::move(a)};
    n.max_var = n.kids[0]->max_var;
    return make_node(std::move(n));
}

bool is_const(const ExprPtr& p) { return p->kind == ExprKind::constant; }

double pow_int(double base, int k) {
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc *= base;
    return acc;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

Expr Expr::constant(double v) {
    ExprNode n;
    n.kind = ExprKind::constant;
    n.value = v;
    return Expr(make_node(std::move(n)));
}

Expr Expr::variable(int index) {
    if (index < 1) throw std::invalid_argument("variable index must be >= 1");
    ExprNode n;
    n.kind = ExprKind::variable;
    n.var = index;
    n.max_var = index;
    return Expr(make_node(std::move(n)));
}

Expr Expr::bump(double radius, std::vector<double> center) {
    return bump(radius, std::move(center), {});
}

Expr Expr::bump(double radius, std::vector<double> center, std::vector<Expr> args) {
    if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be > 0");
    if (center.empty()) throw std::invalid_argument("bump center must be nonempty");
    if (!args.empty() && args.size() != center.size())
        throw std::invalid_argument("bump argument count must match center arity");
    ExprNode n;
    n.kind = ExprKind::bump;
    n.radius = radius;
    n.center = std::move(center);
    for (auto& a : args) n.kids.push_back(a.ptr());
    n.max_var = n.kids.empty() ? static_cast<int>(n.center.size()) : kids_max_var(n.kids);
    return Expr(make_node(std::move(n)));
}

Expr Expr::cutoff(double radius, std::vector<double> center, std::vector<Expr> args, Expr body) {
    if (!(radius > 0.0)) throw std::invalid_argument("cutoff radius must be > 0");
    if (!args.empty() && args.size() != center.size())
        throw std::invalid_argument("cutoff argument count must match center arity");
    if (body.is_constant(0.0)) return body;
    ExprNode n;
    n.kind = ExprKind::cutoff;
    n.radius = radius;
    n.center = std::move(center);
    for (auto& a : args) n.kids.push_back(a.ptr());
    n.kids.push_back(body.ptr());
    int ident = n.kids.size() == 1 ? static_cast<int>(n.center.size()) : 0;
    n.max_var = std::max(ident, kids_max_var(n.kids));
    return Expr(make_node(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) {
    if (is_const(a.ptr()) && is_const(b.ptr())) return Expr::constant(a.node().value + b.node().value);
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return Expr(make_op(ExprKind::add, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a, const Expr& b) {
    if (is_const(a.ptr()) && is_const(b.ptr())) return Expr::constant(a.node().value - b.node().value);
    if (b.is_constant(0.0)) return a;
    return Expr(make_op(ExprKind::sub, a.ptr(), b.ptr()));
}

Expr operator*(const Expr& a, const Expr& b) {
    if (is_const(a.ptr()) && is_const(b.ptr())) return Expr::constant(a.node().value * b.node().value);
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    return Expr(make_op(ExprKind::mul, a.ptr(), b.ptr()));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (is_const(b.ptr()) && b.node().value != 0.0) {
        if (is_const(a.ptr())) return Expr::constant(a.node().value / b.node().value);
        if (b.is_constant(1.0)) return a;
    }
    return Expr(make_op(ExprKind::div, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a) { return Expr::constant(-1.0) * a; }

Expr powi(const Expr& base, int exponent) {
    if (exponent < 0) throw std::invalid_argument("integer power exponent must be >= 0");
    if (exponent == 0) return Expr::constant(1.0);
    if (exponent == 1) return base;
    if (is_const(base.ptr())) return Expr::constant(pow_int(base.node().value, exponent));
    ExprNode n;
    n.kind = ExprKind::ipow;
    n.power = exponent;
    n.kids = {base.ptr()};
    n.max_var = base.max_variable();
    return Expr(make_node(std::move(n)));
}

Expr sin(const Expr& a) {
    if (is_const(a.ptr())) return Expr::constant(std::sin(a.node().value));
    return Expr(make_fn(ExprKind::fn_sin, a.ptr()));
}
Expr cos(const Expr& a) {
    if (is_const(a.ptr())) return Expr::constant(std::cos(a.node().value));
    return Expr(make_fn(ExprKind::fn_cos, a.ptr()));
}
Expr exp(const Expr& a) {
    if (is_const(a.ptr())) return Expr::constant(std::exp(a.node().value));
    return Expr(make_fn(ExprKind::fn_exp, a.ptr()));
}
Expr sqrt(const Expr& a) {
    if (is_const(a.ptr()) && a.node().value >= 0.0) return Expr::constant(std::sqrt(a.node().value));
    return Expr(make_fn(ExprKind::fn_sqrt, a.ptr()));
}
Expr atan(const Expr& a) {
    if (is_const(a.ptr())) return Expr::constant(std::atan(a.node().value));
    return Expr(make_fn(ExprKind::fn_atan, a.ptr()));
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

double eval_node(const ExprNode& n, std::span<const double> p);

// Squared distance of the ball arguments from the center; empty kids slice
// means the identity point. Returns false when the arguments fail to evaluate
// or are not finite, which counts as "outside every ball".
bool ball_distance2(const ExprNode& n, std::size_t nargs, std::span<const double> p, double& rho) {
    rho = 0.0;
    for (std::size_t i = 0; i < n.center.size(); ++i) {
        double y;
        if (nargs == 0) {
            y = p[i];
        } else {
            try {
                y = eval_node(*n.kids[i], p);
            } catch (const EvalError&) {
                return false;
            }
            if (!std::isfinite(y)) return false;
        }
        const double d = y - n.center[i];
        rho += d * d;
    }
    return true;
}

double eval_node(const ExprNode& n, std::span<const double> p) {
    switch (n.kind) {
        case ExprKind::constant: return n.value;
        case ExprKind::variable: return p[n.var - 1];
        case ExprKind::add: return eval_node(*n.kids[0], p) + eval_node(*n.kids[1], p);
        case ExprKind::sub: return eval_node(*n.kids[0], p) - eval_node(*n.kids[1], p);
        case ExprKind::mul: {
            const double a = eval_node(*n.kids[0], p);
            if (a == 0.0) return 0.0;
            return a * eval_node(*n.kids[1], p);
        }
        case ExprKind::div: {
            const double num = eval_node(*n.kids[0], p);
            const double den = eval_node(*n.kids[1], p);
            if (den == 0.0) throw EvalError("division by zero", Expr(n.kids[1]).str());
            return num / den;
        }
        case ExprKind::ipow: return pow_int(eval_node(*n.kids[0], p), n.power);
        case ExprKind::fn_sin: return std::sin(eval_node(*n.kids[0], p));
        case ExprKind::fn_cos: return std::cos(eval_node(*n.kids[0], p));
        case ExprKind::fn_exp: return std::exp(eval_node(*n.kids[0], p));
        case ExprKind::fn_sqrt: {
            const double a = eval_node(*n.kids[0], p);
            if (a < 0.0) throw EvalError("sqrt of negative value", Expr(n.kids[0]).str());
            return std::sqrt(a);
        }
        case ExprKind::fn_atan: return std::atan(eval_node(*n.kids[0], p));
        case ExprKind::bump: {
            double rho;
            if (!ball_distance2(n, n.kids.size(), p, rho)) return 0.0;
            const double r2 = n.radius * n.radius;
            if (rho >= r2) return 0.0;
            return std::exp(1.0 - r2 / (r2 - rho));
        }
        case ExprKind::cutoff: {
            double rho;
            if (!ball_distance2(n, n.kids.size() - 1, p, rho)) return 0.0;
            if (rho >= n.radius * n.radius) return 0.0;
            return eval_node(*n.kids.back(), p);
        }
    }
    throw std::logic_error("unreachable expression kind");
}

}  // namespace

double Expr::eval(std::span<const double> point) const {
    if (static_cast<int>(point.size()) < node_->max_var)
        throw std::invalid_argument("point arity " + std::to_string(point.size()) +
                                    " below expression arity " + std::to_string(node_->max_var));
    return eval_node(*node_, point);
}

// ---------------------------------------------------------------------------
// differentiation
// ---------------------------------------------------------------------------

Expr Expr::diff(int i) const {
    const ExprNode& n = *node_;
    switch (n.kind) {
        case ExprKind::constant: return constant(0.0);
        case ExprKind::variable: return constant(n.var == i ? 1.0 : 0.0);
        case ExprKind::add: return Expr(n.kids[0]).diff(i) + Expr(n.kids[1]).diff(i);
        case ExprKind::sub: return Expr(n.kids[0]).diff(i) - Expr(n.kids[1]).diff(i);
        case ExprKind::mul: {
            Expr a(n.kids[0]), b(n.kids[1]);
            return a.diff(i) * b + a * b.diff(i);
        }
        case ExprKind::div: {
            Expr a(n.kids[0]), b(n.kids[1]);
            return (a.diff(i) * b - a * b.diff(i)) / powi(b, 2);
        }
        case ExprKind::ipow: {
            Expr b(n.kids[0]);
            return constant(n.power) * powi(b, n.power - 1) * b.diff(i);
        }
        case ExprKind::fn_sin: return cos(Expr(n.kids[0])) * Expr(n.kids[0]).diff(i);
        case ExprKind::fn_cos: return constant(-1.0) * sin(Expr(n.kids[0])) * Expr(n.kids[0]).diff(i);
        case ExprKind::fn_exp: return exp(Expr(n.kids[0])) * Expr(n.kids[0]).diff(i);
        case ExprKind::fn_sqrt: return Expr(n.kids[0]).diff(i) / (constant(2.0) * sqrt(Expr(n.kids[0])));
        case ExprKind::fn_atan:
            return Expr(n.kids[0]).diff(i) / (constant(1.0) + powi(Expr(n.kids[0]), 2));
        case ExprKind::bump: {
            // d/dx_i exp(1 - r^2/(r^2 - rho)) = -2 r^2 (sum_k (a_k - c_k) a_k')
            //                                   / (r^2 - rho)^2 * bump, rho = |a - c|^2.
            std::vector<Expr> args;
            args.reserve(n.center.size());
            for (std::size_t k = 0; k < n.center.size(); ++k)
                args.push_back(n.kids.empty() ? variable(static_cast<int>(k) + 1) : Expr(n.kids[k]));
            Expr dot = constant(0.0);
            Expr rho = constant(0.0);
            for (std::size_t k = 0; k < args.size(); ++k) {
                Expr shifted = args[k] - constant(n.center[k]);
                dot = dot + shifted * args[k].diff(i);
                rho = rho + powi(shifted, 2);
            }
            if (dot.is_constant(0.0)) return constant(0.0);
            const double r2 = n.radius * n.radius;
            Expr self(node_);
            Expr body = constant(-2.0 * r2) * dot / powi(constant(r2) - rho, 2) * self;
            std::vector<Expr> guard_args = n.kids.empty() ? std::vector<Expr>{} : args;
            return cutoff(n.radius, n.center, std::move(guard_args), body);
        }
        case ExprKind::cutoff: {
            // Valid because every cutoff body produced here extends by zero
            // through the ball boundary together with all derivatives.
            std::vector<Expr> args;
            for (std::size_t k = 0; k + 1 < n.kids.size(); ++k) args.push_back(Expr(n.kids[k]));
            return cutoff(n.radius, n.center, std::move(args), Expr(n.kids.back()).diff(i));
        }
    }
    throw std::logic_error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// substitution
// ---------------------------------------------------------------------------

Expr Expr::substitute(std::span<const Expr> replacements) const {
    const ExprNode& n = *node_;
    switch (n.kind) {
        case ExprKind::constant: return *this;
        case ExprKind::variable:
            if (n.var > static_cast<int>(replacements.size()))
                throw std::invalid_argument("substitution does not cover x" + std::to_string(n.var));
            return replacements[n.var - 1];
        case ExprKind::add: return Expr(n.kids[0]).substitute(replacements) + Expr(n.kids[1]).substitute(replacements);
        case ExprKind::sub: return Expr(n.kids[0]).substitute(replacements) - Expr(n.kids[1]).substitute(replacements);
        case ExprKind::mul: return Expr(n.kids[0]).substitute(replacements) * Expr(n.kids[1]).substitute(replacements);
        case ExprKind::div: return Expr(n.kids[0]).substitute(replacements) / Expr(n.kids[1]).substitute(replacements);
        case ExprKind::ipow: return powi(Expr(n.kids[0]).substitute(replacements), n.power);
        case ExprKind::fn_sin: return sin(Expr(n.kids[0]).substitute(replacements));
        case ExprKind::fn_cos: return cos(Expr(n.kids[0]).substitute(replacements));
        case ExprKind::fn_exp: return exp(Expr(n.kids[0]).substitute(replacements));
        case ExprKind::fn_sqrt: return sqrt(Expr(n.kids[0]).substitute(replacements));
        case ExprKind::fn_atan: return atan(Expr(n.kids[0]).substitute(replacements));
        case ExprKind::bump: {
            std::vector<Expr> args;
            if (n.kids.empty()) {
                if (replacements.size() != n.center.size())
                    throw std::invalid_argument("substitution arity does not match bump arity");
                args.assign(replacements.begin(), replacements.end());
            } else {
                for (const auto& k : n.kids) args.push_back(Expr(k).substitute(replacements));
            }
            return bump(n.radius, n.center, std::move(args));
        }
        case ExprKind::cutoff: {
            std::vector<Expr> args;
            if (n.kids.size() == 1) {
                if (replacements.size() != n.center.size())
                    throw std::invalid_argument("substitution arity does not match cutoff arity");
                args.assign(replacements.begin(), replacements.end());
            } else {
                for (std::size_t k = 0; k + 1 < n.kids.size(); ++k)
                    args.push_back(Expr(n.kids[k]).substitute(replacements));
            }
            return cutoff(n.radius, n.center, std::move(args), Expr(n.kids.back()).substitute(replacements));
        }
    }
    throw std::logic_error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::add:
        case ExprKind::sub: return 1;
        case ExprKind::mul:
        case ExprKind::div: return 2;
        case ExprKind::ipow: return 3;
        default: return 4;
    }
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& parent, const ExprNode& child, bool right, std::string& out) {
    const int pp = precedence(parent.kind), cp = precedence(child.kind);
    const bool parens = cp < pp || (cp == pp && right);
    if (parens) out += '(';
    print_node(child, out);
    if (parens) out += ')';
}

void print_ball(const ExprNode& n, std::size_t nargs, std::string& out) {
    out += format_double(n.radius);
    out += "; ";
    for (std::size_t i = 0; i < n.center.size(); ++i) {
        if (i) out += ',';
        out += format_double(n.center[i]);
    }
    if (nargs > 0) {
        out += "; ";
        for (std::size_t i = 0; i < nargs; ++i) {
            if (i) out += ',';
            print_node(*n.kids[i], out);
        }
    }
}

void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case ExprKind::constant:
            if (n.value < 0.0) {
                out += '(';
                out += format_double(n.value);
                out += ')';
            } else {
                out += format_double(n.value);
            }
            return;
        case ExprKind::variable: out += 'x' + std::to_string(n.var); return;
        case ExprKind::add:
            print_child(n, *n.kids[0], false, out); out += '+'; print_child(n, *n.kids[1], true, out); return;
        case ExprKind::sub:
            print_child(n, *n.kids[0], false, out); out += '-'; print_child(n, *n.kids[1], true, out); return;
        case ExprKind::mul:
            print_child(n, *n.kids[0], false, out); out += '*'; print_child(n, *n.kids[1], true, out); return;
        case ExprKind::div:
            print_child(n, *n.kids[0], false, out); out += '/'; print_child(n, *n.kids[1], true, out); return;
        case ExprKind::ipow:
            print_child(n, *n.kids[0], true, out); out += '^'; out += std::to_string(n.power); return;
        case ExprKind::fn_sin: out += "sin("; print_node(*n.kids[0], out); out += ')'; return;
        case ExprKind::fn_cos: out += "cos("; print_node(*n.kids[0], out); out += ')'; return;
        case ExprKind::fn_exp: out += "exp("; print_node(*n.kids[0], out); out += ')'; return;
        case ExprKind::fn_sqrt: out += "sqrt("; print_node(*n.kids[0], out); out += ')'; return;
        case ExprKind::fn_atan: out += "atan("; print_node(*n.kids[0], out); out += ')'; return;
        case ExprKind::bump:
            out += "bump(";
            print_ball(n, n.kids.size(), out);
            out += ')';
            return;
        case ExprKind::cutoff:
            out += "cut(";
            print_ball(n, n.kids.size() - 1, out);
            out += "; ";
            print_node(*n.kids.back(), out);
            out += ')';
            return;
    }
}

}  // namespace

std::string Expr::str() const {
    std::string out;
    print_node(*node_, out);
    return out;
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum Kind { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, semi, end };
    Kind kind;
    std::string text;
    std::size_t offset;
    double num = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) { advance(); }
    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        tok_.offset = pos_;
        tok_.text.clear();
        if (pos_ >= s_.size()) {
            tok_.kind = Token::end;
            return;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
                ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                std::size_t mark = pos_;
                ++pos_;
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
                if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                } else {
                    pos_ = mark;  // "e" belongs to a following identifier, not this literal
                }
            }
            tok_.kind = Token::number;
            tok_.text = std::string(s_.substr(start, pos_ - start));
            try {
                std::size_t used = 0;
                tok_.num = std::stod(tok_.text, &used);
                if (used != tok_.text.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError(start, "malformed number '" + tok_.text + "'");
            }
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            tok_.kind = Token::ident;
            tok_.text = std::string(s_.substr(start, pos_ - start));
            return;
        }
        ++pos_;
        switch (c) {
            case '+': tok_.kind = Token::plus; return;
            case '-': tok_.kind = Token::minus; return;
            case '*': tok_.kind = Token::star; return;
            case '/': tok_.kind = Token::slash; return;
            case '^': tok_.kind = Token::caret; return;
            case '(': tok_.kind = Token::lparen; return;
            case ')': tok_.kind = Token::rparen; return;
            case ',': tok_.kind = Token::comma; return;
            case ';': tok_.kind = Token::semi; return;
            default: throw ParseError(tok_.offset, std::string("unexpected character '") + c + "'");
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    Token tok_;
};

class Parser {
public:
    Parser(std::string_view s, int arity) : lex_(s), arity_(arity) {}

    Expr parse() {
        Expr e = expression();
        const Token& t = lex_.peek();
        if (t.kind != Token::end) throw ParseError(t.offset, "unexpected trailing input");
        return e;
    }

private:
    Expr expression() {
        Expr e = term();
        while (true) {
            const Token& t = lex_.peek();
            if (t.kind == Token::plus) {
                lex_.take();
                e = e + term();
            } else if (t.kind == Token::minus) {
                lex_.take();
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = factor();
        while (true) {
            const Token& t = lex_.peek();
            if (t.kind == Token::star) {
                lex_.take();
                e = e * factor();
            } else if (t.kind == Token::slash) {
                lex_.take();
                e = e / factor();
            } else {
                return e;
            }
        }
    }

    Expr factor() {
        if (lex_.peek().kind == Token::minus) {
            Token t = lex_.take();
            (void)t;
            return Expr::constant(-1.0) * factor();
        }
        if (lex_.peek().kind == Token::plus) {
            lex_.take();
            return factor();
        }
        Expr base = primary();
        if (lex_.peek().kind == Token::caret) {
            lex_.take();
            Token e = expect(Token::number, "integer exponent");
            double iv = 0.0;
            if (std::modf(e.num, &iv) != 0.0 || e.num < 0.0 ||
                e.text.find_first_of(".eE") != std::string::npos)
                throw ParseError(e.offset, "exponent must be a nonnegative integer literal");
            return powi(base, static_cast<int>(e.num));
        }
        return base;
    }

    Expr primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case Token::number: return Expr::constant(t.num);
            case Token::lparen: {
                Expr e = expression();
                expect(Token::rparen, "')'");
                return e;
            }
            case Token::ident: {
                if (t.text == "sin" || t.text == "cos" || t.text == "exp" || t.text == "sqrt" ||
                    t.text == "atan") {
                    expect(Token::lparen, "'('");
                    Expr a = expression();
                    expect(Token::rparen, "')'");
                    if (t.text == "sin") return sin(a);
                    if (t.text == "cos") return cos(a);
                    if (t.text == "exp") return exp(a);
                    if (t.text == "sqrt") return sqrt(a);
                    return atan(a);
                }
                if (t.text == "bump") return bump_call(t.offset);
                if (t.text.size() >= 2 && t.text[0] == 'x') {
                    bool digits = true;
                    for (std::size_t i = 1; i < t.text.size(); ++i)
                        digits = digits && std::isdigit(static_cast<unsigned char>(t.text[i]));
                    if (digits) {
                        int idx = std::stoi(t.text.substr(1));
                        if (idx < 1 || idx > arity_)
                            throw ParseError(t.offset, "variable " + t.text + " out of range for arity " +
                                                           std::to_string(arity_));
                        return Expr::variable(idx);
                    }
                }
                throw ParseError(t.offset, "unknown identifier '" + t.text + "'");
            }
            default:
                throw ParseError(t.offset, "expected a value");
        }
    }

    double signed_literal(const char* what) {
        bool neg = false;
        if (lex_.peek().kind == Token::minus) {
            lex_.take();
            neg = true;
        }
        Token t = expect(Token::number, what);
        return neg ? -t.num : t.num;
    }

    Expr bump_call(std::size_t call_offset) {
        expect(Token::lparen, "'('");
        const double radius = signed_literal("bump radius literal");
        if (!(radius > 0.0)) throw ParseError(call_offset, "bump radius must be > 0");
        expect(Token::semi, "';'");
        std::vector<double> center;
        center.push_back(signed_literal("bump center literal"));
        while (lex_.peek().kind == Token::comma) {
            lex_.take();
            center.push_back(signed_literal("bump center literal"));
        }
        std::vector<Expr> args;
        if (lex_.peek().kind == Token::semi) {
            lex_.take();
            args.push_back(expression());
            while (lex_.peek().kind == Token::comma) {
                lex_.take();
                args.push_back(expression());
            }
            if (args.size() != center.size())
                throw ParseError(call_offset, "bump argument count must match center arity");
        } else if (static_cast<int>(center.size()) != arity_) {
            throw ParseError(call_offset, "bump center arity " + std::to_string(center.size()) +
                                              " does not match expression arity " +
                                              std::to_string(arity_));
        }
        expect(Token::rparen, "')'");
        return Expr::bump(radius, std::move(center), std::move(args));
    }

    Token expect(Token::Kind k, const char* what) {
        Token t = lex_.take();
        if (t.kind != k) throw ParseError(t.offset, std::string("expected ") + what);
        return t;
    }

    Lexer lex_;
    int arity_;
};

}  // namespace

Expr parse_expr(std::string_view text, int arity) {
    if (arity < 0) throw std::invalid_argument("arity must be >= 0");
    return Parser(text, arity).parse();
}

std::vector<double> fd_gradient(const Expr& e, std::span<const double> point, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
    std::vector<double> grad(point.size());
    std::vector<double> p(point.begin(), point.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + h;
        const double hi = e.eval(p);
        p[i] = saved - h;
        const double lo = e.eval(p);
        p[i] = saved;
        grad[i] = (hi - lo) / (2.0 * h);
    }
    return grad;
}

}  // namespace vforms
