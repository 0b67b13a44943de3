#pragma once

// Expression language for data fields in configuration files.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative: 2^3^2 = 2^9
//   primary := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt | abs
//
// Numbers are decimal with optional fraction and exponent. Whitespace is ignored.

#include "grade2/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace grade2::expr {

/// Syntax error at a byte offset, listing the tokens that would have been accepted there.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail = {})
        : Error(format(offset, expected, detail)), offset_(offset), expected_(std::move(expected)) {}
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string format(std::size_t offset, const std::vector<std::string>& expected, const std::string& detail) {
        std::string s = "syntax error at offset " + std::to_string(offset);
        if (!detail.empty()) s += ": " + detail;
        if (!expected.empty()) {
            s += "; expected one of:";
            for (const auto& e : expected) s += " " + e;
        }
        return s;
    }
    std::size_t offset_;
    std::vector<std::string> expected_;
};

enum class Op { number, var_x, var_y, pi, neg, add, sub, mul, div, pow, sin, cos, exp, sqrt, abs };

inline bool is_function(Op op) { return op >= Op::sin; }
inline bool is_binary(Op op) { return op >= Op::add && op <= Op::pow; }

inline const char* function_name(Op op) {
    switch (op) {
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::exp: return "exp";
    case Op::sqrt: return "sqrt";
    case Op::abs: return "abs";
    default: return "";
    }
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::number;
    double value = 0.0;   ///< literal value for Op::number
    NodePtr a, b;         ///< operands; b only for binary operators
};

inline NodePtr make_number(double v) { return std::make_shared<const Node>(Node{Op::number, v, nullptr, nullptr}); }
inline NodePtr make_leaf(Op op) { return std::make_shared<const Node>(Node{op, 0.0, nullptr, nullptr}); }
inline NodePtr make_unary(Op op, NodePtr a) { return std::make_shared<const Node>(Node{op, 0.0, std::move(a), nullptr}); }
inline NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
    return std::make_shared<const Node>(Node{op, 0.0, std::move(a), std::move(b)});
}

/// Structural equality; literals compare by bit pattern of their value.
inline bool equal(const Node& l, const Node& r) {
    if (l.op != r.op) return false;
    if (l.op == Op::number) return l.value == r.value && std::signbit(l.value) == std::signbit(r.value);
    if (l.a && !equal(*l.a, *r.a)) return false;
    if (l.b && !equal(*l.b, *r.b)) return false;
    return true;
}

inline double eval(const Node& n, double x, double y) {
    auto fail = [](const std::string& what) -> double { throw DomainError(what); };
    double r = 0.0;
    switch (n.op) {
    case Op::number: r = n.value; break;
    case Op::var_x: r = x; break;
    case Op::var_y: r = y; break;
    case Op::pi: r = std::numbers::pi; break;
    case Op::neg: r = -eval(*n.a, x, y); break;
    case Op::add: r = eval(*n.a, x, y) + eval(*n.b, x, y); break;
    case Op::sub: r = eval(*n.a, x, y) - eval(*n.b, x, y); break;
    case Op::mul: r = eval(*n.a, x, y) * eval(*n.b, x, y); break;
    case Op::div: {
        const double num = eval(*n.a, x, y), den = eval(*n.b, x, y);
        if (den == 0.0) fail("division by zero");
        r = num / den;
        break;
    }
    case Op::pow: {
        const double base = eval(*n.a, x, y), e = eval(*n.b, x, y);
        if (base < 0.0 && e != std::floor(e)) fail("negative base raised to a non-integer power");
        if (base == 0.0 && e < 0.0) fail("zero raised to a negative power");
        r = std::pow(base, e);
        break;
    }
    case Op::sin: r = std::sin(eval(*n.a, x, y)); break;
    case Op::cos: r = std::cos(eval(*n.a, x, y)); break;
    case Op::exp: r = std::exp(eval(*n.a, x, y)); break;
    case Op::sqrt: {
        const double v = eval(*n.a, x, y);
        if (v < 0.0) fail("square root of a negative number");
        r = std::sqrt(v);
        break;
    }
    case Op::abs: r = std::abs(eval(*n.a, x, y)); break;
    }
    if (!std::isfinite(r)) fail("non-finite result");
    return r;
}

inline void print(const Node& n, std::string& out) {
    switch (n.op) {
    case Op::number: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        if (n.value < 0 || std::signbit(n.value)) {
            out += "(-";
            std::snprintf(buf, sizeof buf, "%.17g", -n.value);
            out += buf;
            out += ")";
        } else {
            out += buf;
        }
        return;
    }
    case Op::var_x: out += "x"; return;
    case Op::var_y: out += "y"; return;
    case Op::pi: out += "pi"; return;
    case Op::neg:
        out += "(-";
        print(*n.a, out);
        out += ")";
        return;
    default: break;
    }
    if (is_function(n.op)) {
        out += function_name(n.op);
        out += "(";
        print(*n.a, out);
        out += ")";
        return;
    }
    static constexpr const char* sym[] = {" + ", " - ", " * ", " / ", "^"};
    out += "(";
    print(*n.a, out);
    out += sym[static_cast<int>(n.op) - static_cast<int>(Op::add)];
    print(*n.b, out);
    out += ")";
}

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expression();
        skip();
        if (pos_ != s_.size()) throw SyntaxError(pos_, {"+", "-", "*", "/", "^", "end of input"});
        return e;
    }

private:
    static constexpr int max_depth = 200;

    void skip() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    static bool digit(char c) { return c >= '0' && c <= '9'; }
    static bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& p_) : p(p_) {
            if (++p.depth_ > max_depth) throw SyntaxError(p.pos_, {}, "expression nested too deeply");
        }
        ~DepthGuard() { --p.depth_; }
    };

    NodePtr expression() {
        DepthGuard guard(*this);
        NodePtr l = term();
        for (;;) {
            if (accept('+')) l = make_binary(Op::add, l, term());
            else if (accept('-')) l = make_binary(Op::sub, l, term());
            else return l;
        }
    }
    NodePtr term() {
        NodePtr l = unary();
        for (;;) {
            if (accept('*')) l = make_binary(Op::mul, l, unary());
            else if (accept('/')) l = make_binary(Op::div, l, unary());
            else return l;
        }
    }
    NodePtr unary() {
        DepthGuard guard(*this);
        if (accept('-')) return make_unary(Op::neg, unary());
        return power();
    }
    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make_binary(Op::pow, base, unary());
        return base;
    }
    NodePtr primary() {
        skip();
        static const std::vector<std::string> operand = {"number", "x", "y", "pi", "sin", "cos", "exp", "sqrt", "abs", "(", "-"};
        if (pos_ >= s_.size()) throw SyntaxError(pos_, operand, "unexpected end of input");
        const char c = s_[pos_];
        if (digit(c) || c == '.') return number();
        if (ident_start(c)) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (ident_start(s_[pos_]) || digit(s_[pos_]))) ++pos_;
            const std::string_view id = s_.substr(start, pos_ - start);
            if (id == "x") return make_leaf(Op::var_x);
            if (id == "y") return make_leaf(Op::var_y);
            if (id == "pi") return make_leaf(Op::pi);
            for (Op f : {Op::sin, Op::cos, Op::exp, Op::sqrt, Op::abs}) {
                if (id != function_name(f)) continue;
                if (!accept('(')) throw SyntaxError(pos_, {"("});
                NodePtr arg = expression();
                if (!accept(')')) throw SyntaxError(pos_, {")", "+", "-", "*", "/", "^"});
                return make_unary(f, arg);
            }
            throw SyntaxError(start, operand, "unknown identifier '" + std::string(id) + "'");
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expression();
            if (!accept(')')) throw SyntaxError(pos_, {")", "+", "-", "*", "/", "^"});
            return e;
        }
        throw SyntaxError(pos_, operand);
    }
    NodePtr number() {
        const std::size_t start = pos_;
        std::size_t mantissa_digits = 0;
        while (pos_ < s_.size() && digit(s_[pos_])) ++pos_, ++mantissa_digits;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && digit(s_[pos_])) ++pos_, ++mantissa_digits;
        }
        if (mantissa_digits == 0) throw SyntaxError(start, {"digit"}, "malformed number");
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ >= s_.size() || !digit(s_[pos_])) throw SyntaxError(pos_, {"digit"}, "malformed exponent");
            while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
        }
        double v = 0.0;
        const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || !std::isfinite(v)) throw SyntaxError(start, {}, "number out of range");
        return make_number(v);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

} // namespace detail

/// Immutable parsed expression in the variables x and y.
class Expr {
public:
    Expr() : root_(make_number(0.0)) {}
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    static Expr parse(std::string_view text) { return Expr(detail::Parser(text).parse()); }

    double operator()(double x, double y) const { return expr::eval(*root_, x, y); }
    std::string str() const {
        std::string s;
        expr::print(*root_, s);
        return s;
    }
    const Node& root() const { return *root_; }
    bool operator==(const Expr& o) const { return equal(*root_, *o.root_); }

private:
    NodePtr root_;
};

inline Expr parse(std::string_view text) { return Expr::parse(text); }
inline double eval(const Expr& e, double x, double y) { return e(x, y); }
inline std::string print(const Expr& e) { return e.str(); }

} // namespace grade2::expr
