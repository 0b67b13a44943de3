#include "grade2/expr.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>

using namespace grade2;
using grade2::expr::Expr;
using grade2::expr::SyntaxError;

namespace {

double ev(const std::string& s, double x = 0.0, double y = 0.0) { return expr::parse(s)(x, y); }

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

// Test-local expression tree with its own evaluator and a minimal-parenthesis
// printer driven by the documented precedence rules.
struct Ref {
    enum Kind { num, vx, vy, vpi, neg, add, sub, mul, dvd, pw, fsin, fcos, fexp, fsqrt, fabs } k = num;
    double v = 0.0;
    std::unique_ptr<Ref> l, r;
};

int prec(const Ref& n) {
    switch (n.k) {
    case Ref::add: case Ref::sub: return 1;
    case Ref::mul: case Ref::dvd: return 2;
    case Ref::neg: return 3;
    case Ref::pw: return 4;
    default: return 5;
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render(const Ref& n) {
    auto wrap = [](const Ref& c, bool paren) { return paren ? "(" + render(c) + ")" : render(c); };
    switch (n.k) {
    case Ref::num: return fmt(n.v);
    case Ref::vx: return "x";
    case Ref::vy: return "y";
    case Ref::vpi: return "pi";
    case Ref::neg: return "-" + wrap(*n.l, prec(*n.l) < 3);
    case Ref::add: return wrap(*n.l, false) + " + " + wrap(*n.r, prec(*n.r) <= 1);
    case Ref::sub: return wrap(*n.l, false) + " - " + wrap(*n.r, prec(*n.r) <= 1);
    case Ref::mul: return wrap(*n.l, prec(*n.l) < 2) + "*" + wrap(*n.r, prec(*n.r) <= 2);
    case Ref::dvd: return wrap(*n.l, prec(*n.l) < 2) + "/" + wrap(*n.r, prec(*n.r) <= 2);
    case Ref::pw: return wrap(*n.l, prec(*n.l) < 5) + "^" + wrap(*n.r, prec(*n.r) < 3);
    case Ref::fsin: return "sin(" + render(*n.l) + ")";
    case Ref::fcos: return "cos(" + render(*n.l) + ")";
    case Ref::fexp: return "exp(" + render(*n.l) + ")";
    case Ref::fsqrt: return "sqrt(" + render(*n.l) + ")";
    case Ref::fabs: return "abs(" + render(*n.l) + ")";
    }
    return "";
}

// nullopt marks a domain error.
std::optional<double> reference_eval(const Ref& n, double x, double y) {
    std::optional<double> a, b;
    if (n.l && !(a = reference_eval(*n.l, x, y))) return std::nullopt;
    if (n.r && !(b = reference_eval(*n.r, x, y))) return std::nullopt;
    double out = 0.0;
    switch (n.k) {
    case Ref::num: out = n.v; break;
    case Ref::vx: out = x; break;
    case Ref::vy: out = y; break;
    case Ref::vpi: out = std::numbers::pi; break;
    case Ref::neg: out = -*a; break;
    case Ref::add: out = *a + *b; break;
    case Ref::sub: out = *a - *b; break;
    case Ref::mul: out = *a * *b; break;
    case Ref::dvd:
        if (*b == 0.0) return std::nullopt;
        out = *a / *b;
        break;
    case Ref::pw:
        if (*a < 0.0 && *b != std::trunc(*b)) return std::nullopt;
        if (*a == 0.0 && *b < 0.0) return std::nullopt;
        out = std::pow(*a, *b);
        break;
    case Ref::fsin: out = std::sin(*a); break;
    case Ref::fcos: out = std::cos(*a); break;
    case Ref::fexp: out = std::exp(*a); break;
    case Ref::fsqrt:
        if (*a < 0.0) return std::nullopt;
        out = std::sqrt(*a);
        break;
    case Ref::fabs: out = std::fabs(*a); break;
    }
    if (!std::isfinite(out)) return std::nullopt;
    return out;
}

std::unique_ptr<Ref> random_tree(std::mt19937_64& rng, int depth) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    auto node = std::make_unique<Ref>();
    if (depth <= 0 || pick(4) == 0) {
        switch (pick(5)) {
        case 0: node->k = Ref::vx; break;
        case 1: node->k = Ref::vy; break;
        case 2: node->k = Ref::vpi; break;
        case 3: node->v = static_cast<double>(pick(10)); break;
        default: node->v = std::ldexp(static_cast<double>(rng() >> 11), -53) * 10.0; break;
        }
        return node;
    }
    static constexpr Ref::Kind unary[] = {Ref::neg, Ref::fsin, Ref::fcos, Ref::fexp, Ref::fsqrt, Ref::fabs};
    static constexpr Ref::Kind binary[] = {Ref::add, Ref::sub, Ref::mul, Ref::dvd, Ref::pw};
    if (pick(3) == 0) {
        node->k = unary[pick(6)];
        node->l = random_tree(rng, depth - 1);
    } else {
        node->k = binary[pick(5)];
        node->l = random_tree(rng, depth - 1);
        node->r = random_tree(rng, depth - 1);
    }
    return node;
}

} // namespace

TEST(Parse, DocumentedExamples) {
    EXPECT_EQ(ev("sin(pi*x)*y", 0.5, 2.0), 2.0);
    EXPECT_EQ(ev("2^3^2"), 512.0);
    EXPECT_EQ(ev("exp(0)"), 1.0);
    try {
        expr::parse("x + * y");
        FAIL() << "expected a syntax error";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 4u);
        EXPECT_TRUE(has(e.expected(), "number"));
        EXPECT_TRUE(has(e.expected(), "("));
    }
}

TEST(Parse, CommutedProductCancels) {
    const Expr e = expr::parse("x*y - y*x");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) EXPECT_EQ(e(d(rng), d(rng)), 0.0);
}

TEST(Parse, Precedence) {
    EXPECT_EQ(ev("2+3*4"), 14.0);
    EXPECT_EQ(ev("(2+3)*4"), 20.0);
    EXPECT_EQ(ev("2*3+4"), 10.0);
    EXPECT_EQ(ev("8/4/2"), 1.0);
    EXPECT_EQ(ev("8-4-2"), 2.0);
    EXPECT_EQ(ev("-2^2"), -4.0);
    EXPECT_EQ(ev("(-2)^2"), 4.0);
    EXPECT_EQ(ev("2^-1"), 0.5);
    EXPECT_EQ(ev("--3"), 3.0);
    EXPECT_EQ(ev("-3*-2"), 6.0);
    EXPECT_EQ(ev("2*x^2", 3.0), 18.0);
    EXPECT_EQ(ev("abs(x - y)", 1.0, 4.0), 3.0);
    EXPECT_EQ(ev("sqrt(16)"), 4.0);
    EXPECT_DOUBLE_EQ(ev("cos(pi)"), -1.0);
}

TEST(Parse, NumbersAndWhitespace) {
    EXPECT_EQ(ev("1e-3"), 1e-3);
    EXPECT_EQ(ev("2.5E2"), 250.0);
    EXPECT_EQ(ev(".5"), 0.5);
    EXPECT_EQ(ev("  \t x\n+ 1 ", 2.0), 3.0);
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
    const std::pair<const char*, std::size_t> cases[] = {
        {"", 0}, {"x y", 2}, {"sin x", 4}, {"z", 0}, {"(x", 2}, {"1e", 2}, {"2^^3", 2}, {"sin(x,y)", 5}, {"x +", 3}, {")", 0},
    };
    for (auto [text, off] : cases) {
        try {
            expr::parse(text);
            ADD_FAILURE() << "no error for '" << text << "'";
        } catch (const SyntaxError& e) {
            EXPECT_EQ(e.offset(), off) << text;
            EXPECT_FALSE(e.expected().empty()) << text;
        }
    }
}

TEST(Parse, DeepNestingIsRejectedNotCrashing) {
    const std::string deep = std::string(100000, '(') + "x" + std::string(100000, ')');
    EXPECT_THROW(expr::parse(deep), SyntaxError);
    const std::string negs = std::string(100000, '-') + "x";
    EXPECT_THROW(expr::parse(negs), SyntaxError);
    EXPECT_EQ(ev(std::string(50, '(') + "x" + std::string(50, ')'), 7.0), 7.0);
}

TEST(Eval, DomainErrors) {
    EXPECT_THROW(ev("1/x", 0.0), DomainError);
    EXPECT_THROW(ev("sqrt(x)", -1.0), DomainError);
    EXPECT_THROW(ev("x^0.5", -4.0), DomainError);
    EXPECT_THROW(ev("0^(-1)"), DomainError);
    EXPECT_THROW(ev("exp(1000)"), DomainError);
    EXPECT_EQ(ev("(-8)^3"), -512.0);
    EXPECT_EQ(ev("sqrt(0)"), 0.0);
}

TEST(Eval, AgreesWithReferenceOnRandomTrees) {
    std::mt19937_64 rng(20261015);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    int compared = 0, errors = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto tree = random_tree(rng, 5);
        const std::string text = render(*tree);
        Expr e;
        ASSERT_NO_THROW(e = expr::parse(text)) << text;
        for (int p = 0; p < 3; ++p) {
            const double x = d(rng), y = d(rng);
            const auto want = reference_eval(*tree, x, y);
            if (!want) {
                EXPECT_THROW(e(x, y), DomainError) << text;
                ++errors;
                continue;
            }
            double got = 0.0;
            ASSERT_NO_THROW(got = e(x, y)) << text;
            EXPECT_LE(std::abs(got - *want), 4.0 * std::numeric_limits<double>::epsilon() * std::abs(*want)) << text;
            ++compared;
        }
    }
    EXPECT_GT(compared, 1500);
    EXPECT_GT(errors, 0);
}

TEST(Print, ParsePrintParseIsIdempotent) {
    std::mt19937_64 rng(77);
    for (int k = 0; k < 1000; ++k) {
        const auto tree = random_tree(rng, 6);
        const Expr a = expr::parse(render(*tree));
        const std::string printed = expr::print(a);
        const Expr b = expr::parse(printed);
        EXPECT_TRUE(a == b) << render(*tree) << " -> " << printed;
        EXPECT_EQ(expr::print(b), printed);
    }
    for (const char* s : {"sin(pi*x)*y", "2^3^2", "-2^2", "1e-300*x", "0.1 + 0.2", "abs(-x)/sqrt(y)"}) {
        const Expr a = expr::parse(s);
        EXPECT_TRUE(a == expr::parse(expr::print(a))) << s;
    }
}

TEST(Print, StructuralEqualityDistinguishesTrees) {
    EXPECT_FALSE(expr::parse("x - y - 1") == expr::parse("x - (y - 1)"));
    EXPECT_TRUE(expr::parse("x + y") == expr::parse("(x)+(y)"));
}

TEST(Fuzz, ArbitraryInputNeverCrashes) {
    std::mt19937_64 rng(99);
    const std::string alphabet = "xy0123456789.eE+-*/^() \tsincoexpqrtabpi,;z#\x01\xff";
    const std::string seeds[] = {"sin(pi*x)*y", "2^3^2", "exp(-x^2 - y^2)", "sqrt(abs(x))/(1+y)", "1e-3*x - -y"};
    int parsed = 0;
    for (int k = 0; k < 20000; ++k) {
        std::string s;
        if (k % 2 == 0) {
            const std::size_t len = rng() % 40;
            for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
        } else {
            s = seeds[rng() % 5];
            const int edits = 1 + static_cast<int>(rng() % 4);
            for (int i = 0; i < edits && !s.empty(); ++i) {
                const std::size_t at = rng() % s.size();
                switch (rng() % 3) {
                case 0: s.erase(at, 1); break;
                case 1: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
                default: s[at] = alphabet[rng() % alphabet.size()]; break;
                }
            }
        }
        try {
            const Expr e = expr::parse(s);
            ++parsed;
            try {
                (void)e(0.3, -0.7);
            } catch (const DomainError&) {
            }
        } catch (const SyntaxError& err) {
            EXPECT_LE(err.offset(), s.size()) << s;
        }
    }
    EXPECT_GT(parsed, 0);
}
