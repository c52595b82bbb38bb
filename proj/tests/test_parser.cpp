#include <doctest.h>

#include <random>

#include "mwp/errors.hpp"
#include "mwp/parser.hpp"
#include "support.hpp"

using namespace mwp;

namespace {

Expression C(long v) { return Expression::constant(Rational(v)); }
Expression Cq(long n, long d) { return Expression::constant(Rational::from_integers(n, d)); }
Expression V(const char* n) { return Expression::variable(n); }

std::size_t syntax_error_position(const char* text) {
    try {
        parse_equation(text);
    } catch (const SyntaxError& e) {
        return e.position();
    }
    FAIL("expected a SyntaxError for " << text);
    return 0;
}

}  // namespace

TEST_CASE("parses grouped subtraction") {
    const Equation eq = parse_equation("y = ( 200.0 - x )");
    CHECK(eq.lhs == V("y"));
    CHECK(eq.rhs == Expression::sub(C(200), V("x")));
    CHECK(eq.source_text == "y = ( 200.0 - x )");
}

TEST_CASE("identity equation") {
    const Equation eq = parse_equation("x = x");
    CHECK(eq.lhs == V("x"));
    CHECK(eq.rhs == V("x"));
}

TEST_CASE("implicit multiplication after numbers") {
    const Equation eq = parse_equation("0.18a + 0.50b + 0.10c = 0.26 * 100");
    const Expression lhs = Expression::add(
        Expression::add(Expression::mul(Cq(9, 50), V("a")), Expression::mul(Cq(1, 2), V("b"))),
        Expression::mul(Cq(1, 10), V("c")));
    CHECK(eq.lhs == lhs);
    CHECK(eq.rhs == Expression::mul(Cq(13, 50), C(100)));

    CHECK(parse_equation("a + b = 4c").rhs == Expression::mul(C(4), V("c")));
    CHECK(parse_expression("2(x + 1)") == Expression::mul(C(2), Expression::add(V("x"), C(1))));
    CHECK(parse_expression("3 x") == Expression::mul(C(3), V("x")));
}

TEST_CASE("juxtaposed letters form one identifier") {
    CHECK(parse_expression("ab") == V("ab"));
    CHECK(parse_expression("A + a") == Expression::add(V("A"), V("a")));
}

TEST_CASE("unary minus") {
    CHECK(parse_expression("-x") == Expression::neg(V("x")));
    CHECK(parse_expression("2 * -x") == Expression::mul(C(2), Expression::neg(V("x"))));
    CHECK_THROWS_AS(parse_expression("--x"), SyntaxError);
}

TEST_CASE("precedence and associativity") {
    CHECK(parse_expression("a - b - c") == Expression::sub(Expression::sub(V("a"), V("b")), V("c")));
    CHECK(parse_expression("a / b / c") == Expression::div(Expression::div(V("a"), V("b")), V("c")));
    CHECK(parse_expression("a + b * c") == Expression::add(V("a"), Expression::mul(V("b"), V("c"))));
}

TEST_CASE("syntax errors carry positions") {
    CHECK_THROWS_AS(parse_equation("x + 1"), SyntaxError);             // missing '='
    CHECK_THROWS_AS(parse_equation("x = 1 = 2"), SyntaxError);         // two '='
    CHECK_THROWS_AS(parse_equation(" = 3"), SyntaxError);              // empty side
    CHECK_THROWS_AS(parse_equation("x = "), SyntaxError);
    CHECK_THROWS_AS(parse_equation("(x + 1 = 2"), SyntaxError);        // unbalanced
    CHECK_THROWS_AS(parse_equation("x + 1) = 2"), SyntaxError);
    CHECK_THROWS_AS(parse_equation("0.27 * 15% = x"), SyntaxError);    // '%'
    CHECK_THROWS_AS(parse_equation("x^2 = 4"), SyntaxError);
    CHECK_THROWS_AS(parse_equation("x1 + y = 2"), SyntaxError);        // digit in identifier
    CHECK_THROWS_AS(parse_equation("sqrt(x) = 2"), SyntaxError);       // function call
    CHECK_THROWS_AS(parse_equation("1,000x = 2"), SyntaxError);
    CHECK_THROWS_AS(parse_equation("x / 0 = 1"), SyntaxError);         // literal zero divisor
    CHECK(syntax_error_position("x + 1 ^ 2 = 3") == 6);
    CHECK(syntax_error_position("ab1 = 2") == 2);
}

TEST_CASE("evaluate") {
    CHECK(evaluate(parse_expression("200 - x"), {{"x", Rational(120)}}) == Rational(80));
    CHECK(evaluate(V("x"), {{"x", Rational(5)}}) == Rational(5));
    CHECK_THROWS_AS(evaluate(parse_expression("40/a"), {{"a", Rational(0)}}), DivisionByZero);
    CHECK_THROWS_AS(evaluate(parse_expression("x + y"), {{"x", Rational(1)}}), UnboundVariable);
    try {
        evaluate(parse_expression("x + y"), {{"x", Rational(1)}});
    } catch (const UnboundVariable& e) {
        CHECK(e.name() == "y");
    }
}

TEST_CASE("render") {
    CHECK(render(Equation{V("y"), Expression::sub(C(200), V("x")), ""}) == "y = 200 - x");
    CHECK(render(Expression::constant(Rational::from_integers(1, 3))) == "1/3");
    CHECK(render(parse_expression("4c")) == "4 * c");
    CHECK(render(parse_expression("a - (b - c)")) == "a - (b - c)");
    CHECK(render(parse_expression("(a - b) - c")) == "a - b - c");
    CHECK(render(parse_expression("a / (b * c)")) == "a / (b * c)");
    CHECK(render(parse_expression("-(x + 1)")) == "-(x + 1)");
    CHECK(render(parse_expression("x - -y")) == "x - (-y)");
}

TEST_CASE("render output is a fixed point after one round") {
    const char* text = "0.01 * 35.0 * x + 0.01 * 15.0 * y = 0.01 * 27.0 * ( 200.0 )";
    const Equation once = parse_equation(text);
    const std::string rendered = render(once);
    CHECK(rendered == "0.01 * 35 * x + 0.01 * 15 * y = 0.01 * 27 * 200");
    const Equation twice = parse_equation(rendered);
    CHECK(twice == once);
    CHECK(render(twice) == rendered);
}

TEST_CASE("non-terminating constants keep their value through render") {
    const Expression e = Expression::mul(Expression::constant(Rational::from_integers(1, 3)), V("x"));
    const Expression back = parse_expression(render(e));
    CHECK(evaluate(back, {{"x", Rational(6)}}) == Rational(2));
}

TEST_CASE("systems list variables in first-appearance order") {
    const EquationSystem s = parse_system("E = D + 5; F = 2E\nE + D + F = 155");
    CHECK(s.size() == 3);
    CHECK(s.variables() == std::vector<std::string>{"E", "D", "F"});
    CHECK(s.render() == "E = D + 5\nF = 2 * E\nE + D + F = 155");
    CHECK(parse_system(" ; x = 1 ;; ").size() == 1);
}

TEST_CASE("property: parse(render(e)) == e for generated equations") {
    std::mt19937 rng(2024);
    const std::vector<std::string> vars{"x", "y", "z", "A", "ab"};
    for (int i = 0; i < 1000; ++i) {
        const int depth = 1 + static_cast<int>(rng() % 6);
        const Equation eq{testing::random_expression(rng, vars, depth), testing::random_expression(rng, vars, depth), ""};
        const std::string text = render(eq);
        INFO(text);
        CHECK(parse_equation(text) == eq);
    }
}

TEST_CASE("property: parsed identifiers are alphabetic") {
    std::mt19937 rng(8);
    const std::string alphabet = "abcxyzAB019_";
    for (int i = 0; i < 500; ++i) {
        std::string name;
        const int len = 1 + static_cast<int>(rng() % 4);
        for (int j = 0; j < len; ++j) name += alphabet[rng() % alphabet.size()];
        const bool alpha = std::all_of(name.begin(), name.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
        const bool starts_digit = std::isdigit(static_cast<unsigned char>(name[0]));
        const std::string text = "q + " + name + " = 1";
        if (alpha) {
            const auto vars = parse_equation(text).lhs.rhs();
            CHECK(vars == V(name.c_str()));
        } else if (!starts_digit) {
            CHECK_THROWS_AS(parse_equation(text), SyntaxError);
        }
    }
}
