#include "mwp/parser.hpp"

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "mwp/errors.hpp"

namespace mwp {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, LParen, RParen, Equals, End };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string_view text;
};

const char* describe(Tok t) {
    switch (t) {
        case Tok::Number: return "number";
        case Tok::Ident: return "identifier";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Equals: return "'='";
        case Tok::End: return "end of input";
    }
    return "token";
}

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (is_space(c)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
            while (i < src.size() && is_digit(src[i])) ++i;
            if (i < src.size() && src[i] == '.') {
                ++i;
                while (i < src.size() && is_digit(src[i])) ++i;
            }
            if (i < src.size() && src[i] == '.') throw SyntaxError(i, "malformed number");
            out.push_back({Tok::Number, start, src.substr(start, i - start)});
            continue;
        }
        if (is_alpha(c)) {
            while (i < src.size() && is_alpha(src[i])) ++i;
            if (i < src.size() && (is_digit(src[i]) || src[i] == '_'))
                throw SyntaxError(i, "identifiers must be purely alphabetic");
            out.push_back({Tok::Ident, start, src.substr(start, i - start)});
            continue;
        }
        Tok kind;
        switch (c) {
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            case '=': kind = Tok::Equals; break;
            default:
                throw SyntaxError(i, std::string("illegal character '") + c + "'");
        }
        out.push_back({kind, start, src.substr(start, 1)});
        ++i;
    }
    out.push_back({Tok::End, src.size(), {}});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

    Equation equation(std::string_view src) {
        if (peek().kind == Tok::Equals) throw SyntaxError(peek().pos, "empty left-hand side");
        Expression lhs = expr();
        if (peek().kind != Tok::Equals) {
            if (peek().kind == Tok::End) throw SyntaxError(peek().pos, "missing '='");
            unexpected();
        }
        advance();
        if (peek().kind == Tok::End) throw SyntaxError(peek().pos, "empty right-hand side");
        Expression rhs = expr();
        if (peek().kind == Tok::Equals) throw SyntaxError(peek().pos, "more than one '='");
        if (peek().kind != Tok::End) unexpected();
        return Equation{std::move(lhs), std::move(rhs), std::string(src)};
    }

    Expression whole_expression() {
        if (peek().kind == Tok::End) throw SyntaxError(0, "empty expression");
        Expression e = expr();
        if (peek().kind != Tok::End) unexpected();
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }

    [[noreturn]] void unexpected() const {
        throw SyntaxError(peek().pos, std::string("unexpected ") + describe(peek().kind));
    }

    Expression expr() {
        Expression e = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const bool plus = advance().kind == Tok::Plus;
            Expression rhs = term();
            e = plus ? Expression::add(std::move(e), std::move(rhs))
                     : Expression::sub(std::move(e), std::move(rhs));
        }
        return e;
    }

    Expression term() {
        bool after_number = false;
        Expression e = factor(after_number);
        for (;;) {
            const Tok k = peek().kind;
            if (k == Tok::Star) {
                advance();
                e = Expression::mul(std::move(e), factor(after_number));
            } else if (k == Tok::Slash) {
                const std::size_t at = advance().pos;
                Expression divisor = factor(after_number);
                if (is_zero_literal(divisor)) throw SyntaxError(at, "division by literal zero");
                e = Expression::div(std::move(e), std::move(divisor));
            } else if (after_number && (k == Tok::Ident || k == Tok::LParen)) {
                e = Expression::mul(std::move(e), factor(after_number));
            } else {
                return e;
            }
        }
    }

    // `ends_with_number` reports whether the factor was a (possibly negated)
    // number literal, which is what licenses an implicit product after it.
    Expression factor(bool& ends_with_number) {
        if (peek().kind == Tok::Minus) {
            advance();
            if (peek().kind == Tok::Minus) throw SyntaxError(peek().pos, "repeated unary minus");
            return Expression::neg(primary(ends_with_number));
        }
        return primary(ends_with_number);
    }

    Expression primary(bool& ends_with_number) {
        const Token& t = peek();
        ends_with_number = false;
        switch (t.kind) {
            case Tok::Number: {
                advance();
                auto value = Rational::parse(t.text);
                if (!value) throw SyntaxError(t.pos, "malformed number");
                ends_with_number = true;
                return Expression::constant(*value);
            }
            case Tok::Ident:
                advance();
                if (peek().kind == Tok::LParen)
                    throw SyntaxError(peek().pos, "function application is not supported");
                return Expression::variable(std::string(t.text));
            case Tok::LParen: {
                const std::size_t open = advance().pos;
                if (peek().kind == Tok::RParen) throw SyntaxError(peek().pos, "empty parentheses");
                Expression inner = expr();
                if (peek().kind != Tok::RParen) {
                    if (peek().kind == Tok::End) throw SyntaxError(open, "unbalanced '('");
                    unexpected();
                }
                advance();
                return inner;
            }
            case Tok::RParen:
                throw SyntaxError(t.pos, "unbalanced ')'");
            default:
                unexpected();
        }
    }

    static bool is_zero_literal(const Expression& e) {
        if (e.kind() == Expression::Kind::Neg) return is_zero_literal(e.lhs());
        return e.kind() == Expression::Kind::Constant && e.value().is_zero();
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace

Equation parse_equation(std::string_view text) {
    Parser p(text);
    return p.equation(text);
}

Expression parse_expression(std::string_view text) {
    Parser p(text);
    return p.whole_expression();
}

EquationSystem parse_system(std::string_view text) {
    std::vector<Equation> equations;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find_first_of(";\n", start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view piece = text.substr(start, end - start);
        bool blank = true;
        for (char c : piece)
            if (!is_space(c)) blank = false;
        if (!blank) {
            try {
                equations.push_back(parse_equation(piece));
            } catch (const SyntaxError& e) {
                throw SyntaxError(start + e.position(), e.detail());
            }
        }
        start = end + 1;
    }
    return EquationSystem(std::move(equations));
}

}  // namespace mwp
