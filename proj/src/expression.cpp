#include "mwp/expression.hpp"

#include <algorithm>
#include <stdexcept>

#include "mwp/errors.hpp"

namespace mwp {

struct Expression::Node {
    Kind kind;
    Rational value;
    std::string name;
    Expression lhs{nullptr};
    Expression rhs{nullptr};
    bool has_variable = false;
};

Expression Expression::constant(Rational value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = std::move(value);
    return Expression(std::move(n));
}

Expression Expression::variable(std::string name) {
    if (name.empty()) throw std::invalid_argument("empty variable name");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->name = std::move(name);
    n->has_variable = true;
    return Expression(std::move(n));
}

Expression Expression::neg(Expression operand) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->has_variable = operand.node_->has_variable;
    n->lhs = std::move(operand);
    return Expression(std::move(n));
}

#define MWP_BINARY_FACTORY(fn, k)                                          \
    Expression Expression::fn(Expression lhs, Expression rhs) {            \
        auto n = std::make_shared<Node>();                                 \
        n->kind = Kind::k;                                                 \
        n->has_variable = lhs.node_->has_variable || rhs.node_->has_variable; \
        n->lhs = std::move(lhs);                                           \
        n->rhs = std::move(rhs);                                           \
        return Expression(std::move(n));                                   \
    }

MWP_BINARY_FACTORY(add, Add)
MWP_BINARY_FACTORY(sub, Sub)
MWP_BINARY_FACTORY(mul, Mul)
MWP_BINARY_FACTORY(div, Div)

#undef MWP_BINARY_FACTORY

Expression::Kind Expression::kind() const { return node_->kind; }

bool Expression::is_binary() const {
    switch (node_->kind) {
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div:
            return true;
        default:
            return false;
    }
}

const Rational& Expression::value() const { return node_->value; }
const std::string& Expression::name() const { return node_->name; }

const Expression& Expression::lhs() const { return node_->lhs; }
const Expression& Expression::rhs() const { return node_->rhs; }

bool Expression::contains_variable() const { return node_->has_variable; }

void Expression::collect_variables(std::vector<std::string>& out) const {
    switch (kind()) {
        case Kind::Constant:
            return;
        case Kind::Variable:
            if (std::find(out.begin(), out.end(), name()) == out.end()) out.push_back(name());
            return;
        case Kind::Neg:
            lhs().collect_variables(out);
            return;
        default:
            lhs().collect_variables(out);
            rhs().collect_variables(out);
    }
}

bool operator==(const Expression& a, const Expression& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Expression::Kind::Constant:
            return a.value() == b.value();
        case Expression::Kind::Variable:
            return a.name() == b.name();
        case Expression::Kind::Neg:
            return a.lhs() == b.lhs();
        default:
            return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

Rational evaluate(const Expression& expr, const Bindings& bindings) {
    using K = Expression::Kind;
    switch (expr.kind()) {
        case K::Constant:
            return expr.value();
        case K::Variable: {
            auto it = bindings.find(expr.name());
            if (it == bindings.end()) throw UnboundVariable(expr.name());
            return it->second;
        }
        case K::Neg:
            return -evaluate(expr.lhs(), bindings);
        case K::Add:
            return evaluate(expr.lhs(), bindings) + evaluate(expr.rhs(), bindings);
        case K::Sub:
            return evaluate(expr.lhs(), bindings) - evaluate(expr.rhs(), bindings);
        case K::Mul:
            return evaluate(expr.lhs(), bindings) * evaluate(expr.rhs(), bindings);
        case K::Div: {
            Rational num = evaluate(expr.lhs(), bindings);
            Rational den = evaluate(expr.rhs(), bindings);
            if (den.is_zero()) throw DivisionByZero("division by zero in " + render(expr));
            return num / den;
        }
    }
    throw std::logic_error("unreachable expression kind");
}

namespace {

// Binding strength as seen by the parser: sums < products < unary < atoms.
// A non-terminating constant prints as "p/q" and so behaves like a quotient;
// a negative constant prints with a leading '-' and behaves like a negation.
int precedence(const Expression& e) {
    using K = Expression::Kind;
    switch (e.kind()) {
        case K::Add:
        case K::Sub:
            return 1;
        case K::Mul:
        case K::Div:
            return 2;
        case K::Neg:
            return 3;
        case K::Constant:
            if (!e.value().has_terminating_decimal()) return 2;
            return e.value().sign() < 0 ? 3 : 4;
        case K::Variable:
            return 4;
    }
    return 4;
}

void render_into(const Expression& e, std::string& out);

void render_operand(const Expression& e, bool parenthesize, std::string& out) {
    if (parenthesize) out += '(';
    render_into(e, out);
    if (parenthesize) out += ')';
}

void render_into(const Expression& e, std::string& out) {
    using K = Expression::Kind;
    switch (e.kind()) {
        case K::Constant:
            out += e.value().to_string();
            return;
        case K::Variable:
            out += e.name();
            return;
        case K::Neg:
            out += '-';
            // Unary minus applies to a primary only, and "--x" is rejected.
            render_operand(e.lhs(), precedence(e.lhs()) < 4, out);
            return;
        default:
            break;
    }
    const int level = precedence(e);
    const char* op = e.kind() == K::Add ? " + " : e.kind() == K::Sub ? " - " : e.kind() == K::Mul ? " * " : " / ";
    render_operand(e.lhs(), precedence(e.lhs()) < level, out);
    out += op;
    const int right = precedence(e.rhs());
    render_operand(e.rhs(), right <= level || right == 3, out);
}

}  // namespace

std::string render(const Expression& expr) {
    std::string out;
    render_into(expr, out);
    return out;
}

std::string render(const Equation& eq) { return render(eq.lhs) + " = " + render(eq.rhs); }

EquationSystem::EquationSystem(std::vector<Equation> equations) : equations_(std::move(equations)) {
    for (const auto& eq : equations_) {
        eq.lhs.collect_variables(variables_);
        eq.rhs.collect_variables(variables_);
    }
}

EquationSystem EquationSystem::with(Equation eq) const {
    auto copy = equations_;
    copy.push_back(std::move(eq));
    return EquationSystem(std::move(copy));
}

std::vector<std::string> EquationSystem::rendered_lines() const {
    std::vector<std::string> lines;
    lines.reserve(equations_.size());
    for (const auto& eq : equations_) lines.push_back(mwp::render(eq));
    return lines;
}

std::string EquationSystem::render() const {
    std::string out;
    for (const auto& line : rendered_lines()) {
        if (!out.empty()) out += '\n';
        out += line;
    }
    return out;
}

}  // namespace mwp
