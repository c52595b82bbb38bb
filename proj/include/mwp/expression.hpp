#pragma once

// Immutable expression trees for the equations a model writes, plus exact
// evaluation and canonical rendering.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mwp/rational.hpp"

namespace mwp {

using Bindings = std::map<std::string, Rational>;

class Expression {
public:
    enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div };

    static Expression constant(Rational value);
    static Expression variable(std::string name);
    static Expression neg(Expression operand);
    static Expression add(Expression lhs, Expression rhs);
    static Expression sub(Expression lhs, Expression rhs);
    static Expression mul(Expression lhs, Expression rhs);
    static Expression div(Expression lhs, Expression rhs);

    Kind kind() const;
    bool is_binary() const;

    // Valid for Constant.
    const Rational& value() const;
    // Valid for Variable.
    const std::string& name() const;
    // Valid for Neg (operand) and binary nodes (left operand).
    const Expression& lhs() const;
    // Valid for binary nodes.
    const Expression& rhs() const;

    bool contains_variable() const;
    // Distinct variable names in left-to-right order of first appearance.
    void collect_variables(std::vector<std::string>& out) const;

    // Structural equality.
    friend bool operator==(const Expression& a, const Expression& b);

private:
    struct Node;
    explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Exact value of `expr` under `bindings`.  Throws UnboundVariable or
// DivisionByZero.
Rational evaluate(const Expression& expr, const Bindings& bindings);

// Canonical text: explicit '*', minimal parentheses, constants printed by
// Rational::to_string().
std::string render(const Expression& expr);

struct Equation {
    Expression lhs;
    Expression rhs;
    std::string source_text;

    // Structural: source_text is ignored.
    friend bool operator==(const Equation& a, const Equation& b) {
        return a.lhs == b.lhs && a.rhs == b.rhs;
    }
};

std::string render(const Equation& eq);

class EquationSystem {
public:
    EquationSystem() = default;
    explicit EquationSystem(std::vector<Equation> equations);

    const std::vector<Equation>& equations() const { return equations_; }
    // Union of variables across equations in first-appearance order.
    const std::vector<std::string>& variables() const { return variables_; }

    std::size_t size() const { return equations_.size(); }
    bool empty() const { return equations_.empty(); }

    EquationSystem with(Equation eq) const;

    // One canonical equation per line, no trailing newline.
    std::string render() const;
    std::vector<std::string> rendered_lines() const;

    friend bool operator==(const EquationSystem& a, const EquationSystem& b) {
        return a.equations_ == b.equations_;
    }

private:
    std::vector<Equation> equations_;
    std::vector<std::string> variables_;
};

}  // namespace mwp
