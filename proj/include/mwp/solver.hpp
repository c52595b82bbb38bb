#pragma once

// Exact linear-system solving, residual checks, answer matching and the
// program verifier used when expanding problems.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mwp/expression.hpp"

namespace mwp {

// sum(coefficients[v] * v) = constant, with no zero coefficients stored.
struct LinearRow {
    std::map<std::string, Rational> coefficients;
    Rational constant;

    friend bool operator==(const LinearRow&, const LinearRow&) = default;
};

// Moves every variable term left and every constant right.  Throws
// NonlinearError for a product of two variable-bearing factors or a
// variable in a divisor, and DivisionByZero for a constant zero divisor.
LinearRow linearize(const Equation& eq);

struct Unique {
    Bindings assignment;
};
struct Underdetermined {
    std::size_t rank;
};
struct Inconsistent {};
struct Nonlinear {
    std::size_t equation_index;
    std::string detail;
};

using SolveOutcome = std::variant<Unique, Underdetermined, Inconsistent, Nonlinear>;

// Gauss-Jordan elimination over exact rationals.  Total: every input maps
// to one of the four outcomes.
SolveOutcome solve_system(const EquationSystem& system);

bool is_unique(const SolveOutcome& outcome);

// "Unique{x:2, y:1}", "Underdetermined(rank 1)", "Inconsistent",
// "Nonlinear(equation 0: 40 / a)".  Unique values follow `order` when given.
std::string describe(const SolveOutcome& outcome, const std::vector<std::string>& order = {});

// True iff every equation's residual is within `tolerance`.  A division by
// zero during evaluation makes the assignment invalid.  Throws
// UnboundVariable when `assignment` misses a system variable.
bool check_assignment(const EquationSystem& system, const Bindings& assignment,
                      const Rational& tolerance = Rational(0));

// Two values match when |p - g| <= absolute, or, for |g| > relative_above,
// when |p - g| <= relative * |g|.
struct Tolerance {
    Rational absolute = Rational::from_integers(1, 1000);
    Rational relative = Rational::from_integers(1, 10000);
    Rational relative_above = Rational(10);

    static Tolerance exact() { return {Rational(0), Rational(0), Rational(0)}; }
    static Tolerance absolute_only(Rational abs) { return {std::move(abs), Rational(0), Rational(0)}; }

    bool within(const Rational& predicted, const Rational& gold) const;
};

// Multiset matching: predicted and gold values must pair up one-to-one
// with every pair within tolerance.  Variable names are ignored.
bool match_answers(const std::vector<Rational>& predicted, const std::vector<Rational>& gold,
                   const Tolerance& tolerance = {});
bool match_answers(const Bindings& predicted, const std::vector<Rational>& gold,
                   const Tolerance& tolerance = {});

struct VerifierVerdict {
    enum class Reason { OK, NotUnique, OracleMismatch, Nonlinear, ParseFailure };

    bool accepted = false;
    Reason reason = Reason::ParseFailure;
    // Set for OracleMismatch.  `expected` is empty when the oracle does not
    // bind the variable at all.
    std::string variable;
    std::optional<Rational> expected;
    std::optional<Rational> got;
    std::string message;

    static VerifierVerdict ok();
};

const char* to_string(VerifierVerdict::Reason reason);

// Accepts iff the system has a unique solution equal to `oracle`: same
// variables, same values.
VerifierVerdict verify_candidate(const EquationSystem& system, const Bindings& oracle);

// Same, starting from ';'/newline separated equation text.  A parse
// failure is reported as a ParseFailure verdict.
VerifierVerdict verify_candidate_text(std::string_view system_text, const Bindings& oracle);

}  // namespace mwp
