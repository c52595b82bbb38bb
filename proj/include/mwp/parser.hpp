#pragma once

// Parser for the equation syntax models emit in step-by-step solutions.
//
//   equation := expr '=' expr
//   expr     := term (('+' | '-') term)*
//   term     := factor (('*' | '/') factor | implicit-factor)*
//   factor   := ['-'] (number | identifier | '(' expr ')')
//
// An implicit factor is an identifier or a parenthesized expression that
// directly follows a number literal: "4c", "0.18a", "2(x + 1)".  Two
// juxtaposed identifiers are never multiplied; "ab" is one identifier.
// Identifiers are purely alphabetic and case-sensitive.  Decimal literals
// become exact rationals.  Anything else ('%', '^', ',', function calls,
// digits inside identifiers) is a SyntaxError.

#include <string_view>

#include "mwp/expression.hpp"

namespace mwp {

// Throws SyntaxError with a 0-based character offset.
Equation parse_equation(std::string_view text);

// Parses a bare expression (no '=').
Expression parse_expression(std::string_view text);

// Parses equations separated by ';' or newlines; blank entries are skipped.
EquationSystem parse_system(std::string_view text);

}  // namespace mwp
