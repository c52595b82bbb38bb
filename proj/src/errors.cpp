#include "mwp/errors.hpp"

namespace mwp {

SyntaxError::SyntaxError(std::size_t position, std::string message)
    : Error("syntax error at " + std::to_string(position) + ": " + message),
      position_(position),
      detail_(std::move(message)) {}

UnboundVariable::UnboundVariable(std::string name)
    : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}

NonlinearError::NonlinearError(std::string term)
    : Error("nonlinear term: " + term), term_(std::move(term)) {}

FormatError::FormatError(std::size_t line, const std::string& message)
    : Error("format error on line " + std::to_string(line) + ": " + message), line_(line) {}

}  // namespace mwp
