#pragma once

// Exception types shared across modules.  Every error a caller is expected
// to handle derives from mwp::Error so the CLI can report it uniformly.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mwp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A contract precondition was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::string message);

    std::size_t position() const { return position_; }
    const std::string& detail() const { return detail_; }

private:
    std::size_t position_;
    std::string detail_;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(std::string name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class DivisionByZero : public Error {
public:
    DivisionByZero() : Error("division by zero") {}
    explicit DivisionByZero(const std::string& what) : Error(what) {}
};

class NonlinearError : public Error {
public:
    explicit NonlinearError(std::string term);
    // Rendered text of the offending sub-expression.
    const std::string& term() const { return term_; }

private:
    std::string term_;
};

// A line of a JSON-lines file could not be read.  Line numbers are 1-based.
class FormatError : public Error {
public:
    FormatError(std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace mwp
