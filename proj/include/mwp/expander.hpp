#pragma once

// Progressive expansion: an N-unknown problem becomes an (N+1)-unknown one
// through five model steps (understand, introduce, expand equations,
// textualize, polish).  Step 3 runs behind the program verifier, so no
// candidate reaches the text steps unless it solves uniquely to the
// parent's answers plus the new oracle value.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mwp/formulate.hpp"
#include "mwp/strategy.hpp"

namespace mwp {

struct ExpansionDraft {
    std::string glossary;
    std::string new_variable;
    Rational oracle_value;
    std::optional<Equation> new_equation;
    EquationSystem candidate_system;
    std::string new_statement;
    std::string polished_question;
    int retries_used = 0;
};

struct ExpanderConfig {
    GenerationConfig generation;
    PromptLibrary prompts = PromptLibrary::defaults();
    int max_retries = 3;
};

class MalformedStepOutput : public Error {
public:
    MalformedStepOutput(std::string step, const std::string& why);
    const std::string& step() const { return step_; }

private:
    std::string step_;
};

class NameCollision : public Error {
public:
    explicit NameCollision(std::string name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class VerificationExhausted : public Error {
public:
    VerificationExhausted(VerifierVerdict last, int attempts);
    const VerifierVerdict& last_verdict() const { return last_; }
    int attempts() const { return attempts_; }

private:
    VerifierVerdict last_;
    int attempts_;
};

// "two", "three", ... for template text; digits beyond twenty.
std::string number_word(int n);

std::string step_understand(Backend& backend, const ExpanderConfig& config, const Problem& problem);

struct NewVariable {
    std::string name;
    Rational value;
};

// Reads "<name> = <number>" from the reply, preferring a line that says
// "New variable".
NewVariable parse_new_variable(std::string_view reply);

NewVariable step_introduce(Backend& backend, const ExpanderConfig& config, const Problem& problem,
                           const std::string& glossary);

// The equation on the last "New equation:" line, else the first line
// holding '=' that parses.  Nullopt when nothing parses.
std::optional<Equation> parse_new_equation(std::string_view reply);

struct ExpandedSystem {
    EquationSystem system;
    Equation new_equation;
    int attempts = 0;
};

// Up to max_retries requests for one new equation; each rejection's reason
// is fed back into the next request.
ExpandedSystem step_expand_equations(Backend& backend, const ExpanderConfig& config, const Problem& problem,
                                     const std::string& new_variable, const Rational& oracle_value,
                                     int max_retries);

std::string step_textualize(Backend& backend, const ExpanderConfig& config, const Problem& problem,
                            const ExpansionDraft& draft);

std::string step_polish(Backend& backend, const ExpanderConfig& config, const Problem& problem,
                        const ExpansionDraft& draft);

struct Expansion {
    Problem problem;
    ExpansionDraft draft;
};

// Runs the five steps.  The child has one more unknown, the verified
// system, the parent's answers plus the oracle value, lineage extended by
// the parent id, and id "<parent id>.<new variable>".
Expansion expand_problem(Backend& backend, const ExpanderConfig& config, const Problem& problem);

struct FilterDecision {
    Problem problem;
    bool kept = false;
    std::string reason;  // "correct", "wrong answer", "no answer", or the transport error
    SolveTrace trace;
};

struct FilterResult {
    std::vector<Problem> kept;
    std::vector<FilterDecision> decisions;  // input order

    std::vector<Problem> discarded() const;
};

// Keeps a generated problem iff `strategy` answers it correctly.
FilterResult filter_generated(Strategy& strategy, const std::vector<Problem>& problems,
                              const Tolerance& tolerance = {});

}  // namespace mwp
