#pragma once

// A word problem with its gold equation system and answers, and its
// JSON-lines representation.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwp/errors.hpp"
#include "mwp/expression.hpp"
#include "mwp/solver.hpp"

namespace mwp {

struct Problem {
    std::string id;
    std::string question;
    EquationSystem gold_system;
    std::vector<Rational> gold_answers;
    // Names the variable of each gold answer.  Empty for seed data that
    // stores an unlabeled answer list.
    std::vector<std::string> answer_variables;
    int unknowns = 0;
    std::string source;
    std::string topic;
    std::vector<std::string> lineage;

    // Gold values keyed by variable.  Uses answer_variables when present,
    // otherwise the unique solution of gold_system.  Throws
    // GoldInconsistency when neither yields a full assignment.
    Bindings oracle() const;
};

class GoldInconsistency : public Error {
public:
    GoldInconsistency(std::string id, const std::string& why);
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

// Checks unknowns = |variables| = |answers| and that the gold answers
// satisfy the gold system (by name when labeled, else as a multiset
// against its unique solution under `tolerance`).
void validate_problem(const Problem& problem, const Tolerance& tolerance = {});

nlohmann::json problem_to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& j);

// Exact rationals as JSON: integers and exactly representable decimals as
// numbers, anything else as a "p/q" or decimal string.
nlohmann::json rational_to_json(const Rational& value);
Rational rational_from_json(const nlohmann::json& j);

// Lines are written with keys in sorted order.
void write_problems(const std::filesystem::path& path, const std::vector<Problem>& problems);

}  // namespace mwp
