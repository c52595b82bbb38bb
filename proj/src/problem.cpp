#include "mwp/problem.hpp"

#include <fstream>

#include "mwp/parser.hpp"

namespace mwp {

using nlohmann::json;

GoldInconsistency::GoldInconsistency(std::string id, const std::string& why)
    : Error("gold data of problem '" + id + "' is inconsistent: " + why), id_(std::move(id)) {}

Bindings Problem::oracle() const {
    if (!answer_variables.empty()) {
        if (answer_variables.size() != gold_answers.size())
            throw GoldInconsistency(id, "answer variables and answers differ in length");
        Bindings b;
        for (std::size_t i = 0; i < answer_variables.size(); ++i) b.emplace(answer_variables[i], gold_answers[i]);
        return b;
    }
    SolveOutcome outcome = solve_system(gold_system);
    if (!is_unique(outcome)) throw GoldInconsistency(id, "gold system is " + describe(outcome));
    return std::get<Unique>(outcome).assignment;
}

void validate_problem(const Problem& p, const Tolerance& tolerance) {
    const auto& vars = p.gold_system.variables();
    if (vars.empty()) throw GoldInconsistency(p.id, "gold system has no variables");
    if (p.unknowns != static_cast<int>(vars.size()))
        throw GoldInconsistency(p.id, "unknowns is " + std::to_string(p.unknowns) + " but the gold system has " +
                                          std::to_string(vars.size()) + " variables");
    if (p.gold_answers.size() != vars.size())
        throw GoldInconsistency(p.id, std::to_string(p.gold_answers.size()) + " answers for " +
                                          std::to_string(vars.size()) + " unknowns");
    SolveOutcome outcome = solve_system(p.gold_system);
    if (!is_unique(outcome)) throw GoldInconsistency(p.id, "gold system is " + describe(outcome));
    const auto& solution = std::get<Unique>(outcome).assignment;
    if (!p.answer_variables.empty()) {
        for (std::size_t i = 0; i < p.answer_variables.size(); ++i) {
            auto it = solution.find(p.answer_variables[i]);
            if (it == solution.end()) throw GoldInconsistency(p.id, "answer variable " + p.answer_variables[i] + " is not in the system");
            if (!tolerance.within(it->second, p.gold_answers[i]))
                throw GoldInconsistency(p.id, p.answer_variables[i] + " solves to " + it->second.to_string() +
                                                  ", gold answer is " + p.gold_answers[i].to_string());
        }
    } else if (!match_answers(solution, p.gold_answers, tolerance)) {
        throw GoldInconsistency(p.id, "gold answers do not match the solution " + describe(outcome, vars));
    }
}

json rational_to_json(const Rational& value) {
    if (value.is_integer() && value.numerator().fits_slong_p()) return value.numerator().get_si();
    if (value.has_terminating_decimal()) {
        const double d = value.to_double();
        if (Rational::from_double_decimal(d) == value) return d;
    }
    return value.to_string();
}

Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return Rational::from_double_decimal(j.get<double>());
    if (j.is_string()) {
        auto r = Rational::parse(j.get<std::string>());
        if (r) return *r;
    }
    throw Error("expected a number or rational string, got " + j.dump());
}

json problem_to_json(const Problem& p) {
    json answers = json::array();
    for (const auto& a : p.gold_answers) answers.push_back(rational_to_json(a));
    json j{{"id", p.id},
           {"question", p.question},
           {"equations", p.gold_system.rendered_lines()},
           {"answers", std::move(answers)},
           {"unknowns", p.unknowns},
           {"source", p.source},
           {"lineage", p.lineage}};
    if (!p.answer_variables.empty()) j["variables"] = p.answer_variables;
    if (!p.topic.empty()) j["topic"] = p.topic;
    return j;
}

Problem problem_from_json(const json& j) {
    Problem p;
    p.id = j.at("id").get<std::string>();
    p.question = j.at("question").get<std::string>();
    std::vector<Equation> eqs;
    for (const auto& e : j.at("equations")) eqs.push_back(parse_equation(e.get<std::string>()));
    p.gold_system = EquationSystem(std::move(eqs));
    for (const auto& a : j.at("answers")) p.gold_answers.push_back(rational_from_json(a));
    p.answer_variables = j.value("variables", std::vector<std::string>{});
    p.unknowns = j.value("unknowns", static_cast<int>(p.gold_system.variables().size()));
    p.source = j.value("source", std::string{});
    p.topic = j.value("topic", std::string{});
    p.lineage = j.value("lineage", std::vector<std::string>{});
    return p;
}

void write_problems(const std::filesystem::path& path, const std::vector<Problem>& problems) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& p : problems) out << problem_to_json(p).dump() << '\n';
}

}  // namespace mwp
