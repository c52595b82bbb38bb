#include "mwp/expander.hpp"

#include <regex>

#include "mwp/parser.hpp"

namespace mwp {

MalformedStepOutput::MalformedStepOutput(std::string step, const std::string& why)
    : Error("malformed " + step + " output: " + why), step_(std::move(step)) {}

NameCollision::NameCollision(std::string name)
    : Error("new variable '" + name + "' already appears in the system"), name_(std::move(name)) {}

VerificationExhausted::VerificationExhausted(VerifierVerdict last, int attempts)
    : Error("no verified equation after " + std::to_string(attempts) + " attempts; last verdict " +
            to_string(last.reason) + ": " + last.message),
      last_(std::move(last)),
      attempts_(attempts) {}

std::string number_word(int n) {
    static const char* words[] = {"zero",    "one",     "two",       "three",    "four",     "five",    "six",
                                  "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
                                  "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty"};
    if (n >= 0 && n <= 20) return words[n];
    return std::to_string(n);
}

namespace {

TemplateVars base_vars(const Problem& problem) {
    const Bindings oracle = problem.oracle();
    return {{"question", problem.question},
            {"equations", problem.gold_system.render()},
            {"solution", render_solution(problem.gold_system, oracle)},
            {"target", number_word(problem.unknowns + 1)}};
}

std::string ask(Backend& backend, const ExpanderConfig& config, const std::string& name, const TemplateVars& vars) {
    return complete(backend, ChatRequest::user(config.generation, config.prompts.render(name, vars))).text;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        out.emplace_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

std::optional<Rational> parse_number(std::string s) {
    std::erase(s, ',');
    return Rational::parse(s);
}

}  // namespace

std::string step_understand(Backend& backend, const ExpanderConfig& config, const Problem& problem) {
    if (problem.gold_system.empty()) throw PreconditionError("problem " + problem.id + " has no gold system");
    return ask(backend, config, "expand_step1_understand", base_vars(problem));
}

NewVariable parse_new_variable(std::string_view reply) {
    static const std::regex labeled(R"(new\s+variable\s*:?\s*\$?([A-Za-z]+)\$?\s*=\s*\$?(-?\d[\d,]*(?:\.\d+)?))",
                                    std::regex::icase);
    static const std::regex bare(R"((?:^|[^A-Za-z0-9_])([A-Za-z]+)\s*=\s*\$?(-?\d[\d,]*(?:\.\d+)?))");
    const std::string text(reply);
    std::smatch m;
    if (!std::regex_search(text, m, labeled) && !std::regex_search(text, m, bare))
        throw MalformedStepOutput("introduce", "no '<name> = <number>' found");
    auto value = parse_number(m[2].str());
    if (!value) throw MalformedStepOutput("introduce", "unreadable value '" + m[2].str() + "'");
    return {m[1].str(), *value};
}

NewVariable step_introduce(Backend& backend, const ExpanderConfig& config, const Problem& problem,
                           const std::string& glossary) {
    if (trim(glossary).empty()) throw PreconditionError("glossary is empty");
    TemplateVars vars = base_vars(problem);
    vars["glossary"] = glossary;
    NewVariable nv = parse_new_variable(ask(backend, config, "expand_step2_introduce", vars));
    const auto& existing = problem.gold_system.variables();
    if (std::find(existing.begin(), existing.end(), nv.name) != existing.end()) throw NameCollision(nv.name);
    return nv;
}

std::optional<Equation> parse_new_equation(std::string_view reply) {
    static const std::regex marker(R"(new\s+equation\s*:\s*(.*)$)", std::regex::icase);
    const auto lines = lines_of(reply);
    std::optional<std::string> labeled;
    for (const auto& line : lines) {
        std::smatch m;
        if (std::regex_search(line, m, marker) && !trim(m[1].str()).empty()) labeled = trim(m[1].str());
    }
    auto try_parse = [](std::string s) -> std::optional<Equation> {
        while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == '$')) s.pop_back();
        if (!s.empty() && s.front() == '$') s.erase(0, 1);
        try {
            return parse_equation(s);
        } catch (const SyntaxError&) {
            return std::nullopt;
        }
    };
    if (labeled) return try_parse(*labeled);
    for (const auto& line : lines)
        if (line.find('=') != std::string::npos)
            if (auto eq = try_parse(trim(line))) return eq;
    return std::nullopt;
}

ExpandedSystem step_expand_equations(Backend& backend, const ExpanderConfig& config, const Problem& problem,
                                     const std::string& new_variable, const Rational& oracle_value,
                                     int max_retries) {
    if (max_retries < 1) throw PreconditionError("max_retries must be >= 1");
    Bindings oracle = problem.oracle();
    oracle[new_variable] = oracle_value;

    TemplateVars vars = base_vars(problem);
    vars["new_variable"] = new_variable;
    vars["oracle_value"] = oracle_value.to_string();
    vars["feedback"] = "";

    VerifierVerdict verdict;
    for (int attempt = 1; attempt <= max_retries; ++attempt) {
        const std::string reply = ask(backend, config, "expand_step3_equation", vars);
        const auto eq = parse_new_equation(reply);
        std::string rejected_text;
        if (!eq) {
            verdict = {};
            verdict.reason = VerifierVerdict::Reason::ParseFailure;
            verdict.message = "no parsable equation in the reply";
        } else {
            rejected_text = render(*eq);
            const EquationSystem candidate = problem.gold_system.with(*eq);
            const auto& vs = candidate.variables();
            if (std::find(vs.begin(), vs.end(), new_variable) == vs.end()) {
                verdict = {};
                verdict.reason = VerifierVerdict::Reason::NotUnique;
                verdict.message = "the equation does not mention " + new_variable;
            } else {
                verdict = verify_candidate(candidate, oracle);
                if (verdict.accepted) return {candidate, *eq, attempt};
            }
        }
        vars["feedback"] = "\nThe previous equation" + (rejected_text.empty() ? "" : " \"" + rejected_text + "\"") +
                           " was rejected (" + to_string(verdict.reason) + "): " + verdict.message + "\n";
    }
    throw VerificationExhausted(verdict, max_retries);
}

std::string step_textualize(Backend& backend, const ExpanderConfig& config, const Problem& problem,
                            const ExpansionDraft& draft) {
    if (!draft.new_equation) throw PreconditionError("draft has no verified equation");
    TemplateVars vars = base_vars(problem);
    vars["glossary"] = draft.glossary;
    vars["new_variable"] = draft.new_variable;
    vars["oracle_value"] = draft.oracle_value.to_string();
    vars["new_equation"] = render(*draft.new_equation);
    vars["equations"] = draft.candidate_system.render();
    return trim(ask(backend, config, "expand_step4_textualize", vars));
}

std::string step_polish(Backend& backend, const ExpanderConfig& config, const Problem& problem,
                        const ExpansionDraft& draft) {
    if (trim(draft.new_statement).empty()) throw PreconditionError("draft has no new statement");
    TemplateVars vars{{"question", problem.question},
                      {"statement", draft.new_statement},
                      {"target", number_word(problem.unknowns + 1)}};
    return trim(ask(backend, config, "expand_step5_polish", vars));
}

Expansion expand_problem(Backend& backend, const ExpanderConfig& config, const Problem& problem) {
    if (problem.unknowns < 1) throw PreconditionError("problem " + problem.id + " has no unknowns");
    validate_problem(problem, Tolerance::exact());

    ExpansionDraft draft;
    draft.glossary = step_understand(backend, config, problem);
    auto [name, value] = step_introduce(backend, config, problem, draft.glossary);
    draft.new_variable = name;
    draft.oracle_value = value;
    auto expanded = step_expand_equations(backend, config, problem, name, value, config.max_retries);
    draft.candidate_system = expanded.system;
    draft.new_equation = expanded.new_equation;
    draft.retries_used = expanded.attempts - 1;
    draft.new_statement = step_textualize(backend, config, problem, draft);
    draft.polished_question = step_polish(backend, config, problem, draft);

    Problem child;
    child.id = problem.id + "." + name;
    child.question = draft.polished_question;
    child.gold_system = draft.candidate_system;
    const Bindings oracle = problem.oracle();
    for (const auto& v : problem.gold_system.variables()) {
        child.answer_variables.push_back(v);
        child.gold_answers.push_back(oracle.at(v));
    }
    child.answer_variables.push_back(name);
    child.gold_answers.push_back(value);
    child.unknowns = problem.unknowns + 1;
    child.source = problem.source;
    child.topic = problem.topic;
    child.lineage = problem.lineage;
    child.lineage.push_back(problem.id);
    validate_problem(child, Tolerance::exact());
    return {std::move(child), std::move(draft)};
}

std::vector<Problem> FilterResult::discarded() const {
    std::vector<Problem> out;
    for (const auto& d : decisions)
        if (!d.kept) out.push_back(d.problem);
    return out;
}

FilterResult filter_generated(Strategy& strategy, const std::vector<Problem>& problems, const Tolerance& tolerance) {
    FilterResult result;
    for (const auto& p : problems) {
        FilterDecision d;
        d.problem = p;
        d.trace = strategy.solve(p);
        if (d.trace.transport_error) {
            d.reason = *d.trace.transport_error;
        } else if (!d.trace.final_answers || d.trace.final_answers->empty()) {
            d.reason = "no answer";
        } else if (is_correct(d.trace, p, tolerance)) {
            d.kept = true;
            d.reason = "correct";
            result.kept.push_back(p);
        } else {
            d.reason = "wrong answer";
        }
        result.decisions.push_back(std::move(d));
    }
    return result;
}

}  // namespace mwp
