#include "mwp/formulate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <regex>

#include "mwp/parser.hpp"

namespace mwp {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Instruction and demos

Instruction Instruction::defaults(const PromptLibrary& prompts) {
    return from_text(prompts.get("solver_instruction"));
}

Instruction Instruction::from_text(std::string_view text) {
    Instruction ins;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        line.erase(0, line.find_first_not_of(" \t"));
        if (!line.empty()) ins.steps.push_back(std::move(line));
        start = end + 1;
    }
    return ins;
}

std::string Instruction::rendered() const {
    std::string out;
    for (const auto& s : steps) {
        if (!out.empty()) out += '\n';
        out += s;
    }
    return out;
}

void write_demo_set(const std::filesystem::path& path, const DemoSet& set) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& d : set.demos)
        out << json{{"question", d.question}, {"worked_solution", d.worked_solution}}.dump() << '\n';
}

DemoSet read_demo_set(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open demo file " + path.string());
    DemoSet set;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            set.demos.push_back({j.at("question").get<std::string>(), j.at("worked_solution").get<std::string>()});
        } catch (const json::exception& e) {
            throw FormatError(number, e.what());
        }
    }
    return set;
}

std::string build_prompt(const Instruction& instruction, const DemoSet& demos, std::string_view question) {
    std::string out;
    auto section = [&out](std::string_view text) {
        if (!out.empty()) out += "\n\n";
        out += text;
    };
    if (!instruction.empty()) section(instruction.rendered());
    for (const auto& d : demos.demos) section("Question: " + d.question + "\n" + d.worked_solution);
    section("Question: " + std::string(question));
    return out;
}

// ---------------------------------------------------------------------------
// Equation extraction

ExtractionError::ExtractionError(Kind kind, std::string detail)
    : Error(std::string("extraction failed (") + mwp::to_string(kind) + ")" + (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      detail_(std::move(detail)) {}

const char* to_string(ExtractionError::Kind kind) {
    return kind == ExtractionError::Kind::NoMarker ? "NoMarker" : "NoParsableEquations";
}

namespace {

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

const std::regex& strict_marker() {
    static const std::regex re(R"(^\s*\d+\s*-\s*system of equations\s*:(.*)$)", std::regex::icase);
    return re;
}

const std::regex& lenient_marker() {
    static const std::regex re(R"(system of equations[^:]*:?(.*)$)", std::regex::icase);
    return re;
}

// "- ", "* ", "1. ", "1) ", "1- ", "Equation 2:" and similar prefixes.
std::string strip_list_marker(std::string line) {
    static const std::regex marker(R"(^\s*(?:[-*•]\s+|\d+[.)]\s+|\d+-\s+|\(\d+\)\s+|equation\s*\d*\s*:\s*))",
                                   std::regex::icase);
    for (;;) {
        std::smatch m;
        if (!std::regex_search(line, m, marker) || m.length(0) == 0) break;
        line = line.substr(static_cast<std::size_t>(m.length(0)));
    }
    line = trim(line);
    while (!line.empty() && (line.back() == '.' || line.back() == ',' || line.back() == ';')) line.pop_back();
    return trim(line);
}

// A trailing "(total capacity)"-style annotation: parenthesized prose with
// at least two consecutive words.
std::optional<std::string> strip_annotation(const std::string& line) {
    static const std::regex annotation(R"(^(.*?)\s*\(([^()]*[A-Za-z]{2,}\s+[A-Za-z]+[^()]*)\)\s*$)");
    std::smatch m;
    if (std::regex_match(line, m, annotation)) return trim(m[1].str());
    return std::nullopt;
}

std::optional<Equation> parse_line(const std::string& raw, std::string& first_error) {
    std::string line = strip_list_marker(raw);
    std::vector<std::string> attempts{line};
    if (auto s = strip_annotation(line)) attempts.push_back(*s);
    // "Total cost: 4a + 2b = 10"
    if (auto colon = line.find(':'); colon != std::string::npos && line.substr(0, colon).find('=') == std::string::npos)
        attempts.push_back(trim(line.substr(colon + 1)));
    for (const auto& text : attempts) {
        try {
            return parse_equation(text);
        } catch (const SyntaxError& e) {
            if (first_error.empty()) first_error = "'" + trim(raw) + "': " + e.what();
        }
    }
    return std::nullopt;
}

}  // namespace

EquationSystem extract_equations(std::string_view response, ExtractionMode mode) {
    const auto lines = split_lines(response);
    const std::regex& marker = mode == ExtractionMode::Strict ? strict_marker() : lenient_marker();

    std::optional<std::size_t> marker_line;
    std::string same_line_rest;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        if (std::regex_search(lines[i], m, marker)) {
            marker_line = i;
            same_line_rest = m[1].str();
        }
    }
    if (!marker_line) throw ExtractionError(ExtractionError::Kind::NoMarker, "");

    std::vector<Equation> equations;
    std::string first_error;
    if (same_line_rest.find('=') != std::string::npos)
        if (auto eq = parse_line(same_line_rest, first_error)) equations.push_back(std::move(*eq));

    for (std::size_t i = *marker_line + 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (is_blank(line)) continue;  // a blank line only ends the block if prose follows
        if (line.find('=') == std::string::npos) break;
        if (auto eq = parse_line(line, first_error)) equations.push_back(std::move(*eq));
    }
    if (equations.empty()) throw ExtractionError(ExtractionError::Kind::NoParsableEquations, first_error);
    return EquationSystem(std::move(equations));
}

// ---------------------------------------------------------------------------
// Numbers in free text

std::vector<Rational> extract_numeric_answers(std::string_view text) {
    auto digit = [&](std::size_t i) { return i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); };
    auto word_char = [&](std::size_t i) {
        return std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' || text[i] == '.';
    };

    std::vector<Rational> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const bool starts_here = digit(i) && (i == 0 || !word_char(i - 1));
        const bool signed_here = text[i] == '-' && digit(i + 1) &&
                                 (i == 0 || !(std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == ')'));
        if (!starts_here && !signed_here) {
            ++i;
            continue;
        }
        std::string literal;
        if (signed_here) {
            literal += '-';
            ++i;
        }
        const std::size_t int_start = i;
        while (digit(i)) literal += text[i++];
        // Thousands groups: ",ddd" not followed by another digit.
        if (i - int_start <= 3) {
            while (i < text.size() && text[i] == ',' && digit(i + 1) && digit(i + 2) && digit(i + 3) &&
                   !digit(i + 4)) {
                literal.append(text.substr(i + 1, 3));
                i += 4;
            }
        }
        if (i < text.size() && text[i] == '.' && digit(i + 1)) {
            literal += text[i++];
            while (digit(i)) literal += text[i++];
        }
        if (auto r = Rational::parse(literal)) out.push_back(*r);
    }
    return out;
}

std::vector<Rational> final_answer_values(std::string_view text) {
    static const std::regex answer_line(R"(answer\s*:)", std::regex::icase);
    std::optional<std::string> last;
    for (const auto& line : split_lines(text)) {
        std::smatch m;
        if (std::regex_search(line, m, answer_line)) last = m.suffix().str();
    }
    return extract_numeric_answers(last ? std::string_view(*last) : text);
}

// ---------------------------------------------------------------------------
// Pipeline

const char* to_string(FinalizationContext context) {
    switch (context) {
        case FinalizationContext::WithSolution: return "with_solution";
        case FinalizationContext::EquationsOnly: return "equations_only";
        case FinalizationContext::RawResponse: return "raw_response";
    }
    return "?";
}

std::string render_solution(const EquationSystem& system, const Bindings& assignment) {
    std::string out;
    for (const auto& v : system.variables()) {
        auto it = assignment.find(v);
        if (it == assignment.end()) continue;
        if (!out.empty()) out += '\n';
        out += v + " = " + it->second.to_string();
    }
    return out;
}

namespace {

std::string finalization_prompt(const FormulateSolveConfig& config, std::string_view question,
                                std::string_view equations_text, const std::optional<std::string>& solution_text) {
    TemplateVars vars{{"question", std::string(question)}, {"equations", std::string(equations_text)}};
    if (!solution_text) return config.prompts.render("finalize_equations_only", vars);
    vars["solution"] = *solution_text;
    return config.prompts.render("finalize_with_solution", vars);
}

}  // namespace

std::string finalize_answer(Backend& backend, const FormulateSolveConfig& config, std::string_view question,
                            std::string_view equations_text, const std::optional<std::string>& solution_text) {
    const std::string prompt = finalization_prompt(config, question, equations_text, solution_text);
    return complete(backend, ChatRequest::user(config.generation, prompt)).text;
}

namespace {

json outcome_to_json(const SolveOutcome& outcome, const std::vector<std::string>& order) {
    if (const auto* u = std::get_if<Unique>(&outcome)) {
        json assignment = json::object();
        for (const auto& v : order)
            if (auto it = u->assignment.find(v); it != u->assignment.end()) assignment[v] = it->second.to_string();
        return {{"kind", "unique"}, {"assignment", assignment}};
    }
    if (const auto* ud = std::get_if<Underdetermined>(&outcome)) return {{"kind", "underdetermined"}, {"rank", ud->rank}};
    if (std::holds_alternative<Inconsistent>(outcome)) return {{"kind", "inconsistent"}};
    const auto& nl = std::get<Nonlinear>(outcome);
    return {{"kind", "nonlinear"}, {"equation_index", nl.equation_index}, {"detail", nl.detail}};
}

}  // namespace

json trace_to_json(const SolveTrace& t) {
    json j{{"problem_id", t.problem_id}, {"strategy", t.strategy}, {"prompt", t.prompt}, {"raw_response", t.raw_response}};
    switch (t.extraction) {
        case SolveTrace::Extraction::NotAttempted:
            j["extraction"] = "not_attempted";
            break;
        case SolveTrace::Extraction::Extracted:
            j["extraction"] = "extracted";
            j["equations"] = t.extracted->rendered_lines();
            break;
        case SolveTrace::Extraction::Failed:
            j["extraction"] = "failed";
            j["extraction_error"] = t.extraction_error;
            break;
    }
    if (t.outcome) j["outcome"] = outcome_to_json(*t.outcome, t.extracted ? t.extracted->variables() : std::vector<std::string>{});
    if (t.finalization_context) {
        j["finalization"] = {{"context", to_string(*t.finalization_context)},
                             {"prompt", t.finalization_prompt},
                             {"response", t.finalization_response}};
    }
    if (t.final_answers) {
        json answers = json::array();
        for (const auto& a : *t.final_answers) answers.push_back(a.to_string());
        j["final_answers"] = std::move(answers);
    } else {
        j["final_answers"] = nullptr;
    }
    if (t.transport_error) j["transport_error"] = *t.transport_error;
    return j;
}

SolveTrace solve_problem(Backend& backend, const FormulateSolveConfig& config, const Problem& problem) {
    SolveTrace trace;
    trace.problem_id = problem.id;
    trace.strategy = "formulate-solve";
    const Instruction none;
    const DemoSet no_demos;
    trace.prompt = build_prompt(config.use_instruction ? config.instruction : none,
                                config.use_demos ? config.demos : no_demos, problem.question);
    try {
        trace.raw_response = complete(backend, ChatRequest::user(config.generation, trace.prompt)).text;
        try {
            trace.extracted = extract_equations(trace.raw_response, config.extraction);
            trace.extraction = SolveTrace::Extraction::Extracted;
        } catch (const ExtractionError& e) {
            trace.extraction = SolveTrace::Extraction::Failed;
            trace.extraction_error = e.what();
        }

        if (trace.extracted) {
            const EquationSystem& system = *trace.extracted;
            trace.outcome = solve_system(system);
            const bool solved = config.use_solver && is_unique(*trace.outcome);
            std::optional<std::string> solution;
            if (solved) solution = render_solution(system, std::get<Unique>(*trace.outcome).assignment);
            trace.finalization_context = solved ? FinalizationContext::WithSolution : FinalizationContext::EquationsOnly;
            trace.finalization_prompt = finalization_prompt(config, problem.question, system.render(), solution);
            trace.finalization_response =
                complete(backend, ChatRequest::user(config.generation, trace.finalization_prompt)).text;
            if (solved) {
                // The exact solution is authoritative when there is one.
                const auto& assignment = std::get<Unique>(*trace.outcome).assignment;
                std::vector<Rational> values;
                for (const auto& v : system.variables()) values.push_back(assignment.at(v));
                trace.final_answers = std::move(values);
            } else {
                trace.final_answers = final_answer_values(trace.finalization_response);
            }
        } else {
            trace.finalization_context = FinalizationContext::RawResponse;
            trace.finalization_prompt =
                config.prompts.render("finalize_raw_response", {{"prompt", trace.prompt}, {"response", trace.raw_response}});
            trace.finalization_response =
                complete(backend, ChatRequest::user(config.generation, trace.finalization_prompt)).text;
            trace.final_answers = final_answer_values(trace.finalization_response);
        }
    } catch (const TransportError& e) {
        trace.transport_error = std::string("TransportError: ") + e.what();
        trace.final_answers.reset();
    } catch (const AuthError& e) {
        trace.transport_error = std::string("AuthError: ") + e.what();
        trace.final_answers.reset();
    } catch (const MissingFixture& e) {
        trace.transport_error = std::string("MissingFixture: ") + e.what();
        trace.final_answers.reset();
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Automatic demonstrations

DemoSet generate_demo_set(Backend& backend, const FormulateSolveConfig& config,
                          const std::vector<std::string>& seed_questions, std::size_t k) {
    if (seed_questions.size() < k)
        throw PreconditionError("need at least " + std::to_string(k) + " seed questions, got " +
                                std::to_string(seed_questions.size()));
    DemoSet set;
    for (const auto& question : seed_questions) {
        if (set.demos.size() == k) break;
        const std::string prompt = build_prompt(config.instruction, set, question);
        const std::string solution = complete(backend, ChatRequest::user(config.generation, prompt)).text;
        try {
            if (!is_unique(solve_system(extract_equations(solution, ExtractionMode::Strict)))) continue;
        } catch (const ExtractionError&) {
            continue;
        }
        set.demos.push_back({question, solution});
    }
    if (set.demos.size() < k)
        throw DemoGenerationExhausted("only " + std::to_string(set.demos.size()) + " of " + std::to_string(k) +
                                      " demos passed the filter before the seed questions ran out");
    return set;
}

std::vector<DemoSet> generate_candidate_sets(Backend& backend, const FormulateSolveConfig& config,
                                             const std::vector<std::string>& seed_questions, std::size_t k,
                                             std::size_t count, unsigned seed) {
    std::vector<DemoSet> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<std::string> order = seed_questions;
        if (i > 0) {
            std::mt19937 rng(seed + static_cast<unsigned>(i));
            std::shuffle(order.begin(), order.end(), rng);
        }
        try {
            DemoSet set = generate_demo_set(backend, config, order, k);
            set.candidate_index = static_cast<int>(i);
            out.push_back(std::move(set));
        } catch (const DemoGenerationExhausted&) {
        }
    }
    if (out.empty()) throw DemoGenerationExhausted("no candidate demo set could be completed");
    return out;
}

DemoSet select_best_demo_set(std::vector<DemoSet> candidates, const std::vector<Problem>& dev_problems,
                             const DevRunner& runner) {
    if (candidates.empty()) throw PreconditionError("no candidate demo sets");
    if (dev_problems.empty()) throw PreconditionError("no dev problems");
    std::size_t best = 0;
    std::size_t best_correct = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        std::size_t correct = 0;
        for (const auto& p : dev_problems)
            if (runner(candidates[i], p)) ++correct;
        candidates[i].dev_accuracy = static_cast<double>(correct) / static_cast<double>(dev_problems.size());
        const bool better = correct > best_correct ||
                            (correct == best_correct && candidates[i].candidate_index < candidates[best].candidate_index);
        if (i == 0 || better) {
            best = i;
            best_correct = correct;
        }
    }
    return candidates[best];
}

}  // namespace mwp
