#pragma once

// Formulate-and-Solve: the model translates a word problem into a system
// of equations following a fixed five-step instruction and a handful of
// self-generated demonstrations; the system is solved exactly, and a final
// completion states the answer.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mwp/gateway.hpp"
#include "mwp/problem.hpp"
#include "mwp/prompts.hpp"
#include "mwp/solver.hpp"

namespace mwp {

struct Instruction {
    std::vector<std::string> steps;

    // The five-step solver instruction shipped in prompts/solver_instruction.txt.
    static Instruction defaults(const PromptLibrary& prompts = PromptLibrary::defaults());
    // One step per nonblank line.
    static Instruction from_text(std::string_view text);

    bool empty() const { return steps.empty(); }
    std::string rendered() const;
};

struct Demo {
    std::string question;
    std::string worked_solution;

    friend bool operator==(const Demo&, const Demo&) = default;
};

struct DemoSet {
    std::vector<Demo> demos;
    double dev_accuracy = 0.0;
    int candidate_index = 0;
};

// Each demo on its own JSON line: {"question", "worked_solution"}.
void write_demo_set(const std::filesystem::path& path, const DemoSet& set);
DemoSet read_demo_set(const std::filesystem::path& path);

// Instruction, then "Question: ...\n<worked solution>" per demo, then
// "Question: <question>", separated by blank lines.  An empty instruction
// is omitted.
std::string build_prompt(const Instruction& instruction, const DemoSet& demos, std::string_view question);

enum class ExtractionMode { Strict, Lenient };

class ExtractionError : public Error {
public:
    enum class Kind { NoMarker, NoParsableEquations };
    ExtractionError(Kind kind, std::string detail);
    Kind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }

private:
    Kind kind_;
    std::string detail_;
};

const char* to_string(ExtractionError::Kind kind);

// Strict mode anchors on the last "<digit>- System of equations:" line;
// lenient mode on the last line mentioning "system of equations" in any
// case.  Following lines that contain '=' are parsed (list markers and
// trailing prose annotations stripped) until prose or a blank line
// followed by prose.  Lines that fail to parse are skipped.
EquationSystem extract_equations(std::string_view response, ExtractionMode mode = ExtractionMode::Strict);

// Every integer or decimal literal in order of appearance: thousands
// separators are folded ("18,200" -> 18200), currency and percent signs
// ignored, a '-' directly before a digit kept as a sign.
std::vector<Rational> extract_numeric_answers(std::string_view text);

// The numbers of the last line containing "Answer:" (after the marker),
// or every number in the text when no such line exists.
std::vector<Rational> final_answer_values(std::string_view text);

enum class FinalizationContext { WithSolution, EquationsOnly, RawResponse };
const char* to_string(FinalizationContext context);

struct SolveTrace {
    enum class Extraction { NotAttempted, Extracted, Failed };

    std::string problem_id;
    std::string strategy;
    std::string prompt;
    std::string raw_response;
    Extraction extraction = Extraction::NotAttempted;
    std::optional<EquationSystem> extracted;
    std::string extraction_error;
    std::optional<SolveOutcome> outcome;
    std::optional<FinalizationContext> finalization_context;
    std::string finalization_prompt;
    std::string finalization_response;
    std::optional<std::vector<Rational>> final_answers;
    std::optional<std::string> transport_error;
};

nlohmann::json trace_to_json(const SolveTrace& trace);

struct FormulateSolveConfig {
    GenerationConfig generation;
    PromptLibrary prompts = PromptLibrary::defaults();
    Instruction instruction = Instruction::defaults();
    DemoSet demos;
    ExtractionMode extraction = ExtractionMode::Strict;
    // Ablation switches.
    bool use_instruction = true;
    bool use_demos = true;
    bool use_solver = true;
};

// One completion stating the final answers given the question, the
// extracted equations and, when available, the solver's solution.
std::string finalize_answer(Backend& backend, const FormulateSolveConfig& config, std::string_view question,
                            std::string_view equations_text, const std::optional<std::string>& solution_text);

// Runs the whole pipeline for one problem.  Backend failures are recorded
// in the trace (final_answers stays empty) rather than thrown.
SolveTrace solve_problem(Backend& backend, const FormulateSolveConfig& config, const Problem& problem);

// "x = 2" lines in variable order.
std::string render_solution(const EquationSystem& system, const Bindings& assignment);

class DemoGenerationExhausted : public Error {
public:
    using Error::Error;
};

// Asks the model for a worked solution to each seed question in turn,
// with the demos accepted so far in the prompt.  A generation is kept only
// if its equations extract and solve uniquely.
DemoSet generate_demo_set(Backend& backend, const FormulateSolveConfig& config,
                          const std::vector<std::string>& seed_questions, std::size_t k);

// `count` candidate sets; candidate i draws seeds in a shuffled order
// derived from `seed + i` (candidate 0 keeps the given order).  Candidates
// that run out of seeds are dropped.
std::vector<DemoSet> generate_candidate_sets(Backend& backend, const FormulateSolveConfig& config,
                                             const std::vector<std::string>& seed_questions, std::size_t k,
                                             std::size_t count, unsigned seed);

// Whether `problem` is answered correctly when solved with `demos`.
using DevRunner = std::function<bool(const DemoSet& demos, const Problem& problem)>;

// Measures every candidate on the dev problems and returns the most
// accurate one; ties go to the lowest candidate_index.
DemoSet select_best_demo_set(std::vector<DemoSet> candidates, const std::vector<Problem>& dev_problems,
                             const DevRunner& runner);

}  // namespace mwp
