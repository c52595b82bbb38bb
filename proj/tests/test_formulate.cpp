#include <doctest.h>

#include <random>

#include "mwp/formulate.hpp"
#include "mwp/parser.hpp"
#include "mwp/strategy.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace mwp;
using testing::QueueBackend;
using testing::ScriptedBackend;

namespace {

std::string transcript(const std::string& name) {
    return testing::read_text(testing::data_dir() / "transcripts" / (name + ".response.txt"));
}

std::vector<Rational> values(std::initializer_list<long> xs) {
    std::vector<Rational> out;
    for (long x : xs) out.push_back(Rational(x));
    return out;
}

Problem two_unknowns() {
    Problem p;
    p.id = "q";
    p.question = "The sum of two numbers is 3 and their difference is 1. Find them.";
    p.gold_system = parse_system("x + y = 3; x - y = 1");
    p.gold_answers = values({2, 1});
    p.answer_variables = {"x", "y"};
    p.unknowns = 2;
    return p;
}

const char* kFormulated = "1- The question asks for two numbers.\n2- Relevant information:\n   - sum 3\n"
                          "3- Assign symbols:\n   Let x = first\n   Let y = second\n4- Relations\n"
                          "5- System of equations:\n   x + y = 3\n   x - y = 1";

}  // namespace

TEST_CASE("default instruction has the five human-solving steps") {
    const Instruction ins = Instruction::defaults();
    REQUIRE(ins.steps.size() == 5);
    CHECK(ins.steps[0] == "1. Determine what the question is asking.");
    CHECK(ins.steps[2] ==
          "3. Assign symbols (must be an alphabetic character e.g., x, y, z etc.) to unknown values that must be found.");
    CHECK(ins.steps[4] == "5. Give the equations only here, with each equation on a new line.");
    CHECK(Instruction::from_text("a\n\n b \n").steps == std::vector<std::string>{"a", "b"});
}

TEST_CASE("prompt layout: instruction, demos, question") {
    DemoSet demos;
    demos.demos.push_back({"Q1?", "S1"});
    demos.demos.push_back({"Q2?", "S2"});
    const Instruction ins = Instruction::from_text("step one\nstep two");
    CHECK(build_prompt(ins, demos, "Target?") == "step one\nstep two\n\nQuestion: Q1?\nS1\n\nQuestion: Q2?\nS2\n\nQuestion: Target?");
    CHECK(build_prompt(Instruction{}, DemoSet{}, "Target?") == "Question: Target?");
}

TEST_CASE("demo sets round-trip through JSON lines") {
    const auto dir = testing::scratch_dir("demos");
    const DemoSet set = testing::bundled_demos();
    write_demo_set(dir / "d.jsonl", set);
    CHECK(read_demo_set(dir / "d.jsonl").demos == set.demos);
}

TEST_CASE("strict extraction on worked transcripts") {
    const EquationSystem three = extract_equations(transcript("alcohol_three"));
    CHECK(three.size() == 3);
    CHECK(three.variables().size() == 3);
    CHECK(three.render() == "a + b + c = 100\n0.18 * a + 0.5 * b + 0.1 * c = 26\na + b = 4 * c");

    const EquationSystem four = extract_equations(transcript("hcl_four"));
    CHECK(four.size() == 4);
    CHECK(four.variables() == std::vector<std::string>{"x", "y", "z", "w"});

    const EquationSystem five = extract_equations(transcript("alcohol_five"));
    CHECK(five.size() == 5);
    CHECK(five.variables().size() == 5);

    CHECK(extract_equations(transcript("coaster_e1")).size() == 2);
    const EquationSystem e2 = extract_equations(transcript("mileage_e2"));
    CHECK(e2.size() == 3);
    CHECK(std::holds_alternative<Nonlinear>(solve_system(e2)));

    try {
        extract_equations(transcript("drama_e3"));
        FAIL("expected ExtractionError");
    } catch (const ExtractionError& e) {
        CHECK(e.kind() == ExtractionError::Kind::NoMarker);
    }
    CHECK(extract_equations(transcript("drama_e3"), ExtractionMode::Lenient).size() == 3);
}

TEST_CASE("extraction details") {
    // The last marker wins.
    CHECK(extract_equations("3- System of equations:\nx = 1\n\n5- System of equations:\ny = 2").render() == "y = 2");
    // Equations on the marker line, list markers, annotations and labels.
    CHECK(extract_equations("5- System of equations: x + y = 3\n  - x - y = 1 (difference of the two)\n"
                            "  2) Total cost: 2x = 4.")
              .render() == "x + y = 3\nx - y = 1\n2 * x = 4");
    // Prose ends the block; blank lines inside it do not.
    CHECK(extract_equations("5- System of equations:\nx = 1\n\ny = 2\nSo the answer follows.\nz = 3").size() == 2);
    // Unparsable lines are skipped.
    CHECK(extract_equations("5- System of equations:\nx^2 = 4\nx = 2").render() == "x = 2");
    try {
        extract_equations("5- System of equations:\nx^2 = 4");
        FAIL("expected ExtractionError");
    } catch (const ExtractionError& e) {
        CHECK(e.kind() == ExtractionError::Kind::NoParsableEquations);
    }
    CHECK_THROWS_AS(extract_equations("5- System of equations:\nnothing here"), ExtractionError);
    CHECK_THROWS_AS(extract_equations("System of equations:\nx = 1"), ExtractionError);
    CHECK(extract_equations("system OF Equations\nx = 1", ExtractionMode::Lenient).size() == 1);
}

TEST_CASE("numbers in free text") {
    CHECK(extract_numeric_answers("1,200 adults, 300 students and $18,200.50 collected") ==
          std::vector<Rational>{Rational(1200), Rational(300), *Rational::parse("18200.5")});
    CHECK(extract_numeric_answers("a 27.5% solution; -3 and 4-passenger cars") ==
          std::vector<Rational>{*Rational::parse("27.5"), Rational(-3), Rational(4)});
    CHECK(extract_numeric_answers("x1 and 7, 8").size() == 2);
    CHECK(extract_numeric_answers("no digits").empty());
    CHECK(final_answer_values("Working: 3 + 4 = 7\nAnswer: 50, 25, 35") == values({50, 25, 35}));
    CHECK(final_answer_values("The answer is 12 and 13") == values({12, 13}));
    CHECK(final_answer_values("Answer: 1\nrevised\nanswer: 2, 3") == values({2, 3}));
}

TEST_CASE("solve_problem: unique systems are finalized with the solution") {
    QueueBackend backend({kFormulated, "The numbers are 2 and 1.\nAnswer: 2, 1"});
    FormulateSolveConfig config;
    const SolveTrace t = solve_problem(backend, config, two_unknowns());
    CHECK(t.extraction == SolveTrace::Extraction::Extracted);
    REQUIRE(t.outcome);
    CHECK(is_unique(*t.outcome));
    CHECK(t.finalization_context == FinalizationContext::WithSolution);
    CHECK(t.finalization_prompt.find("Solution from a symbolic solver:\nx = 2\ny = 1") != std::string::npos);
    CHECK(*t.final_answers == values({2, 1}));
    CHECK(backend.prompts()[0].rfind(Instruction::defaults().rendered(), 0) == 0);
    CHECK(is_correct(t, two_unknowns(), Tolerance{}));
}

TEST_CASE("solve_problem: unsolvable systems fall back to the model's own answer") {
    QueueBackend backend({"5- System of equations:\nx + y = 3\nx * y = 2", "Answer: 2, 1"});
    const SolveTrace t = solve_problem(backend, FormulateSolveConfig{}, two_unknowns());
    CHECK(t.finalization_context == FinalizationContext::EquationsOnly);
    CHECK(t.finalization_prompt.find("Solution from a symbolic solver") == std::string::npos);
    CHECK(*t.final_answers == values({2, 1}));
}

TEST_CASE("solve_problem: unextractable responses finalize from the raw exchange") {
    QueueBackend backend({"x is 2 and y is 1", "Answer: 2, 1"});
    const SolveTrace t = solve_problem(backend, FormulateSolveConfig{}, two_unknowns());
    CHECK(t.extraction == SolveTrace::Extraction::Failed);
    CHECK(t.finalization_context == FinalizationContext::RawResponse);
    CHECK(t.finalization_prompt.rfind(t.prompt + "\nx is 2 and y is 1", 0) == 0);
    CHECK(*t.final_answers == values({2, 1}));
}

TEST_CASE("solve_problem: transport failures are recorded, not thrown") {
    QueueBackend backend({kFormulated});
    const SolveTrace t = solve_problem(backend, FormulateSolveConfig{}, two_unknowns());
    REQUIRE(t.transport_error);
    CHECK(t.transport_error->rfind("TransportError", 0) == 0);
    CHECK_FALSE(t.final_answers);

    ReplayBackend empty(std::make_shared<FixtureStore>());
    const SolveTrace missing = solve_problem(empty, FormulateSolveConfig{}, two_unknowns());
    REQUIRE(missing.transport_error);
    CHECK(missing.transport_error->rfind("MissingFixture", 0) == 0);
}

TEST_CASE("solve_problem: ablations") {
    FormulateSolveConfig config;
    config.demos = testing::bundled_demos();
    config.use_instruction = false;
    config.use_demos = false;
    config.use_solver = false;
    QueueBackend backend({kFormulated, "Answer: 2, 1"});
    const SolveTrace t = solve_problem(backend, config, two_unknowns());
    CHECK(t.prompt == "Question: " + two_unknowns().question);
    CHECK(t.finalization_context == FinalizationContext::EquationsOnly);

    config.use_demos = true;
    QueueBackend with_demos({kFormulated, "Answer: 2, 1"});
    const SolveTrace d = solve_problem(with_demos, config, two_unknowns());
    CHECK(d.prompt.rfind("Question: " + config.demos.demos[0].question + "\n", 0) == 0);
}

TEST_CASE("trace JSON") {
    QueueBackend backend({kFormulated, "Answer: 2, 1"});
    const auto j = trace_to_json(solve_problem(backend, FormulateSolveConfig{}, two_unknowns()));
    CHECK(j["extraction"] == "extracted");
    CHECK(j["equations"] == nlohmann::json::array({"x + y = 3", "x - y = 1"}));
    CHECK(j["outcome"]["kind"] == "unique");
    CHECK(j["outcome"]["assignment"]["x"] == "2");
    CHECK(j["finalization"]["context"] == "with_solution");
    CHECK(j["final_answers"] == nlohmann::json::array({"2", "1"}));
}

TEST_CASE("zero-shot CoT strategy") {
    auto backend = std::make_shared<QueueBackend>(std::vector<std::string>{"x + y = 3 and x - y = 1 so x = 2, y = 1.",
                                                                           "Answer: 2, 1"});
    ZeroShotCotStrategy strategy(backend, GenerationConfig{});
    const SolveTrace t = strategy.solve(two_unknowns());
    CHECK(t.prompt == "Question: " + two_unknowns().question + "\nAnswer: Let's think step by step.");
    CHECK(t.extraction == SolveTrace::Extraction::NotAttempted);
    CHECK(t.finalization_prompt.find("so x = 2, y = 1.") != std::string::npos);
    CHECK(*t.final_answers == values({2, 1}));
    CHECK(strategy.name() == "zero-shot-cot");
}

TEST_CASE("demo generation keeps only solvable worked solutions") {
    ScriptedBackend backend(testing::demo_generation_responder);
    const auto seeds = testing::demo_seed_questions();
    const DemoSet set = generate_demo_set(backend, FormulateSolveConfig{}, seeds, 2);
    REQUIRE(set.demos.size() == 2);
    CHECK(set.demos[0].question == seeds[0]);
    CHECK(set.demos[1].question == seeds[2]);  // seeds[1] has no equations
    // The second request already carries the first accepted demo.
    CHECK(backend.prompts()[1].find("Question: " + seeds[0] + "\n") != std::string::npos);

    CHECK_THROWS_AS(generate_demo_set(backend, FormulateSolveConfig{}, {seeds[0]}, 2), PreconditionError);
    CHECK_THROWS_AS(generate_demo_set(backend, FormulateSolveConfig{}, {seeds[1], seeds[0]}, 2),
                    DemoGenerationExhausted);
}

TEST_CASE("candidate sets are reproducible from the seed") {
    ScriptedBackend a(testing::demo_generation_responder), b(testing::demo_generation_responder);
    const auto seeds = testing::demo_seed_questions();
    const auto x = generate_candidate_sets(a, FormulateSolveConfig{}, seeds, 2, 4, 7);
    const auto y = generate_candidate_sets(b, FormulateSolveConfig{}, seeds, 2, 4, 7);
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(x[i].demos == y[i].demos);
        CHECK(x[i].candidate_index == y[i].candidate_index);
    }
    CHECK(x[0].candidate_index == 0);
    CHECK(x[0].demos[0].question == seeds[0]);
}

TEST_CASE("best demo set: argmax with lowest-index ties") {
    std::vector<DemoSet> sets(3);
    for (int i = 0; i < 3; ++i) sets[i].candidate_index = i;
    std::vector<Problem> dev(4);
    for (int i = 0; i < 4; ++i) dev[i].id = "d" + std::to_string(i);
    const std::vector<int> correct{2, 3, 3};
    const DemoSet best = select_best_demo_set(sets, dev, [&](const DemoSet& s, const Problem& p) {
        return (p.id[1] - '0') < correct[static_cast<std::size_t>(s.candidate_index)];
    });
    CHECK(best.candidate_index == 1);
    CHECK(best.dev_accuracy == doctest::Approx(0.75));
    CHECK_THROWS_AS(select_best_demo_set({}, dev, [](const DemoSet&, const Problem&) { return true; }), PreconditionError);
}
