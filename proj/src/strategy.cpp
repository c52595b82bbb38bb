#include "mwp/strategy.hpp"

namespace mwp {

using nlohmann::json;

json generation_json(const GenerationConfig& g) {
    return {{"model_id", g.model_id},
            {"system_prompt", g.system_prompt},
            {"temperature", g.temperature},
            {"max_tokens", g.max_tokens}};
}

SolveTrace FormulateSolveStrategy::solve(const Problem& problem) { return solve_problem(*backend_, config_, problem); }

json FormulateSolveStrategy::settings() const {
    json demos = json::array();
    for (const auto& d : config_.demos.demos) demos.push_back({{"question", d.question}, {"worked_solution", d.worked_solution}});
    return {{"strategy", name()},
            {"generation", generation_json(config_.generation)},
            {"instruction", config_.instruction.rendered()},
            {"demos", std::move(demos)},
            {"prompts", config_.prompts.all()},
            {"extraction", config_.extraction == ExtractionMode::Strict ? "strict" : "lenient"},
            {"use_instruction", config_.use_instruction},
            {"use_demos", config_.use_demos},
            {"use_solver", config_.use_solver}};
}

SolveTrace ZeroShotCotStrategy::solve(const Problem& problem) {
    SolveTrace trace;
    trace.problem_id = problem.id;
    trace.strategy = name();
    trace.prompt = prompts_.render("zero_shot_cot", {{"question", problem.question}});
    try {
        trace.raw_response = complete(*backend_, ChatRequest::user(generation_, trace.prompt)).text;
        trace.finalization_context = FinalizationContext::RawResponse;
        trace.finalization_prompt =
            prompts_.render("zero_shot_cot_answer", {{"question", problem.question}, {"reasoning", trace.raw_response}});
        trace.finalization_response = complete(*backend_, ChatRequest::user(generation_, trace.finalization_prompt)).text;
        trace.final_answers = final_answer_values(trace.finalization_response);
    } catch (const TransportError& e) {
        trace.transport_error = std::string("TransportError: ") + e.what();
    } catch (const AuthError& e) {
        trace.transport_error = std::string("AuthError: ") + e.what();
    } catch (const MissingFixture& e) {
        trace.transport_error = std::string("MissingFixture: ") + e.what();
    }
    if (trace.transport_error) trace.final_answers.reset();
    return trace;
}

json ZeroShotCotStrategy::settings() const {
    return {{"strategy", name()}, {"generation", generation_json(generation_)}, {"prompts", prompts_.all()}};
}

bool is_correct(const SolveTrace& trace, const Problem& problem, const Tolerance& tolerance) {
    return trace.final_answers && match_answers(*trace.final_answers, problem.gold_answers, tolerance);
}

}  // namespace mwp
