#pragma once

// A solving strategy turns one problem into a SolveTrace.  The evaluation
// runner and the generation filter are written against this interface.

#include <memory>
#include <string>

#include <json.hpp>

#include "mwp/formulate.hpp"

namespace mwp {

class Strategy {
public:
    virtual ~Strategy() = default;
    // Must be safe to call concurrently for distinct problems.
    virtual SolveTrace solve(const Problem& problem) = 0;
    virtual std::string name() const = 0;
    // Settings that determine the outcome; hashed into report digests.
    virtual nlohmann::json settings() const = 0;
};

class FormulateSolveStrategy : public Strategy {
public:
    FormulateSolveStrategy(std::shared_ptr<Backend> backend, FormulateSolveConfig config)
        : backend_(std::move(backend)), config_(std::move(config)) {}

    SolveTrace solve(const Problem& problem) override;
    std::string name() const override { return "formulate-solve"; }
    nlohmann::json settings() const override;

    const FormulateSolveConfig& config() const { return config_; }

private:
    std::shared_ptr<Backend> backend_;
    FormulateSolveConfig config_;
};

// Appends "Let's think step by step" to the question, then asks a second
// time for the answer given the reasoning.
class ZeroShotCotStrategy : public Strategy {
public:
    ZeroShotCotStrategy(std::shared_ptr<Backend> backend, GenerationConfig generation,
                        PromptLibrary prompts = PromptLibrary::defaults())
        : backend_(std::move(backend)), generation_(std::move(generation)), prompts_(std::move(prompts)) {}

    SolveTrace solve(const Problem& problem) override;
    std::string name() const override { return "zero-shot-cot"; }
    nlohmann::json settings() const override;

private:
    std::shared_ptr<Backend> backend_;
    GenerationConfig generation_;
    PromptLibrary prompts_;
};

// Final answers present and matching the gold answers as a multiset.
bool is_correct(const SolveTrace& trace, const Problem& problem, const Tolerance& tolerance);

nlohmann::json generation_json(const GenerationConfig& generation);

}  // namespace mwp
