#pragma once

// Scripted model behaviour behind the bundled fixture files.  make_fixtures
// runs these scripts through a RecordBackend; the tests replay the result.

#include <filesystem>
#include <string>
#include <vector>

#include "mwp/expander.hpp"
#include "mwp/formulate.hpp"

namespace mwp::testing {

struct SolveCase {
    Problem problem;
    std::string response;      // formulation reply
    std::string finalization;  // finalization reply
    std::string expected;      // "Correct", "E1", "E2" or "E3"
};

// Thirteen problems: nine answered correctly, one E1, two E2, one E3.
std::vector<SolveCase> solve_cases();

// Two worked demonstrations in the five-step format.
DemoSet bundled_demos();

// Two-unknown alloy seed expanded to three, then four unknowns.
Problem alloy_seed();

// Model replies for the expansion chain; the first step-3 reply of round
// one is rejected by the verifier.
std::string expansion_responder(const std::string& prompt);

// Demo generation: four seed questions (one yields an unusable reply) and
// two dev problems answered correctly only when the first seed question is
// among the demonstrations.
std::vector<std::string> demo_seed_questions();
std::vector<Problem> demo_dev_problems();
std::string demo_generation_responder(const std::string& prompt);

// Writes every bundled data file into `dir`:
//   solve_dataset.jsonl, solve_fixtures.jsonl, demos.jsonl,
//   expand_seed.jsonl, expand_fixtures.jsonl,
//   demo_seeds.txt, demo_dev.jsonl, demo_fixtures.jsonl
void write_bundled_data(const std::filesystem::path& dir);

std::vector<std::string> bundled_file_names();

}  // namespace mwp::testing
