#pragma once

// Dataset loading, the evaluation runner, the E1/E2/E3 error taxonomy and
// report rendering.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mwp/strategy.hpp"

namespace mwp {

// Reads a JSON-lines problem file.  Throws FormatError(line) for an
// unreadable line, GoldInconsistency for a problem whose gold data do not
// agree, and FormatError for a repeated id.
std::vector<Problem> load_dataset(const std::filesystem::path& path, const Tolerance& tolerance = {});

enum class ErrorCategory { Correct, E1, E2, E3, Transport };

const char* to_string(ErrorCategory category);

// Transport failure -> Transport; failed extraction -> E3; extracted
// equation count != unknowns -> E1; answers not matching -> E2; else
// Correct.  Strategies that never extract skip the E3 and E1 tests.
ErrorCategory classify_error(const SolveTrace& trace, const Problem& problem, const Tolerance& tolerance = {});

struct Bucket {
    int n = 0;
    int correct = 0;
    int e1 = 0;
    int e2 = 0;
    int e3 = 0;
    int transport = 0;

    double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / n; }
    void add(ErrorCategory category);

    friend bool operator==(const Bucket&, const Bucket&) = default;
};

struct EvalResult {
    Problem problem;
    SolveTrace trace;
    ErrorCategory category = ErrorCategory::Correct;
};

struct EvalReport {
    std::map<int, Bucket> per_bucket;  // keyed by unknown count
    std::string traces_path;
    std::string config_digest;
    std::vector<EvalResult> results;  // sorted by problem id

    Bucket totals() const;
    // Mean of the bucket accuracies.
    double macro_accuracy() const;
};

// Runs `strategy` on every problem with at most `parallelism` workers and
// folds the id-sorted results into a report.
EvalReport run_eval(Strategy& strategy, const std::vector<Problem>& problems, int parallelism,
                    const Tolerance& tolerance = {});

// One trace per line, in the report's id order.
void write_traces(const std::filesystem::path& path, const EvalReport& report);

enum class ReportFormat { Markdown, Csv, Json };

ReportFormat report_format_from_string(const std::string& s);
std::string render_report(const EvalReport& report, ReportFormat format);

}  // namespace mwp
