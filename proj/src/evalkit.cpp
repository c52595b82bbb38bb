#include "mwp/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace mwp {

using nlohmann::json;

std::vector<Problem> load_dataset(const std::filesystem::path& path, const Tolerance& tolerance) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open dataset " + path.string());
    std::vector<Problem> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Problem p;
        try {
            p = problem_from_json(json::parse(line));
        } catch (const json::exception& e) {
            throw FormatError(number, e.what());
        } catch (const SyntaxError& e) {
            throw FormatError(number, e.what());
        } catch (const GoldInconsistency&) {
            throw;
        } catch (const Error& e) {
            throw FormatError(number, e.what());
        }
        validate_problem(p, tolerance);
        if (!ids.insert(p.id).second) throw FormatError(number, "duplicate problem id " + p.id);
        out.push_back(std::move(p));
    }
    return out;
}

const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Correct: return "Correct";
        case ErrorCategory::E1: return "E1";
        case ErrorCategory::E2: return "E2";
        case ErrorCategory::E3: return "E3";
        case ErrorCategory::Transport: return "Transport";
    }
    return "?";
}

ErrorCategory classify_error(const SolveTrace& trace, const Problem& problem, const Tolerance& tolerance) {
    if (trace.transport_error) return ErrorCategory::Transport;
    if (trace.extraction == SolveTrace::Extraction::Failed) return ErrorCategory::E3;
    if (trace.extraction == SolveTrace::Extraction::Extracted && trace.extracted &&
        trace.extracted->size() != static_cast<std::size_t>(problem.unknowns))
        return ErrorCategory::E1;
    if (!is_correct(trace, problem, tolerance)) return ErrorCategory::E2;
    return ErrorCategory::Correct;
}

void Bucket::add(ErrorCategory c) {
    ++n;
    switch (c) {
        case ErrorCategory::Correct: ++correct; break;
        case ErrorCategory::E1: ++e1; break;
        case ErrorCategory::E2: ++e2; break;
        case ErrorCategory::E3: ++e3; break;
        case ErrorCategory::Transport: ++transport; break;
    }
}

Bucket EvalReport::totals() const {
    Bucket t;
    for (const auto& [_, b] : per_bucket) {
        t.n += b.n;
        t.correct += b.correct;
        t.e1 += b.e1;
        t.e2 += b.e2;
        t.e3 += b.e3;
        t.transport += b.transport;
    }
    return t;
}

double EvalReport::macro_accuracy() const {
    if (per_bucket.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [_, b] : per_bucket) sum += b.accuracy();
    return sum / static_cast<double>(per_bucket.size());
}

EvalReport run_eval(Strategy& strategy, const std::vector<Problem>& problems, int parallelism,
                    const Tolerance& tolerance) {
    if (parallelism < 1) throw PreconditionError("parallelism must be >= 1");
    std::vector<EvalResult> results(problems.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < problems.size(); i = next++) {
            results[i].problem = problems[i];
            results[i].trace = strategy.solve(problems[i]);
            results[i].category = classify_error(results[i].trace, problems[i], tolerance);
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(parallelism), problems.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::sort(results.begin(), results.end(),
              [](const EvalResult& a, const EvalResult& b) { return a.problem.id < b.problem.id; });
    EvalReport report;
    for (const auto& r : results) report.per_bucket[r.problem.unknowns].add(r.category);
    report.config_digest = sha256_hex(strategy.settings().dump()).substr(0, 16);
    report.results = std::move(results);
    return report;
}

void write_traces(const std::filesystem::path& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write traces to " + path.string());
    for (const auto& r : report.results) {
        json j = trace_to_json(r.trace);
        j["category"] = to_string(r.category);
        j["unknowns"] = r.problem.unknowns;
        out << j.dump() << '\n';
    }
}

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "md" || s == "markdown") return ReportFormat::Markdown;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    throw PreconditionError("unknown report format '" + s + "' (expected md, csv or json)");
}

namespace {

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
    return buf;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
    std::ostringstream os;
    switch (format) {
        case ReportFormat::Markdown: {
            os << "| Unknowns | N | Correct | Accuracy | E1 | E2 | E3 | Transport |\n"
               << "|---|---|---|---|---|---|---|---|\n";
            for (const auto& [k, b] : report.per_bucket)
                os << "| " << k << " | " << b.n << " | " << b.correct << " | " << percent(b.accuracy()) << " | " << b.e1
                   << " | " << b.e2 << " | " << b.e3 << " | " << b.transport << " |\n";
            if (!report.per_bucket.empty()) {
                const Bucket t = report.totals();
                os << "| Average | " << t.n << " | " << t.correct << " | " << percent(report.macro_accuracy()) << " | "
                   << t.e1 << " | " << t.e2 << " | " << t.e3 << " | " << t.transport << " |\n";
            }
            if (!report.config_digest.empty()) os << "\nConfig digest: " << report.config_digest << '\n';
            if (!report.traces_path.empty()) os << "Traces: " << report.traces_path << '\n';
            break;
        }
        case ReportFormat::Csv: {
            os << "unknowns,n,correct,accuracy,e1,e2,e3,transport\n";
            for (const auto& [k, b] : report.per_bucket)
                os << k << ',' << b.n << ',' << b.correct << ',' << fixed4(b.accuracy()) << ',' << b.e1 << ',' << b.e2
                   << ',' << b.e3 << ',' << b.transport << '\n';
            if (!report.per_bucket.empty()) {
                const Bucket t = report.totals();
                os << "average," << t.n << ',' << t.correct << ',' << fixed4(report.macro_accuracy()) << ',' << t.e1
                   << ',' << t.e2 << ',' << t.e3 << ',' << t.transport << '\n';
            }
            break;
        }
        case ReportFormat::Json: {
            json buckets = json::array();
            for (const auto& [k, b] : report.per_bucket)
                buckets.push_back({{"unknowns", k},
                                   {"n", b.n},
                                   {"correct", b.correct},
                                   {"accuracy", std::stod(fixed4(b.accuracy()))},
                                   {"errors", {{"E1", b.e1}, {"E2", b.e2}, {"E3", b.e3}}},
                                   {"transport", b.transport}});
            const Bucket t = report.totals();
            json j{{"buckets", std::move(buckets)},
                   {"total", {{"n", t.n}, {"correct", t.correct}, {"errors", {{"E1", t.e1}, {"E2", t.e2}, {"E3", t.e3}}},
                              {"transport", t.transport}}},
                   {"average_accuracy", std::stod(fixed4(report.macro_accuracy()))},
                   {"config_digest", report.config_digest},
                   {"traces_path", report.traces_path}};
            os << j.dump(2) << '\n';
            break;
        }
    }
    return os.str();
}

}  // namespace mwp
