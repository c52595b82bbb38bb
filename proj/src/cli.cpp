#include "mwp/cli.hpp"

#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "mwp/parser.hpp"

namespace mwp::cli {

using nlohmann::json;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

Rational parse_rational_flag(const std::string& flag, const std::string& text) {
    auto r = Rational::parse(text);
    if (!r) throw UsageError(flag + " expects a number, got '" + text + "'");
    return *r;
}

Tolerance tolerance_of(const RunConfig& c) {
    Tolerance t;
    t.absolute = parse_rational_flag("--tolerance", c.tolerance);
    t.relative = parse_rational_flag("--relative-tolerance", c.relative_tolerance);
    return t;
}

PromptLibrary prompts_of(const RunConfig& c) {
    return c.prompts_dir.empty() ? PromptLibrary::defaults() : PromptLibrary::with_overrides(c.prompts_dir);
}

// "x = 2, y = 1" or "x=2; y=1".
Bindings parse_oracle(const std::string& text) {
    Bindings out;
    std::string item;
    auto flush = [&] {
        const auto eq = item.find('=');
        if (item.find_first_not_of(" \t") == std::string::npos) {
            item.clear();
            return;
        }
        if (eq == std::string::npos) throw UsageError("--oracle entries look like name=value, got '" + item + "'");
        std::string name = item.substr(0, eq);
        std::erase_if(name, [](char ch) { return ch == ' ' || ch == '\t'; });
        std::string value = item.substr(eq + 1);
        std::erase_if(value, [](char ch) { return ch == ' ' || ch == '\t'; });
        out[name] = parse_rational_flag("--oracle", value);
        item.clear();
    };
    for (char ch : text) {
        if (ch == ',' || ch == ';') flush();
        else item += ch;
    }
    flush();
    return out;
}

void write_lines(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << text;
}

void require(const std::string& value, const std::string& flag) {
    if (value.empty()) throw UsageError(flag + " is required");
}

void add_backend_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--backend", c.backend, "replay, record or http")
        ->check(CLI::IsMember({"replay", "record", "http"}))
        ->capture_default_str();
    sub->add_option("--fixtures", c.fixtures, "Fixture file (JSON lines) for replay or record");
    sub->add_option("--base-url", c.base_url, "API base URL for http/record (default from MWP_BASE_URL)");
    sub->add_option("--model", c.generation.model_id, "Model id")->capture_default_str();
    sub->add_option("--temperature", c.generation.temperature, "Sampling temperature")->capture_default_str();
    sub->add_option("--max-tokens", c.generation.max_tokens, "Completion token limit")->capture_default_str();
    sub->add_option("--prompts", c.prompts_dir, "Directory of prompt template overrides");
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, std::shared_ptr<Backend> backend,
                                        FormulateSolveConfig fs) {
    if (name == "formulate-solve") return std::make_unique<FormulateSolveStrategy>(std::move(backend), std::move(fs));
    return std::make_unique<ZeroShotCotStrategy>(std::move(backend), fs.generation, fs.prompts);
}

struct SolveFlags {
    std::string strategy = "formulate-solve";
    bool no_instruction = false;
    bool no_demos = false;
    bool no_solver = false;
    bool lenient = false;
    std::string report;
    std::string traces;
};

void add_solve_flags(CLI::App* sub, SolveFlags& f) {
    sub->add_option("--strategy", f.strategy, "formulate-solve or zero-shot-cot")
        ->check(CLI::IsMember({"formulate-solve", "zero-shot-cot"}))
        ->capture_default_str();
    sub->add_flag("--no-instruction", f.no_instruction, "Ablation: omit the instruction");
    sub->add_flag("--no-demos", f.no_demos, "Ablation: omit the demonstrations");
    sub->add_flag("--no-solver", f.no_solver, "Ablation: skip the symbolic solver");
    sub->add_flag("--lenient", f.lenient, "Accept any 'system of equations' marker");
}

FormulateSolveConfig formulate_config(const RunConfig& c, const SolveFlags& f) {
    FormulateSolveConfig fs;
    fs.generation = c.generation;
    fs.prompts = prompts_of(c);
    fs.instruction = Instruction::defaults(fs.prompts);
    if (!c.demos.empty()) fs.demos = read_demo_set(c.demos);
    fs.extraction = f.lenient ? ExtractionMode::Lenient : ExtractionMode::Strict;
    fs.use_instruction = !f.no_instruction;
    fs.use_demos = !f.no_demos;
    fs.use_solver = !f.no_solver;
    return fs;
}

int run_verify(const std::string& system_text, const std::string& oracle_text, std::ostream& out) {
    const EquationSystem system = parse_system(system_text);
    const SolveOutcome outcome = solve_system(system);
    out << describe(outcome, system.variables()) << '\n';
    if (!oracle_text.empty()) {
        const VerifierVerdict v = verify_candidate(system, parse_oracle(oracle_text));
        out << (v.accepted ? "accepted" : std::string("rejected ") + to_string(v.reason) + ": " + v.message) << '\n';
    }
    return 0;
}

EvalReport run_solve(const RunConfig& c, const SolveFlags& f, const std::string& traces_path) {
    require(c.dataset, "--dataset");
    const Tolerance tol = tolerance_of(c);
    const auto problems = load_dataset(c.dataset, tol);
    auto strategy = make_strategy(f.strategy, make_backend(c), formulate_config(c, f));
    EvalReport report = run_eval(*strategy, problems, c.parallelism, tol);
    if (!traces_path.empty()) {
        write_traces(traces_path, report);
        report.traces_path = std::filesystem::path(traces_path).filename().string();
    }
    return report;
}

std::vector<std::string> read_seed_questions(const std::string& path) {
    std::vector<std::string> out;
    if (path.ends_with(".jsonl")) {
        for (const auto& p : load_dataset(path)) out.push_back(p.question);
        return out;
    }
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
    return out;
}

std::set<std::string> annotated_ids(const std::string& path) {
    std::set<std::string> ids;
    std::ifstream in(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            ids.insert(json::parse(line).at("id").get<std::string>());
        } catch (const json::exception& e) {
            throw FormatError(n, e.what());
        }
    }
    return ids;
}

std::map<std::string, bool> read_annotations(const std::string& path) {
    std::map<std::string, bool> verdicts;
    std::ifstream in(path);
    if (!in) throw Error("cannot open annotations " + path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            verdicts[j.at("id").get<std::string>()] = j.at("reasonable").get<bool>();
        } catch (const json::exception& e) {
            throw FormatError(n, e.what());
        }
    }
    return verdicts;
}

// Shows each unannotated problem and reads "y [note]", "n [note]", "s" (skip)
// or "q" (quit) from `in`, appending one annotation per verdict.
void interactive_review(const std::vector<Problem>& problems, const std::string& annotations, std::istream& in,
                        std::ostream& out) {
    const auto done = annotated_ids(annotations);
    std::ofstream log(annotations, std::ios::binary | std::ios::app);
    if (!log) throw Error("cannot append to " + annotations);
    for (const auto& p : problems) {
        if (done.count(p.id)) continue;
        out << "\n[" << p.id << "] " << p.unknowns << " unknowns\n" << p.question << "\n\n"
            << p.gold_system.render() << "\n\nReasonable? [y/n/s/q] (optional note after the letter): " << std::flush;
        std::string line;
        if (!std::getline(in, line)) break;
        const auto b = line.find_first_not_of(" \t");
        const char key = b == std::string::npos ? 's' : static_cast<char>(std::tolower(line[b]));
        if (key == 'q') break;
        if (key != 'y' && key != 'n') continue;
        std::string note = b == std::string::npos ? "" : line.substr(b + 1);
        note.erase(0, std::min(note.find_first_not_of(" \t"), note.size()));
        log << json{{"id", p.id}, {"reasonable", key == 'y'}, {"note", note}}.dump() << '\n' << std::flush;
    }
    out << '\n';
}

}  // namespace

std::shared_ptr<Backend> make_backend(const RunConfig& c) {
    if (c.backend == "replay") {
        require(c.fixtures, "--fixtures");
        auto store = std::make_shared<FixtureStore>(load_fixtures(c.fixtures));
        return std::make_shared<ReplayBackend>(std::move(store));
    }
    HttpConfig http = HttpConfig::from_environment();
    if (!c.base_url.empty()) http.base_url = c.base_url;
    if (http.api_key.empty()) throw UsageError("http backend needs MWP_API_KEY or OPENAI_API_KEY");
    http.max_in_flight = static_cast<std::size_t>(std::max(c.parallelism, 1));
    auto live = std::make_shared<HttpBackend>(std::move(http));
    if (c.backend == "http") return live;
    require(c.fixtures, "--fixtures");
    return std::make_shared<RecordBackend>(live, c.fixtures);
}

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-unknown math word problems: solve, evaluate, generate and verify"};
    app.name("mwp");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    RunConfig c;
    SolveFlags sf;
    std::string system_text, oracle_text, report_path, traces_path, dev_path, annotations;
    int candidates = 10, rounds = 1;
    unsigned seed = 0;
    bool interactive = false;
    std::string filter_strategy = "none";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--parallelism", c.parallelism, "Concurrent problems")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--tolerance", c.tolerance, "Absolute answer tolerance")->capture_default_str();
        sub->add_option("--relative-tolerance", c.relative_tolerance, "Relative tolerance for |gold| > 10")
            ->capture_default_str();
    };

    auto* verify = app.add_subcommand("verify", "Solve an equation system, optionally checking it against an oracle");
    verify->add_option("--system", system_text, "Equations separated by ';' or newlines")->required();
    verify->add_option("--oracle", oracle_text, "Expected values, e.g. \"x=2, y=1\"");

    auto* solve = app.add_subcommand("solve", "Solve a dataset and write traces");
    add_backend_options(solve, c);
    add_common(solve);
    add_solve_flags(solve, sf);
    solve->add_option("--dataset", c.dataset, "Problems (JSON lines)")->required();
    solve->add_option("--demos", c.demos, "Demonstration set (JSON lines)");
    solve->add_option("--out", c.out, "Trace file to write")->required();
    solve->add_option("--report", report_path, "Also write a report here");
    solve->add_option("--format", c.format, "md, csv or json")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Evaluate a dataset and print or write a report");
    add_backend_options(eval, c);
    add_common(eval);
    add_solve_flags(eval, sf);
    eval->add_option("--dataset", c.dataset, "Problems (JSON lines)")->required();
    eval->add_option("--demos", c.demos, "Demonstration set (JSON lines)");
    eval->add_option("--out", c.out, "Report file (default: stdout)");
    eval->add_option("--traces", traces_path, "Trace file to write");
    eval->add_option("--format", c.format, "md, csv or json")->capture_default_str();

    auto* demos = app.add_subcommand("demos", "Generate candidate demonstration sets and keep the best on a dev set");
    add_backend_options(demos, c);
    add_common(demos);
    demos->add_option("--seeds", c.dataset, "Seed questions: a .jsonl dataset or one question per line")->required();
    demos->add_option("--dev", dev_path, "Dev problems (JSON lines)")->required();
    demos->add_option("-k", c.k, "Demonstrations per set")->check(CLI::PositiveNumber)->capture_default_str();
    demos->add_option("--candidates", candidates, "Candidate sets")->check(CLI::PositiveNumber)->capture_default_str();
    demos->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
    demos->add_option("--out", c.out, "Best demonstration set (JSON lines)")->required();

    auto* expand = app.add_subcommand("expand", "Add one unknown per round to every problem");
    add_backend_options(expand, c);
    add_common(expand);
    expand->add_option("--dataset", c.dataset, "Seed problems (JSON lines)")->required();
    expand->add_option("--out", c.out, "Generated problems (JSON lines)")->required();
    expand->add_option("--retries", c.retries, "Verifier attempts per expansion")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    expand->add_option("--rounds", rounds, "Expansion rounds")->check(CLI::PositiveNumber)->capture_default_str();
    expand->add_option("--filter", filter_strategy, "Keep only problems this strategy solves: none, formulate-solve, zero-shot-cot")
        ->check(CLI::IsMember({"none", "formulate-solve", "zero-shot-cot"}))
        ->capture_default_str();
    expand->add_option("--demos", c.demos, "Demonstrations for the filter strategy");

    auto* review = app.add_subcommand("review", "Annotate generated problems and drop unreasonable ones");
    review->add_option("--dataset", c.dataset, "Problems (JSON lines)")->required();
    review->add_option("--annotations", annotations, "Annotation file: {id, reasonable, note} per line")->required();
    review->add_flag("--interactive", interactive, "Prompt for a verdict on each unannotated problem");
    review->add_option("--out", c.out, "Problems annotated reasonable");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return run_verify(system_text, oracle_text, out);

        if (solve->parsed()) {
            const auto fmt = report_format_from_string(c.format);
            EvalReport report = run_solve(c, sf, c.out);
            if (!report_path.empty()) write_lines(report_path, render_report(report, fmt));
            const Bucket t = report.totals();
            out << "solved " << t.n << " problems, " << t.correct << " correct; traces in " << c.out << '\n';
            return 0;
        }

        if (eval->parsed()) {
            const auto fmt = report_format_from_string(c.format);
            EvalReport report = run_solve(c, sf, traces_path);
            const std::string text = render_report(report, fmt);
            if (c.out.empty()) out << text;
            else write_lines(c.out, text);
            return 0;
        }

        if (demos->parsed()) {
            const Tolerance tol = tolerance_of(c);
            const auto seeds = read_seed_questions(c.dataset);
            const auto dev = load_dataset(dev_path, tol);
            auto backend = make_backend(c);
            SolveFlags defaults;
            FormulateSolveConfig fs = formulate_config(c, defaults);
            auto sets = generate_candidate_sets(*backend, fs, seeds, static_cast<std::size_t>(c.k),
                                                static_cast<std::size_t>(candidates), seed);
            DevRunner runner = [&](const DemoSet& set, const Problem& p) {
                FormulateSolveConfig with = fs;
                with.demos = set;
                return is_correct(solve_problem(*backend, with, p), p, tol);
            };
            const DemoSet best = select_best_demo_set(std::move(sets), dev, runner);
            write_demo_set(c.out, best);
            out << "selected candidate " << best.candidate_index << " with dev accuracy " << best.dev_accuracy << '\n';
            return 0;
        }

        if (expand->parsed()) {
            const Tolerance tol = tolerance_of(c);
            auto backend = make_backend(c);
            ExpanderConfig ec;
            ec.generation = c.generation;
            ec.prompts = prompts_of(c);
            ec.max_retries = c.retries;
            std::unique_ptr<Strategy> filter;
            if (filter_strategy != "none") {
                SolveFlags defaults;
                filter = make_strategy(filter_strategy, backend, formulate_config(c, defaults));
            }
            std::vector<Problem> current = load_dataset(c.dataset, tol);
            std::vector<Problem> emitted;
            for (int round = 1; round <= rounds; ++round) {
                std::vector<Problem> next;
                for (const auto& p : current) {
                    try {
                        next.push_back(expand_problem(*backend, ec, p).problem);
                    } catch (const Error& e) {
                        err << "expand " << p.id << ": " << e.what() << '\n';
                    }
                }
                if (filter) {
                    FilterResult fr = filter_generated(*filter, next, tol);
                    for (const auto& d : fr.decisions)
                        if (!d.kept) err << "discard " << d.problem.id << ": " << d.reason << '\n';
                    next = std::move(fr.kept);
                }
                emitted.insert(emitted.end(), next.begin(), next.end());
                current = std::move(next);
            }
            write_problems(c.out, emitted);
            out << "wrote " << emitted.size() << " problems to " << c.out << '\n';
            return 0;
        }

        if (review->parsed()) {
            const auto problems = load_dataset(c.dataset);
            if (interactive) interactive_review(problems, annotations, in, out);
            const auto verdicts = read_annotations(annotations);
            std::vector<Problem> kept;
            std::size_t judged = 0, unreasonable = 0;
            for (const auto& p : problems) {
                auto it = verdicts.find(p.id);
                if (it == verdicts.end()) continue;
                ++judged;
                if (it->second) kept.push_back(p);
                else ++unreasonable;
            }
            if (!c.out.empty()) write_problems(c.out, kept);
            out << "annotated " << judged << " of " << problems.size() << ", unreasonable " << unreasonable;
            if (judged > 0) out << " (" << (100.0 * static_cast<double>(unreasonable) / static_cast<double>(judged)) << "%)";
            out << ", kept " << kept.size() << '\n';
            return 0;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const FormatError& e) {
        err << "error[FormatError]: line " << e.line() << ": " << e.what() << '\n';
        return 1;
    } catch (const GoldInconsistency& e) {
        err << "error[GoldInconsistency]: " << e.what() << '\n';
        return 1;
    } catch (const SyntaxError& e) {
        err << "error[SyntaxError]: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace mwp::cli
