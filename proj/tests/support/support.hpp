#pragma once

// Shared helpers for the test binaries: scripted backends, an independent
// Cramer's-rule oracle and random generators.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mwp/gateway.hpp"
#include "mwp/expression.hpp"

namespace mwp::testing {

std::filesystem::path data_dir();
std::string read_text(const std::filesystem::path& path);
// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

// Answers each request by calling `responder` on the user text.
class ScriptedBackend : public Backend {
public:
    using Responder = std::function<std::string(const std::string& prompt)>;
    explicit ScriptedBackend(Responder responder) : responder_(std::move(responder)) {}

    Completion complete(const ChatRequest& request) override;
    std::string kind() const override { return "scripted"; }

    std::vector<std::string> prompts() const;
    std::size_t calls() const;

private:
    Responder responder_;
    mutable std::mutex mutex_;
    std::vector<std::string> prompts_;
};

// Returns the queued replies in order, then throws TransportError.
class QueueBackend : public Backend {
public:
    explicit QueueBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}

    Completion complete(const ChatRequest& request) override;
    std::string kind() const override { return "queue"; }

    const std::vector<std::string>& prompts() const { return prompts_; }

private:
    std::vector<std::string> replies_;
    std::size_t next_ = 0;
    std::vector<std::string> prompts_;
};

// Cramer's rule with Laplace-expansion determinants over exact integers.
// Nullopt when the matrix is singular.
using IntMatrix = std::vector<std::vector<std::int64_t>>;
mpz_class laplace_determinant(const IntMatrix& m);
std::optional<std::vector<mpq_class>> cramer_solve(const IntMatrix& a, const std::vector<mpq_class>& b);

struct RandomSystem {
    IntMatrix coefficients;
    std::vector<mpq_class> rhs;
    std::vector<std::string> names;
    Bindings assignment;
    std::string text;  // ';'-separated, randomly formatted
};

// Nonsingular k x k integer system with a known assignment of small
// integers and halves.
RandomSystem random_full_rank_system(std::mt19937& rng, int k);

// Random expression tree over the given variables with terminating
// decimal constants.
Expression random_expression(std::mt19937& rng, const std::vector<std::string>& vars, int depth);

}  // namespace mwp::testing
