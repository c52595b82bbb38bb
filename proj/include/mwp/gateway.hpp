#pragma once

// Uniform chat-completion interface.  Pipelines talk to a Backend; the
// replay backend answers from a fixture file so every pipeline runs
// deterministically without network access, and the record backend
// captures live traffic into such a file.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwp/errors.hpp"

namespace mwp {

struct Message {
    std::string role;  // "user" or "assistant"
    std::string text;

    friend bool operator==(const Message&, const Message&) = default;
};

// Generation settings shared by every request a pipeline issues.
struct GenerationConfig {
    std::string model_id = "gpt-3.5-turbo-1106";
    std::string system_prompt;
    double temperature = 0.0;
    int max_tokens = 2048;
};

struct ChatRequest {
    std::string model_id;
    std::string system_prompt;
    std::vector<Message> messages;
    double temperature = 0.0;
    int max_tokens = 2048;

    // Single user turn under `config`.
    static ChatRequest user(const GenerationConfig& config, std::string text);

    // Throws PreconditionError on temperature < 0, max_tokens <= 0 or no messages.
    void validate() const;
};

enum class FinishReason { Stop, Length, Error };

const char* to_string(FinishReason reason);
FinishReason finish_reason_from_string(const std::string& s);

struct Usage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct Completion {
    std::string text;
    FinishReason finish_reason = FinishReason::Stop;
    std::optional<Usage> usage;
};

// Key-sorted JSON over model_id, system_prompt, messages and temperature.
nlohmann::json canonical_request(const ChatRequest& request);

// Lowercase hex SHA-256 of canonical_request(request).dump().
std::string fingerprint(const ChatRequest& request);

std::string sha256_hex(const std::string& data);

class MissingFixture : public Error {
public:
    explicit MissingFixture(std::string fingerprint);
    const std::string& fingerprint() const { return fingerprint_; }

private:
    std::string fingerprint_;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class AuthError : public Error {
public:
    using Error::Error;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const ChatRequest& request) = 0;
    virtual std::string kind() const = 0;
};

// Validates the request, then delegates to the backend.
Completion complete(Backend& backend, const ChatRequest& request);

class FixtureStore {
public:
    struct Entry {
        nlohmann::json request;
        Completion completion;
    };

    FixtureStore() = default;
    explicit FixtureStore(std::filesystem::path origin) : origin_(std::move(origin)) {}

    const Entry* find(const std::string& fingerprint) const;
    // Returns false (and records a warning) when the fingerprint was present.
    bool insert(const std::string& fingerprint, Entry entry);

    std::size_t size() const { return entries_.size(); }
    const std::filesystem::path& origin() const { return origin_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::map<std::string, Entry> entries_;
    std::filesystem::path origin_;
    std::vector<std::string> warnings_;
};

// One JSON-lines record: {"fingerprint", "request", "completion"}.
std::string fixture_line(const ChatRequest& request, const Completion& completion);

// Blank lines are skipped; duplicate fingerprints are last-wins with a
// warning.  Throws FormatError(line) on a malformed line.
FixtureStore load_fixtures(const std::filesystem::path& path);

class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}

    Completion complete(const ChatRequest& request) override;
    std::string kind() const override { return "replay"; }

private:
    std::shared_ptr<const FixtureStore> store_;
};

// Delegates to `upstream`, then appends the exchange to `path`.
class RecordBackend : public Backend {
public:
    RecordBackend(std::shared_ptr<Backend> upstream, std::filesystem::path path);

    Completion complete(const ChatRequest& request) override;
    std::string kind() const override { return "record"; }

private:
    std::shared_ptr<Backend> upstream_;
    std::filesystem::path path_;
    std::mutex append_mutex_;
};

struct HttpConfig {
    std::string base_url;  // e.g. https://api.openai.com/v1
    std::string api_key;
    std::size_t max_in_flight = 4;
    int max_attempts = 5;
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::milliseconds max_total_backoff{60000};
    std::chrono::seconds timeout{120};
    // Injected for tests; defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;

    // Reads MWP_BASE_URL / MWP_API_KEY, falling back to OPENAI_BASE_URL /
    // OPENAI_API_KEY.  The base URL defaults to the OpenAI endpoint.
    static HttpConfig from_environment();
};

// OpenAI-compatible /chat/completions client.  Retries 429, 5xx and
// connection failures with exponential backoff; 401/403 fail immediately.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpConfig config);

    Completion complete(const ChatRequest& request) override;
    std::string kind() const override { return "http"; }

    // Backoff before retry `attempt` (1-based), clipped to the total budget.
    static std::vector<std::chrono::milliseconds> backoff_schedule(const HttpConfig& config);

    // Process-wide count of HTTP attempts, for asserting replay runs stay offline.
    static std::size_t network_attempts() { return attempts_.load(); }

private:
    Completion attempt_once(const ChatRequest& request, int& status);

    HttpConfig config_;
    std::string scheme_host_port_;
    std::string path_prefix_;

    std::mutex slot_mutex_;
    std::condition_variable slot_cv_;
    std::size_t in_flight_ = 0;

    static inline std::atomic<std::size_t> attempts_{0};
};

}  // namespace mwp
