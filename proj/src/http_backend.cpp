#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "mwp/gateway.hpp"

namespace mwp {

using nlohmann::json;

namespace {

std::string env_or(const char* primary, const char* fallback, std::string def = {}) {
    if (const char* v = std::getenv(primary); v && *v) return v;
    if (const char* v = std::getenv(fallback); v && *v) return v;
    return def;
}

class SlotGuard {
public:
    SlotGuard(std::mutex& m, std::condition_variable& cv, std::size_t& in_flight, std::size_t limit)
        : m_(m), cv_(cv), in_flight_(in_flight) {
        std::unique_lock lock(m_);
        cv_.wait(lock, [&] { return in_flight_ < limit; });
        ++in_flight_;
    }
    ~SlotGuard() {
        {
            std::lock_guard lock(m_);
            --in_flight_;
        }
        cv_.notify_one();
    }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::mutex& m_;
    std::condition_variable& cv_;
    std::size_t& in_flight_;
};

bool retryable(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpConfig HttpConfig::from_environment() {
    HttpConfig c;
    c.base_url = env_or("MWP_BASE_URL", "OPENAI_BASE_URL", "https://api.openai.com/v1");
    c.api_key = env_or("MWP_API_KEY", "OPENAI_API_KEY");
    return c;
}

HttpBackend::HttpBackend(HttpConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw PreconditionError("http backend needs a base URL");
    if (config_.api_key.empty()) throw PreconditionError("http backend needs an API key");
    if (config_.max_in_flight == 0) config_.max_in_flight = 1;
    if (config_.max_attempts < 1) config_.max_attempts = 1;
    if (config_.max_attempts > 5) config_.max_attempts = 5;
    if (!config_.sleep) config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

    const auto scheme_end = config_.base_url.find("://");
    if (scheme_end == std::string::npos) throw PreconditionError("base URL needs a scheme: " + config_.base_url);
    const auto path_start = config_.base_url.find('/', scheme_end + 3);
    scheme_host_port_ = config_.base_url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? std::string{} : config_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::vector<std::chrono::milliseconds> HttpBackend::backoff_schedule(const HttpConfig& config) {
    std::vector<std::chrono::milliseconds> out;
    const int attempts = std::min(std::max(config.max_attempts, 1), 5);
    std::chrono::milliseconds total{0};
    std::chrono::milliseconds delay = config.initial_backoff;
    for (int i = 1; i < attempts; ++i) {
        auto d = std::min(delay, config.max_total_backoff - total);
        if (d.count() < 0) d = std::chrono::milliseconds{0};
        out.push_back(d);
        total += d;
        delay *= 2;
    }
    return out;
}

Completion HttpBackend::attempt_once(const ChatRequest& request, int& status) {
    json messages = json::array();
    if (!request.system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
    for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.text}});
    json body{{"model", request.model_id},
              {"messages", std::move(messages)},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens}};

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(std::chrono::seconds(30));
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};

    ++attempts_;
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
        status = 0;
        throw TransportError("request failed: " + httplib::to_string(res.error()));
    }
    status = res->status;
    if (status == 401 || status == 403) throw AuthError("authentication rejected (HTTP " + std::to_string(status) + ")");
    if (status != 200) throw TransportError("HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));

    Completion c;
    try {
        json j = json::parse(res->body);
        const json& choice = j.at("choices").at(0);
        const json& content = choice.at("message").at("content");
        c.text = content.is_string() ? content.get<std::string>() : std::string{};
        c.finish_reason = finish_reason_from_string(choice.value("finish_reason", std::string("stop")));
        if (j.contains("usage") && j["usage"].is_object()) {
            Usage u;
            u.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
            u.completion_tokens = j["usage"].value("completion_tokens", 0L);
            c.usage = u;
        }
    } catch (const json::exception& e) {
        status = 0;
        throw TransportError(std::string("malformed completion response: ") + e.what());
    }
    if (c.finish_reason == FinishReason::Stop && c.text.empty()) c.finish_reason = FinishReason::Error;
    return c;
}

Completion HttpBackend::complete(const ChatRequest& request) {
    SlotGuard slot(slot_mutex_, slot_cv_, in_flight_, config_.max_in_flight);
    const auto schedule = backoff_schedule(config_);
    for (std::size_t attempt = 0;; ++attempt) {
        int status = 0;
        try {
            return attempt_once(request, status);
        } catch (const TransportError& e) {
            if (!retryable(status) || attempt >= schedule.size())
                throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt + 1) + " attempts)");
            config_.sleep(schedule[attempt]);
        }
    }
}

}  // namespace mwp
