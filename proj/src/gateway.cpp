#include "mwp/gateway.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace mwp {

using nlohmann::json;

ChatRequest ChatRequest::user(const GenerationConfig& config, std::string text) {
    ChatRequest r;
    r.model_id = config.model_id;
    r.system_prompt = config.system_prompt;
    r.temperature = config.temperature;
    r.max_tokens = config.max_tokens;
    r.messages.push_back({"user", std::move(text)});
    return r;
}

void ChatRequest::validate() const {
    if (!(temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
    if (max_tokens <= 0) throw PreconditionError("max_tokens must be > 0");
    if (messages.empty()) throw PreconditionError("request has no messages");
}

const char* to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::Error: return "error";
    }
    return "error";
}

FinishReason finish_reason_from_string(const std::string& s) {
    if (s == "stop") return FinishReason::Stop;
    if (s == "length") return FinishReason::Length;
    return FinishReason::Error;
}

json canonical_request(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"text", m.text}});
    // json objects are std::map-backed, so keys serialize sorted.
    return json{{"model_id", request.model_id},
                {"system_prompt", request.system_prompt},
                {"messages", std::move(messages)},
                {"temperature", request.temperature}};
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw Error("sha256 failed");
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
    return os.str();
}

std::string fingerprint(const ChatRequest& request) { return sha256_hex(canonical_request(request).dump()); }

MissingFixture::MissingFixture(std::string fingerprint)
    : Error("no fixture for request " + fingerprint), fingerprint_(std::move(fingerprint)) {}

Completion complete(Backend& backend, const ChatRequest& request) {
    request.validate();
    return backend.complete(request);
}

const FixtureStore::Entry* FixtureStore::find(const std::string& fingerprint) const {
    auto it = entries_.find(fingerprint);
    return it == entries_.end() ? nullptr : &it->second;
}

bool FixtureStore::insert(const std::string& fingerprint, Entry entry) {
    auto [it, inserted] = entries_.insert_or_assign(fingerprint, std::move(entry));
    if (!inserted) warnings_.push_back("duplicate fixture " + fingerprint + " (last entry wins)");
    return inserted;
}

namespace {

json completion_json(const Completion& c) {
    json j{{"text", c.text}, {"finish_reason", to_string(c.finish_reason)}};
    if (c.usage) j["usage"] = {{"prompt_tokens", c.usage->prompt_tokens}, {"completion_tokens", c.usage->completion_tokens}};
    return j;
}

Completion completion_from_json(const json& j) {
    Completion c;
    c.text = j.at("text").get<std::string>();
    c.finish_reason = finish_reason_from_string(j.value("finish_reason", std::string("stop")));
    if (j.contains("usage") && j["usage"].is_object()) {
        Usage u;
        u.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
        u.completion_tokens = j["usage"].value("completion_tokens", 0L);
        c.usage = u;
    }
    return c;
}

}  // namespace

std::string fixture_line(const ChatRequest& request, const Completion& completion) {
    json req = canonical_request(request);
    req["max_tokens"] = request.max_tokens;
    json line{{"fingerprint", fingerprint(request)}, {"request", std::move(req)},
              {"completion", completion_json(completion)}};
    return line.dump();
}

FixtureStore load_fixtures(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open fixture file " + path.string());
    FixtureStore store(path);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            FixtureStore::Entry entry;
            entry.request = j.value("request", json::object());
            entry.completion = completion_from_json(j.at("completion"));
            store.insert(j.at("fingerprint").get<std::string>(), std::move(entry));
        } catch (const json::exception& e) {
            throw FormatError(number, e.what());
        }
    }
    return store;
}

Completion ReplayBackend::complete(const ChatRequest& request) {
    const std::string fp = fingerprint(request);
    const auto* entry = store_->find(fp);
    if (!entry) throw MissingFixture(fp);
    return entry->completion;
}

RecordBackend::RecordBackend(std::shared_ptr<Backend> upstream, std::filesystem::path path)
    : upstream_(std::move(upstream)), path_(std::move(path)) {}

Completion RecordBackend::complete(const ChatRequest& request) {
    Completion c = upstream_->complete(request);
    const std::string line = fixture_line(request, c);
    std::lock_guard lock(append_mutex_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to fixture file " + path_.string());
    out << line << '\n';
    return c;
}

}  // namespace mwp
