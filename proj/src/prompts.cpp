#include "mwp/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "mwp/errors.hpp"

namespace mwp {

namespace detail {
const std::map<std::string, std::string>& compiled_prompts();
}

namespace {

// Files end with a newline; templates do not.
std::string trim_final_newline(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

bool is_placeholder_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::string fill_template(std::string_view tmpl, const TemplateVars& vars) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            std::size_t j = i + 1;
            while (j < tmpl.size() && is_placeholder_char(tmpl[j])) ++j;
            if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
                const std::string name(tmpl.substr(i + 1, j - i - 1));
                auto it = vars.find(name);
                if (it == vars.end()) throw PreconditionError("template placeholder {" + name + "} has no value");
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out += tmpl[i++];
    }
    return out;
}

PromptLibrary PromptLibrary::defaults() {
    PromptLibrary lib;
    for (const auto& [name, body] : detail::compiled_prompts()) lib.templates_[name] = trim_final_newline(body);
    return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& dir) {
    PromptLibrary lib = defaults();
    if (!std::filesystem::is_directory(dir)) throw Error("prompt directory not found: " + dir.string());
    for (auto& [name, body] : lib.templates_) {
        const auto path = dir / (name + ".txt");
        if (!std::filesystem::exists(path)) continue;
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        body = trim_final_newline(ss.str());
    }
    return lib;
}

const std::string& PromptLibrary::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw PreconditionError("unknown prompt template " + name);
    return it->second;
}

std::string PromptLibrary::render(const std::string& name, const TemplateVars& vars) const {
    return fill_template(get(name), vars);
}

}  // namespace mwp
