#pragma once

// Named prompt templates.  Defaults are compiled in from prompts/*.txt; a
// directory of edited copies can override any of them at run time.
// Placeholders are written {name}.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace mwp {

using TemplateVars = std::map<std::string, std::string>;

// Replaces every {name} in `tmpl` with vars[name] in a single pass, so
// substituted text is never rescanned.  Throws PreconditionError on a
// placeholder with no value.
std::string fill_template(std::string_view tmpl, const TemplateVars& vars);

class PromptLibrary {
public:
    static PromptLibrary defaults();

    // Defaults, overridden by every <name>.txt found in `dir`.
    static PromptLibrary with_overrides(const std::filesystem::path& dir);

    const std::string& get(const std::string& name) const;
    std::string render(const std::string& name, const TemplateVars& vars) const;

    const std::map<std::string, std::string>& all() const { return templates_; }

private:
    std::map<std::string, std::string> templates_;
};

}  // namespace mwp
