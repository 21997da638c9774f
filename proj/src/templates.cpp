#include "segquery/templates.hpp"

#include <array>

#include "segquery/errors.hpp"

namespace segquery {

namespace {

struct Template {
    std::string_view prefix;  // text before the name list
    std::string_view suffix;  // text after the name list
};

// Kept in sync with docs/templates.md. Template 0 is the canonical wording
// used by the chunk orchestrator and the single-target baseline.
constexpr std::array<Template, 5> kTemplates = {{
    {"<IMAGE> Can you segment the ", " in this image?"},
    {"<IMAGE> Could you segment the ", " in this image?"},
    {"<IMAGE> Can you segment the ", " in this picture?"},
    {"<IMAGE> Would you mind segmenting the ", " in this image?"},
    {"<IMAGE> Can you find and segment the ", " in this image?"},
}};

}  // namespace

std::size_t template_count() { return kTemplates.size(); }

std::string build_query(const std::vector<std::string>& names, std::size_t template_id) {
    if (names.empty()) {
        throw ValidationError("build_query: empty name list");
    }
    if (template_id >= kTemplates.size()) {
        throw ValidationError("build_query: template id " + std::to_string(template_id) +
                              " out of range [0, " + std::to_string(kTemplates.size() - 1) + "]");
    }
    const auto& tpl = kTemplates[template_id];
    std::string query(tpl.prefix);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            query += ", ";
        }
        query += names[i];
    }
    query += tpl.suffix;
    return query;
}

std::optional<std::vector<std::string>> extract_query_names(std::string_view query) {
    for (const auto& tpl : kTemplates) {
        if (query.size() <= tpl.prefix.size() + tpl.suffix.size()) {
            continue;
        }
        if (query.substr(0, tpl.prefix.size()) != tpl.prefix ||
            query.substr(query.size() - tpl.suffix.size()) != tpl.suffix) {
            continue;
        }
        std::string_view list =
            query.substr(tpl.prefix.size(), query.size() - tpl.prefix.size() - tpl.suffix.size());
        std::vector<std::string> names;
        std::size_t pos = 0;
        while (true) {
            std::size_t sep = list.find(", ", pos);
            if (sep == std::string_view::npos) {
                names.emplace_back(list.substr(pos));
                break;
            }
            names.emplace_back(list.substr(pos, sep - pos));
            pos = sep + 2;
        }
        return names;
    }
    return std::nullopt;
}

}  // namespace segquery
