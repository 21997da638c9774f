#include "segquery/category.hpp"

#include <array>
#include <cctype>

#include "segquery/errors.hpp"

namespace segquery {

std::string normalize_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

namespace {

// Names containing the item separator or the special tokens would make the
// query/response grammar ambiguous, so ingestion refuses them.
void check_grammar_safe(const std::string& name, ClassId id) {
    static constexpr std::array<std::string_view, 3> kTokens = {"<seg>", "<neg>", "<image>"};
    if (name.find(',') != std::string::npos) {
        throw ValidationError("category id " + std::to_string(id) + ": name '" + name +
                              "' contains ',' which collides with the item separator");
    }
    for (auto token : kTokens) {
        if (name.find(token) != std::string::npos) {
            throw ValidationError("category id " + std::to_string(id) + ": name '" + name +
                                  "' contains reserved token '" + std::string(token) + "'");
        }
    }
}

}  // namespace

CategoryTable CategoryTable::from_entries(std::vector<CategoryEntry> entries) {
    CategoryTable table;
    table.entries_ = std::move(entries);
    for (std::size_t i = 0; i < table.entries_.size(); ++i) {
        const auto& entry = table.entries_[i];
        if (entry.id == kIgnoreId) {
            throw ValidationError("category id 65535 is reserved as the ignore id");
        }
        if (!table.by_id_.emplace(entry.id, i).second) {
            throw ValidationError("duplicate category id " + std::to_string(entry.id));
        }
        std::string norm = normalize_name(entry.name);
        if (norm.empty()) {
            throw ValidationError("category id " + std::to_string(entry.id) +
                                  ": canonical name is empty after normalization");
        }
        check_grammar_safe(norm, entry.id);
        if (!table.by_name_.emplace(norm, i).second) {
            throw ValidationError("duplicate canonical name '" + norm + "' (category id " +
                                  std::to_string(entry.id) + ")");
        }
    }
    // Aliases indexed second so canonical names always win; an alias that
    // collides with a name or alias of a different entry is ambiguous.
    for (std::size_t i = 0; i < table.entries_.size(); ++i) {
        const auto& entry = table.entries_[i];
        for (const auto& alias : entry.aliases) {
            std::string norm = normalize_name(alias);
            if (norm.empty()) {
                throw ValidationError("category id " + std::to_string(entry.id) +
                                      ": alias is empty after normalization");
            }
            check_grammar_safe(norm, entry.id);
            auto named = table.by_name_.find(norm);
            if (named != table.by_name_.end()) {
                if (named->second != i) {
                    throw ValidationError("alias '" + norm + "' of category id " +
                                          std::to_string(entry.id) +
                                          " collides with canonical name of id " +
                                          std::to_string(table.entries_[named->second].id));
                }
                continue;  // alias repeating its own canonical name is a no-op
            }
            auto [it, inserted] = table.by_alias_.emplace(norm, i);
            if (!inserted && it->second != i) {
                throw ValidationError("alias '" + norm + "' is claimed by both category id " +
                                      std::to_string(table.entries_[it->second].id) + " and id " +
                                      std::to_string(entry.id));
            }
        }
    }
    return table;
}

const CategoryEntry* CategoryTable::find_by_id(ClassId id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

const std::string& CategoryTable::name_of(ClassId id) const {
    const CategoryEntry* entry = find_by_id(id);
    if (entry == nullptr) {
        throw ValidationError("unknown category id " + std::to_string(id));
    }
    return entry->name;
}

std::optional<std::size_t> CategoryTable::canonical_index(ClassId id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Resolution CategoryTable::resolve(std::string_view raw) const {
    std::string norm = normalize_name(raw);
    if (norm.empty()) {
        return {};
    }
    if (auto it = by_name_.find(norm); it != by_name_.end()) {
        return {entries_[it->second].id, MatchKind::Exact};
    }
    if (auto it = by_alias_.find(norm); it != by_alias_.end()) {
        return {entries_[it->second].id, MatchKind::Alias};
    }
    return {};
}

}  // namespace segquery
