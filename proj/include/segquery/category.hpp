#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace segquery {

using ClassId = std::uint16_t;

/// Reserved label-map value for pixels excluded from evaluation.
inline constexpr ClassId kIgnoreId = 65535;

/// Lowercases, trims, and collapses internal whitespace runs to single
/// spaces. Idempotent. May return an empty string; callers treat that as
/// unresolvable.
std::string normalize_name(std::string_view raw);

struct CategoryEntry {
    ClassId id = 0;
    std::string name;
    std::vector<std::string> aliases;
};

enum class MatchKind { Exact, Alias, None };

struct Resolution {
    std::optional<ClassId> id;
    MatchKind kind = MatchKind::None;
};

/// Ordered registry of class ids, canonical names, and aliases. Entry order
/// is stable and defines the dataset canonical order. Immutable once built.
class CategoryTable {
public:
    CategoryTable() = default;

    /// Validates and indexes the entries. Throws ValidationError on duplicate
    /// ids, use of the ignore id, empty or duplicate normalized names,
    /// ambiguous aliases, or names that would corrupt the sequence grammar.
    static CategoryTable from_entries(std::vector<CategoryEntry> entries);

    const std::vector<CategoryEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    const CategoryEntry* find_by_id(ClassId id) const;

    /// Canonical name of an id; throws ValidationError for unknown ids.
    const std::string& name_of(ClassId id) const;

    /// Position of an id in canonical order, if present.
    std::optional<std::size_t> canonical_index(ClassId id) const;

    /// Exact normalized match on a canonical name wins; alias match second;
    /// otherwise none. No fuzzy matching: unresolvable names must stay
    /// visible to the diagnostics downstream.
    Resolution resolve(std::string_view raw) const;

private:
    std::vector<CategoryEntry> entries_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::unordered_map<std::string, std::size_t> by_alias_;
    std::unordered_map<ClassId, std::size_t> by_id_;
};

}  // namespace segquery
