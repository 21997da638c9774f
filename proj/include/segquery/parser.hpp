#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segquery/builder.hpp"
#include "segquery/category.hpp"

namespace segquery {

enum class ItemTag { Seg, Neg };

/// One "name<SEG>" or "name<NEG>" item recovered from a response.
/// seg_index is the 0-based position among <SEG> occurrences in text order;
/// the i-th mask returned by an endpoint binds to the item with seg_index i.
struct ParsedItem {
    std::string raw_name;  // trimmed, not normalized
    std::optional<ClassId> resolved_id;
    ItemTag tag = ItemTag::Neg;
    std::optional<std::size_t> seg_index;
};

/// Structured decomposition of a response plus diagnostics for the three
/// failure modes: classes the query asked for but the response skipped
/// (missing), names the query never asked for (extra), and repeated names
/// (duplicates; the first occurrence is the one mask binding uses).
struct ParseReport {
    std::vector<ParsedItem> items;
    std::vector<ClassId> missing;        // queried ids absent from the response
    std::vector<std::string> extra;      // response names outside the query
    std::vector<std::string> duplicates; // normalized names occurring more than once
    bool order_matches_query = false;
    std::optional<std::string> trailing_garbage;
};

/// Total parse: any input text yields a report, never a throw. Items are
/// recovered by a greedy left-to-right scan; malformed spans are skipped to
/// the next comma and collected into trailing_garbage. Names are normalized,
/// matched against the query names first and the full table second.
ParseReport parse_response(std::string_view text, const std::vector<std::string>& query_names,
                           const CategoryTable& table);

/// Reassembles a response from parsed items (the empty item list renders the
/// empty-positive sentence).
std::string render_items(const std::vector<ParsedItem>& items);

/// True iff parsing sample.response reproduces the response text exactly and
/// the resolved <SEG> ids equal sample.seg_target_ids. Builder output with
/// augmentation on always passes.
bool roundtrip_check(const TrainingSample& sample, const CategoryTable& table);

}  // namespace segquery
