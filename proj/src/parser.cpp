#include "segquery/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>

#include "segquery/templates.hpp"

namespace segquery {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string_view strip_separators(std::string_view s) {
    s = trim(s);
    while (!s.empty() && (s.front() == ',')) {
        s = trim(s.substr(1));
    }
    while (!s.empty() && (s.back() == ',')) {
        s = trim(s.substr(0, s.size() - 1));
    }
    return s;
}

void append_garbage(std::optional<std::string>& garbage, std::string_view span) {
    if (span.empty()) {
        return;
    }
    if (!garbage) {
        garbage = std::string(span);
    } else {
        *garbage += "; ";
        *garbage += span;
    }
}

struct TagHit {
    std::size_t pos;
    ItemTag tag;
};

std::optional<TagHit> find_next_tag(std::string_view text, std::size_t from) {
    std::size_t seg = text.find(kSegToken, from);
    std::size_t neg = text.find(kNegToken, from);
    if (seg == std::string_view::npos && neg == std::string_view::npos) {
        return std::nullopt;
    }
    if (seg < neg) {
        return TagHit{seg, ItemTag::Seg};
    }
    return TagHit{neg, ItemTag::Neg};
}

}  // namespace

ParseReport parse_response(std::string_view text, const std::vector<std::string>& query_names,
                           const CategoryTable& table) {
    ParseReport report;

    // Query-side context: normalized names in order plus their table ids.
    std::vector<std::string> query_norm;
    query_norm.reserve(query_names.size());
    std::unordered_map<std::string, std::optional<ClassId>> query_resolution;
    std::vector<ClassId> queried_ids;  // query order, resolvable names only
    std::set<ClassId> queried_id_set;
    for (const auto& name : query_names) {
        std::string norm = normalize_name(name);
        query_norm.push_back(norm);
        auto resolution = table.resolve(norm);
        query_resolution.emplace(std::move(norm), resolution.id);
        if (resolution.id && queried_id_set.insert(*resolution.id).second) {
            queried_ids.push_back(*resolution.id);
        }
    }

    const bool is_sentinel = trim(text) == kEmptyPositiveResponse;
    if (!is_sentinel) {
        std::size_t pos = 0;
        std::size_t seg_count = 0;
        while (true) {
            auto hit = find_next_tag(text, pos);
            if (!hit) {
                std::string_view rest = trim(text.substr(pos));
                if (!rest.empty() && rest != ".") {
                    append_garbage(report.trailing_garbage, rest);
                }
                break;
            }
            std::string_view span = text.substr(pos, hit->pos - pos);
            // The name is whatever follows the last comma; anything before it
            // is a malformed span the grammar recovers across.
            std::size_t comma = span.rfind(',');
            std::string_view name_raw = span;
            if (comma != std::string_view::npos) {
                append_garbage(report.trailing_garbage, strip_separators(span.substr(0, comma)));
                name_raw = span.substr(comma + 1);
            }
            ParsedItem item;
            item.raw_name = std::string(trim(name_raw));
            item.tag = hit->tag;
            if (hit->tag == ItemTag::Seg) {
                item.seg_index = seg_count++;
            }
            report.items.push_back(std::move(item));
            pos = hit->pos + kSegToken.size();
        }
    }

    // Resolution: a name that matches a query name takes the query name's
    // table resolution (possibly none); only unqueried names fall through to
    // a direct table lookup.
    std::map<std::string, std::size_t> name_counts;
    std::set<ClassId> answered_ids;
    std::set<std::string> extra_seen;
    std::set<std::string> duplicate_seen;
    std::vector<std::string> item_norms;
    item_norms.reserve(report.items.size());
    for (auto& item : report.items) {
        std::string norm = normalize_name(item.raw_name);
        item_norms.push_back(norm);
        if (norm.empty()) {
            continue;  // unresolvable placeholder; keeps mask slots aligned
        }
        const bool in_query = query_resolution.count(norm) > 0;
        if (in_query) {
            item.resolved_id = query_resolution.at(norm);
        } else {
            item.resolved_id = table.resolve(norm).id;
        }
        if (item.resolved_id) {
            answered_ids.insert(*item.resolved_id);
        }
        if (std::size_t count = ++name_counts[norm]; count == 2 && duplicate_seen.insert(norm).second) {
            report.duplicates.push_back(norm);
        }
        const bool answers_queried_id =
            item.resolved_id && queried_id_set.count(*item.resolved_id) > 0;
        if (!in_query && !answers_queried_id && extra_seen.insert(item.raw_name).second) {
            report.extra.push_back(item.raw_name);
        }
    }

    for (ClassId id : queried_ids) {
        if (answered_ids.count(id) == 0) {
            report.missing.push_back(id);
        }
    }
    report.order_matches_query = item_norms == query_norm;
    return report;
}

std::string render_items(const std::vector<ParsedItem>& items) {
    if (items.empty()) {
        return std::string(kEmptyPositiveResponse);
    }
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += items[i].raw_name;
        out += items[i].tag == ItemTag::Seg ? kSegToken : kNegToken;
    }
    out += '.';
    return out;
}

bool roundtrip_check(const TrainingSample& sample, const CategoryTable& table) {
    auto names = extract_query_names(sample.query);
    if (!names) {
        return false;
    }
    ParseReport report = parse_response(sample.response, *names, table);
    if (report.trailing_garbage) {
        return false;
    }
    if (render_items(report.items) != sample.response) {
        return false;
    }
    std::vector<ClassId> seg_ids;
    for (const auto& item : report.items) {
        if (item.tag == ItemTag::Seg) {
            if (!item.resolved_id) {
                return false;
            }
            seg_ids.push_back(*item.resolved_id);
        }
    }
    return seg_ids == sample.seg_target_ids;
}

}  // namespace segquery
