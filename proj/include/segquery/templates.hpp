#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace segquery {

// Special tokens of the sequence grammar.
inline constexpr std::string_view kSegToken = "<SEG>";
inline constexpr std::string_view kNegToken = "<NEG>";
inline constexpr std::string_view kImageToken = "<IMAGE>";

/// Fixed response when a non-augmented query matches nothing in the image.
inline constexpr std::string_view kEmptyPositiveResponse =
    "none of the requested classes are present.";

/// The fixed query template set (see docs/templates.md). Each template
/// contains the image placeholder exactly once and a slot for the
/// comma-separated name list.
std::size_t template_count();

/// Query text for a template: names joined by ", " substituted into the
/// template. Throws ValidationError on an empty name list or an out-of-range
/// template id.
std::string build_query(const std::vector<std::string>& names, std::size_t template_id);

/// Inverse of build_query: recovers the name list from a query produced by
/// any known template. Returns nullopt when no template matches.
std::optional<std::vector<std::string>> extract_query_names(std::string_view query);

}  // namespace segquery
