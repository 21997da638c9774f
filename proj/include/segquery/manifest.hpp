#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "segquery/category.hpp"
#include "segquery/label_map.hpp"

namespace segquery {

/// One dataset image: its id, label-map location, and the exact set of
/// non-ignore class ids occurring in the label map (verified at ingestion).
struct ImageRecord {
    std::string image_id;
    std::filesystem::path labelmap_ref;  // relative to the manifest directory
    std::vector<ClassId> present_ids;    // sorted, unique

    bool is_present(ClassId id) const;
};

struct Manifest {
    CategoryTable table;
    std::vector<ImageRecord> images;
    std::filesystem::path base_dir;

    const ImageRecord* find_image(const std::string& image_id) const;
};

/// Parses and validates a manifest JSON document:
///   { "categories": [ {"id": int, "name": str, "aliases": [str]} ],
///     "images":     [ {"id": str, "labelmap": str, "present": [int]} ] }
/// Every label map is loaded, its pixel ids checked against the table, and
/// its recomputed present set compared with the declared one. All failures
/// throw ValidationError naming the image and offending ids.
Manifest load_manifest(const std::filesystem::path& path);

/// Reads the label map behind a record (path resolved against base_dir).
LabelMap load_label_map(const Manifest& manifest, const ImageRecord& record);

}  // namespace segquery
