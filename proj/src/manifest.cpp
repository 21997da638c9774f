#include "segquery/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "segquery/errors.hpp"

namespace segquery {

namespace {

std::string join_ids(const std::vector<ClassId>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += std::to_string(ids[i]);
    }
    return out;
}

}  // namespace

bool ImageRecord::is_present(ClassId id) const {
    return std::binary_search(present_ids.begin(), present_ids.end(), id);
}

const ImageRecord* Manifest::find_image(const std::string& image_id) const {
    for (const auto& record : images) {
        if (record.image_id == image_id) {
            return &record;
        }
    }
    return nullptr;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("manifest '" + path.string() + "': cannot open file");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest '" + path.string() + "': " + e.what());
    }

    Manifest manifest;
    manifest.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    try {
        std::vector<CategoryEntry> entries;
        for (const auto& cat : doc.at("categories")) {
            CategoryEntry entry;
            const auto id = cat.at("id").get<std::int64_t>();
            if (id < 0 || id >= kIgnoreId) {
                throw ValidationError("category id " + std::to_string(id) +
                                      " out of range [0, 65534]");
            }
            entry.id = static_cast<ClassId>(id);
            entry.name = cat.at("name").get<std::string>();
            if (cat.contains("aliases")) {
                entry.aliases = cat.at("aliases").get<std::vector<std::string>>();
            }
            entries.push_back(std::move(entry));
        }
        manifest.table = CategoryTable::from_entries(std::move(entries));

        std::unordered_set<std::string> seen_ids;
        for (const auto& img : doc.at("images")) {
            ImageRecord record;
            record.image_id = img.at("id").get<std::string>();
            if (record.image_id.empty()) {
                throw ValidationError("image with empty id");
            }
            if (!seen_ids.insert(record.image_id).second) {
                throw ValidationError("duplicate image id '" + record.image_id + "'");
            }
            record.labelmap_ref = img.at("labelmap").get<std::string>();

            std::set<ClassId> declared;
            for (const auto& raw : img.at("present")) {
                const auto id = raw.get<std::int64_t>();
                if (id < 0 || id >= kIgnoreId ||
                    manifest.table.find_by_id(static_cast<ClassId>(id)) == nullptr) {
                    throw ValidationError("image '" + record.image_id + "': declared class id " +
                                          std::to_string(id) + " is not in the category table");
                }
                declared.insert(static_cast<ClassId>(id));
            }

            LabelMap map = read_label_map(manifest.base_dir / record.labelmap_ref);
            record.present_ids = map.present_ids();
            for (ClassId id : record.present_ids) {
                if (manifest.table.find_by_id(id) == nullptr) {
                    throw ValidationError("image '" + record.image_id + "': label map pixel id " +
                                          std::to_string(id) + " is not in the category table");
                }
            }

            std::vector<ClassId> missing;  // declared but absent from the label map
            std::vector<ClassId> extra;    // found in the label map but undeclared
            for (ClassId id : declared) {
                if (!std::binary_search(record.present_ids.begin(), record.present_ids.end(), id)) {
                    missing.push_back(id);
                }
            }
            for (ClassId id : record.present_ids) {
                if (declared.count(id) == 0) {
                    extra.push_back(id);
                }
            }
            if (!missing.empty() || !extra.empty()) {
                std::string detail;
                if (!missing.empty()) {
                    detail += " declared but absent: " + join_ids(missing) + ";";
                }
                if (!extra.empty()) {
                    detail += " present but undeclared: " + join_ids(extra) + ";";
                }
                throw ValidationError("image '" + record.image_id + "': present-set mismatch:" +
                                      detail);
            }

            manifest.images.push_back(std::move(record));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest '" + path.string() + "': " + e.what());
    }

    return manifest;
}

LabelMap load_label_map(const Manifest& manifest, const ImageRecord& record) {
    return read_label_map(manifest.base_dir / record.labelmap_ref);
}

}  // namespace segquery
