#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "segquery/manifest.hpp"
#include "segquery/rng.hpp"

namespace segquery {

struct BuilderConfig {
    std::size_t min_sample = 3;
    std::size_t max_sample = 20;   // callers clamp to the table size by default
    bool augment_negatives = true; // answer every sampled class, <NEG> for absent ones
    bool order_consistent = true;  // response order follows the query; off = canonical order
    std::size_t template_id = 0;
    std::uint64_t seed = 0;
};

/// One (query, response, ordered seg targets) triple. seg_target_ids holds
/// one class id per <SEG> occurrence, in occurrence order.
struct TrainingSample {
    std::string image_id;
    std::string query;
    std::string response;
    std::vector<ClassId> seg_target_ids;
};

struct BuiltResponse {
    std::string text;
    std::vector<ClassId> seg_target_ids;
};

/// Validates min/max against the table size; throws ValidationError.
void validate_config(const BuilderConfig& cfg, const CategoryTable& table);

/// Draws a query class list: length uniform in [min_sample, max_sample], ids
/// uniform without replacement from the full table, returned in the sampled
/// (shuffled) order. No guarantee of covering the image's present classes.
std::vector<ClassId> sample_class_list(const CategoryTable& table, const ImageRecord& record,
                                       const BuilderConfig& cfg, Rng& rng);

/// Response text for a sampled list. With augmentation every sampled class
/// appears exactly once, tagged <SEG> when present and <NEG> otherwise;
/// without it only present classes appear. Items are comma-separated with a
/// trailing '.'. When nothing qualifies, the fixed empty-positive sentence is
/// returned with no seg targets.
BuiltResponse build_response(std::span<const ClassId> sampled_ids, const ImageRecord& record,
                             const CategoryTable& table, const BuilderConfig& cfg);

/// Full complex-query sample for one image.
TrainingSample build_sample(const ImageRecord& record, const CategoryTable& table,
                            const BuilderConfig& cfg, Rng& rng);

/// Baseline mode: one randomly chosen present class, response "{name}<SEG>.".
/// Throws ValidationError when the image has no present classes.
TrainingSample build_single_target_sample(const ImageRecord& record, const CategoryTable& table,
                                          std::size_t template_id, Rng& rng);

enum class SampleMode { ComplexQuery, SingleTarget };

/// Emits samples_per_image samples per image in manifest order. Each image
/// draws from its own rng stream derived from (cfg.seed, image_id), so the
/// output is a pure function of (manifest, cfg, samples_per_image).
void build_dataset(const Manifest& manifest, const BuilderConfig& cfg,
                   std::size_t samples_per_image, SampleMode mode,
                   const std::function<void(const TrainingSample&)>& sink);

/// Training JSONL line: {"image_id", "query", "response", "seg_targets"}.
std::string to_jsonl(const TrainingSample& sample);
TrainingSample training_sample_from_jsonl(std::string_view line);

}  // namespace segquery
