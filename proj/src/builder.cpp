#include "segquery/builder.hpp"

#include <algorithm>

#include <json.hpp>

#include "segquery/errors.hpp"
#include "segquery/templates.hpp"

namespace segquery {

void validate_config(const BuilderConfig& cfg, const CategoryTable& table) {
    if (cfg.min_sample < 1) {
        throw ValidationError("builder config: min_sample must be >= 1");
    }
    if (cfg.max_sample < cfg.min_sample) {
        throw ValidationError("builder config: max_sample < min_sample");
    }
    if (cfg.max_sample > table.size()) {
        throw ValidationError("builder config: max_sample " + std::to_string(cfg.max_sample) +
                              " exceeds category table size " + std::to_string(table.size()));
    }
    if (cfg.template_id >= template_count()) {
        throw ValidationError("builder config: template id out of range");
    }
}

std::vector<ClassId> sample_class_list(const CategoryTable& table, const ImageRecord& record,
                                       const BuilderConfig& cfg, Rng& rng) {
    (void)record;  // presence is deliberately ignored when sampling
    validate_config(cfg, table);
    const std::size_t k =
        cfg.min_sample + static_cast<std::size_t>(rng.below(cfg.max_sample - cfg.min_sample + 1));
    std::vector<ClassId> ids;
    ids.reserve(table.size());
    for (const auto& entry : table.entries()) {
        ids.push_back(entry.id);
    }
    // Partial Fisher-Yates: the first k slots end up as a uniform
    // without-replacement draw, already in shuffled order.
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(k);
    return ids;
}

BuiltResponse build_response(std::span<const ClassId> sampled_ids, const ImageRecord& record,
                             const CategoryTable& table, const BuilderConfig& cfg) {
    if (sampled_ids.empty()) {
        throw ValidationError("build_response: empty sampled list");
    }
    std::vector<ClassId> ordered(sampled_ids.begin(), sampled_ids.end());
    if (!cfg.order_consistent) {
        std::sort(ordered.begin(), ordered.end(), [&](ClassId a, ClassId b) {
            return table.canonical_index(a).value() < table.canonical_index(b).value();
        });
    }

    BuiltResponse out;
    bool first = true;
    for (ClassId id : ordered) {
        const bool present = record.is_present(id);
        if (!cfg.augment_negatives && !present) {
            continue;
        }
        if (!first) {
            out.text += ',';
        }
        first = false;
        out.text += table.name_of(id);
        out.text += present ? kSegToken : kNegToken;
        if (present) {
            out.seg_target_ids.push_back(id);
        }
    }
    if (first) {
        // Augmentation off and nothing present: fixed zero-<SEG> sentence.
        out.text = std::string(kEmptyPositiveResponse);
        return out;
    }
    out.text += '.';
    return out;
}

TrainingSample build_sample(const ImageRecord& record, const CategoryTable& table,
                            const BuilderConfig& cfg, Rng& rng) {
    std::vector<ClassId> sampled = sample_class_list(table, record, cfg, rng);
    std::vector<std::string> names;
    names.reserve(sampled.size());
    for (ClassId id : sampled) {
        names.push_back(table.name_of(id));
    }
    TrainingSample sample;
    sample.image_id = record.image_id;
    sample.query = build_query(names, cfg.template_id);
    BuiltResponse response = build_response(sampled, record, table, cfg);
    sample.response = std::move(response.text);
    sample.seg_target_ids = std::move(response.seg_target_ids);
    return sample;
}

TrainingSample build_single_target_sample(const ImageRecord& record, const CategoryTable& table,
                                          std::size_t template_id, Rng& rng) {
    if (record.present_ids.empty()) {
        throw ValidationError("image '" + record.image_id + "': no present classes to query");
    }
    const ClassId id =
        record.present_ids[static_cast<std::size_t>(rng.below(record.present_ids.size()))];
    const std::string& name = table.name_of(id);
    TrainingSample sample;
    sample.image_id = record.image_id;
    sample.query = build_query({name}, template_id);
    sample.response = name + std::string(kSegToken) + ".";
    sample.seg_target_ids = {id};
    return sample;
}

void build_dataset(const Manifest& manifest, const BuilderConfig& cfg,
                   std::size_t samples_per_image, SampleMode mode,
                   const std::function<void(const TrainingSample&)>& sink) {
    validate_config(cfg, manifest.table);
    for (const auto& record : manifest.images) {
        Rng rng = derive_rng(cfg.seed, record.image_id);
        for (std::size_t s = 0; s < samples_per_image; ++s) {
            sink(mode == SampleMode::SingleTarget
                     ? build_single_target_sample(record, manifest.table, cfg.template_id, rng)
                     : build_sample(record, manifest.table, cfg, rng));
        }
    }
}

std::string to_jsonl(const TrainingSample& sample) {
    nlohmann::ordered_json line;
    line["image_id"] = sample.image_id;
    line["query"] = sample.query;
    line["response"] = sample.response;
    line["seg_targets"] = sample.seg_target_ids;
    return line.dump();
}

TrainingSample training_sample_from_jsonl(std::string_view line) {
    TrainingSample sample;
    try {
        auto doc = nlohmann::json::parse(line);
        sample.image_id = doc.at("image_id").get<std::string>();
        sample.query = doc.at("query").get<std::string>();
        sample.response = doc.at("response").get<std::string>();
        sample.seg_target_ids = doc.at("seg_targets").get<std::vector<ClassId>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("training sample line: ") + e.what());
    }
    return sample;
}

}  // namespace segquery
