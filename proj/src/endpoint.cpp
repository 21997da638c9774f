#include "segquery/endpoint.hpp"

#include <algorithm>

#include "segquery/errors.hpp"
#include "segquery/rng.hpp"
#include "segquery/templates.hpp"

namespace segquery {

bool oracle_drops(std::uint64_t seed, std::string_view image_id, ClassId class_id,
                  double drop_probability) {
    if (drop_probability <= 0.0) {
        return false;
    }
    const std::uint64_t h = mix64(mix64(seed, fnv1a64(image_id)), class_id);
    return unit_from_hash(h) < drop_probability;
}

OracleEndpoint::OracleEndpoint(const Manifest& manifest, OracleOptions options)
    : manifest_(manifest), options_(options) {
    for (const auto& record : manifest_.images) {
        label_maps_.emplace(record.image_id, load_label_map(manifest_, record));
    }
}

EndpointReply OracleEndpoint::submit(const std::string& image_id, const std::string& query) {
    const ImageRecord* record = manifest_.find_image(image_id);
    if (record == nullptr) {
        throw ValidationError("oracle: unknown image id '" + image_id + "'");
    }
    auto names = extract_query_names(query);
    if (!names) {
        throw ValidationError("oracle: query does not match any known template: " + query);
    }
    const LabelMap& map = label_maps_.at(image_id);

    struct Item {
        std::string name;
        ClassId id = 0;
        bool positive = false;
    };
    std::vector<Item> items;
    for (const auto& name : *names) {
        Item item;
        item.name = name;
        auto resolution = manifest_.table.resolve(name);
        if (resolution.id && record->is_present(*resolution.id)) {
            if (oracle_drops(options_.seed, image_id, *resolution.id, options_.drop_probability)) {
                continue;  // simulated incomplete prediction: class never mentioned
            }
            item.id = *resolution.id;
            item.positive = true;
        }
        items.push_back(std::move(item));
    }

    if (options_.shuffle_order) {
        Rng rng(mix64(mix64(options_.seed, fnv1a64(image_id)), fnv1a64(query)));
        rng.shuffle(items);
    }

    EndpointReply reply;
    if (items.empty()) {
        reply.text = std::string(kEmptyPositiveResponse);
        return reply;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            reply.text += ',';
        }
        reply.text += items[i].name;
        reply.text += items[i].positive ? kSegToken : kNegToken;
        if (items[i].positive) {
            EndpointMask mask;
            mask.width = map.width();
            mask.height = map.height();
            mask.rle = rle_to_text(rle_encode(map.class_mask(items[i].id)));
            reply.masks.push_back(std::move(mask));
        }
    }
    reply.text += '.';
    return reply;
}

}  // namespace segquery
