#include "segquery/orchestrator.hpp"

#include <thread>

#include <json.hpp>

#include "segquery/errors.hpp"
#include "segquery/parallel.hpp"
#include "segquery/parser.hpp"
#include "segquery/templates.hpp"

namespace segquery {

std::string_view outcome_name(Outcome outcome) {
    switch (outcome) {
        case Outcome::Seg:
            return "seg";
        case Outcome::Neg:
            return "neg";
        case Outcome::Unanswered:
            return "unanswered";
    }
    return "unanswered";
}

Outcome outcome_from_name(std::string_view name) {
    if (name == "seg") {
        return Outcome::Seg;
    }
    if (name == "neg") {
        return Outcome::Neg;
    }
    if (name == "unanswered") {
        return Outcome::Unanswered;
    }
    throw ValidationError("unknown outcome '" + std::string(name) + "'");
}

const ClassPrediction* MergedPrediction::find(ClassId id) const {
    auto it = classes.find(id);
    return it == classes.end() ? nullptr : &it->second;
}

namespace {

std::size_t count_occurrences(std::string_view text, std::string_view token) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(token); pos != std::string_view::npos;
         pos = text.find(token, pos + token.size())) {
        ++count;
    }
    return count;
}

EndpointReply submit_with_retries(ModelEndpoint& endpoint, const std::string& image_id,
                                  const std::string& query, std::size_t chunk_index,
                                  const OrchestratorConfig& config) {
    auto delay = config.backoff_base;
    for (unsigned attempt = 0;; ++attempt) {
        try {
            return endpoint.submit(image_id, query);
        } catch (const TransportError& e) {
            if (attempt >= config.retries) {
                throw TransportError("chunk " + std::to_string(chunk_index) + ": " + e.what() +
                                     " (after " + std::to_string(attempt + 1) + " attempts)");
            }
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
}

struct ChunkResult {
    EndpointReply reply;
    ParseReport report;
};

}  // namespace

MergedPrediction run_chunked(const std::string& image_id, std::span<const ClassId> ids,
                             const CategoryTable& table, ModelEndpoint& endpoint,
                             const OrchestratorConfig& config) {
    ChunkPlan plan = plan_chunks(ids, config.chunk_spec);
    std::vector<ChunkResult> results(plan.chunks.size());
    std::vector<std::vector<std::string>> chunk_names(plan.chunks.size());
    for (std::size_t c = 0; c < plan.chunks.size(); ++c) {
        for (ClassId id : plan.chunks[c]) {
            chunk_names[c].push_back(table.name_of(id));
        }
    }

    parallel_for(plan.chunks.size(), config.jobs, [&](std::size_t c) {
        const std::string query = build_query(chunk_names[c], config.template_id);
        EndpointReply reply = submit_with_retries(endpoint, image_id, query, c, config);
        const std::size_t seg_count = count_occurrences(reply.text, kSegToken);
        if (seg_count != reply.masks.size()) {
            throw ValidationError("chunk " + std::to_string(c) + ": endpoint returned " +
                                  std::to_string(reply.masks.size()) + " masks for " +
                                  std::to_string(seg_count) + " <SEG> tokens");
        }
        results[c].report = parse_response(reply.text, chunk_names[c], table);
        results[c].reply = std::move(reply);
    });

    // Merge, keyed by class id. Chunks are disjoint by plan invariant, so
    // each queried class is owned by exactly one chunk. Response names that
    // resolve outside the chunk's query stay in the parser's `extra` list and
    // never enter the merge. Duplicate mentions bind to the first occurrence.
    MergedPrediction merged;
    for (std::size_t c = 0; c < plan.chunks.size(); ++c) {
        const auto& report = results[c].report;
        const auto& masks = results[c].reply.masks;
        for (ClassId id : plan.chunks[c]) {
            ClassPrediction prediction;
            prediction.chunk_index = c;
            for (const auto& item : report.items) {
                if (!item.resolved_id || *item.resolved_id != id) {
                    continue;
                }
                if (item.tag == ItemTag::Seg) {
                    prediction.outcome = Outcome::Seg;
                    const EndpointMask& wire = masks.at(*item.seg_index);
                    prediction.mask = rle_decode(rle_from_text(wire.rle), wire.width, wire.height);
                } else {
                    prediction.outcome = Outcome::Neg;
                }
                break;  // first occurrence wins
            }
            merged.classes.emplace(id, std::move(prediction));
        }
    }
    return merged;
}

void write_predictions(std::ostream& out, const std::string& image_id,
                       std::span<const ClassId> ids, const MergedPrediction& merged) {
    for (ClassId id : ids) {
        const ClassPrediction* prediction = merged.find(id);
        nlohmann::ordered_json line;
        line["image_id"] = image_id;
        line["class_id"] = id;
        line["outcome"] =
            std::string(outcome_name(prediction ? prediction->outcome : Outcome::Unanswered));
        if (prediction && prediction->mask) {
            line["rle"] = rle_to_text(rle_encode(*prediction->mask));
        } else {
            line["rle"] = nullptr;
        }
        out << line.dump() << '\n';
    }
}

PredictionRow prediction_row_from_jsonl(std::string_view line) {
    PredictionRow row;
    try {
        auto doc = nlohmann::json::parse(line);
        row.image_id = doc.at("image_id").get<std::string>();
        const auto id = doc.at("class_id").get<std::int64_t>();
        if (id < 0 || id >= kIgnoreId) {
            throw ValidationError("prediction line: class id " + std::to_string(id) +
                                  " out of range");
        }
        row.class_id = static_cast<ClassId>(id);
        row.outcome = outcome_from_name(doc.at("outcome").get<std::string>());
        if (!doc.at("rle").is_null()) {
            row.rle = doc.at("rle").get<std::string>();
        }
        if (row.outcome == Outcome::Seg && !row.rle) {
            throw ValidationError("prediction line: outcome 'seg' requires an rle mask");
        }
        if (row.outcome != Outcome::Seg && row.rle) {
            throw ValidationError("prediction line: non-seg outcome must not carry a mask");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("prediction line: ") + e.what());
    }
    return row;
}

}  // namespace segquery
