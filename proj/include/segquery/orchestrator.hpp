#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "segquery/chunking.hpp"
#include "segquery/endpoint.hpp"
#include "segquery/mask.hpp"

namespace segquery {

enum class Outcome { Seg, Neg, Unanswered };

std::string_view outcome_name(Outcome outcome);
Outcome outcome_from_name(std::string_view name);

struct ClassPrediction {
    Outcome outcome = Outcome::Unanswered;
    std::optional<BinaryMask> mask;         // set iff outcome == Seg
    std::optional<std::size_t> chunk_index; // which sub-query covered the class
};

/// Deterministic merge of all per-chunk answers for one image, keyed by
/// class id. Chunks are disjoint, so no class can receive conflicting
/// outcomes; classes the model never mentioned stay Unanswered.
struct MergedPrediction {
    std::map<ClassId, ClassPrediction> classes;

    const ClassPrediction* find(ClassId id) const;
};

struct OrchestratorConfig {
    ChunkSpec chunk_spec;
    std::size_t template_id = 0;
    unsigned retries = 2;  // per chunk, on transport failure
    std::chrono::milliseconds backoff_base{100};
    std::size_t jobs = 1;  // concurrent chunk dispatch limit
};

/// Plans chunks over ids, submits one query per chunk, parses each response,
/// and merges per-class outcomes with decoded masks. The merge is a pure
/// reduction over (chunk index -> parsed result): dispatch order and
/// completion order never influence the result. Transport failures are
/// retried with exponential backoff, then surfaced with the chunk index, as
/// are endpoint replies whose mask count disagrees with their <SEG> count.
MergedPrediction run_chunked(const std::string& image_id, std::span<const ClassId> ids,
                             const CategoryTable& table, ModelEndpoint& endpoint,
                             const OrchestratorConfig& config);

/// Prediction JSONL: one line per (image, class) in the given class order:
/// {"image_id": str, "class_id": int, "outcome": "seg"|"neg"|"unanswered",
///  "rle": str|null}.
void write_predictions(std::ostream& out, const std::string& image_id,
                       std::span<const ClassId> ids, const MergedPrediction& merged);

struct PredictionRow {
    std::string image_id;
    ClassId class_id = 0;
    Outcome outcome = Outcome::Unanswered;
    std::optional<std::string> rle;
};

PredictionRow prediction_row_from_jsonl(std::string_view line);

}  // namespace segquery
