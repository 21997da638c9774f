#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "segquery/label_map.hpp"
#include "segquery/mask.hpp"
#include "segquery/orchestrator.hpp"

namespace segquery {

struct ClassCounts {
    std::uint64_t intersection = 0;
    std::uint64_t union_ = 0;
};

/// Running sums for mIoU (per class), cIoU (global), and gIoU (per image).
/// Accumulators are plain values: merge() is associative, so datasets may be
/// accumulated in any split and combined afterwards.
struct MetricAccumulator {
    std::map<ClassId, ClassCounts> per_class;
    std::uint64_t cum_intersection = 0;
    std::uint64_t cum_union = 0;
    std::vector<double> per_image_ious;

    void merge(const MetricAccumulator& other);
};

/// Updates per-class intersection/union for every id in eval_ids. Classes the
/// prediction answered <NEG> or left unanswered count as empty masks. Pixels
/// labelled kIgnoreId are excluded from both intersection and union.
void accumulate_semantic(MetricAccumulator& acc, const MergedPrediction& pred, const LabelMap& gt,
                         std::span<const ClassId> eval_ids);

/// Records one referring sample: cumulative sums for cIoU plus the sample's
/// own IoU for gIoU. Empty/empty scores 1.0 for gIoU and adds (0,0) to cIoU.
void accumulate_referring(MetricAccumulator& acc, const BinaryMask& pred, const BinaryMask& gt);

/// Mean of per-class IoU, skipping classes whose union is zero. Returns
/// nullopt when every evaluated class has zero union.
std::optional<double> finalize_miou(const MetricAccumulator& acc);

double finalize_ciou(const MetricAccumulator& acc);
double finalize_giou(const MetricAccumulator& acc);

/// Per-class IoU for classes with nonzero union (mIoU breakdown).
std::map<ClassId, double> per_class_iou(const MetricAccumulator& acc);

}  // namespace segquery
