#include "segquery/metrics.hpp"

#include <numeric>

#include "segquery/errors.hpp"

namespace segquery {

void MetricAccumulator::merge(const MetricAccumulator& other) {
    for (const auto& [id, counts] : other.per_class) {
        auto& mine = per_class[id];
        mine.intersection += counts.intersection;
        mine.union_ += counts.union_;
    }
    cum_intersection += other.cum_intersection;
    cum_union += other.cum_union;
    per_image_ious.insert(per_image_ious.end(), other.per_image_ious.begin(),
                          other.per_image_ious.end());
}

void accumulate_semantic(MetricAccumulator& acc, const MergedPrediction& pred, const LabelMap& gt,
                         std::span<const ClassId> eval_ids) {
    const auto valid = (gt.grid() != kIgnoreId).eval();
    for (ClassId id : eval_ids) {
        const BinaryMask gt_mask = gt.class_mask(id);
        const ClassPrediction* cp = pred.find(id);
        auto& counts = acc.per_class[id];
        if (cp && cp->mask) {
            const BinaryMask& pm = *cp->mask;
            if (pm.rows() != gt_mask.rows() || pm.cols() != gt_mask.cols()) {
                throw ValidationError("predicted mask for class " + std::to_string(id) + " is " +
                                      std::to_string(pm.cols()) + "x" + std::to_string(pm.rows()) +
                                      " but label map is " + std::to_string(gt_mask.cols()) + "x" +
                                      std::to_string(gt_mask.rows()));
            }
            counts.intersection += static_cast<std::uint64_t>((pm && gt_mask && valid).count());
            counts.union_ += static_cast<std::uint64_t>(((pm || gt_mask) && valid).count());
        } else {
            counts.union_ += static_cast<std::uint64_t>((gt_mask && valid).count());
        }
    }
}

void accumulate_referring(MetricAccumulator& acc, const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) {
        throw ValidationError("referring sample: prediction is " + std::to_string(pred.cols()) +
                              "x" + std::to_string(pred.rows()) + " but ground truth is " +
                              std::to_string(gt.cols()) + "x" + std::to_string(gt.rows()));
    }
    const auto i = static_cast<std::uint64_t>(intersection_count(pred, gt));
    const auto u = static_cast<std::uint64_t>(union_count(pred, gt));
    acc.cum_intersection += i;
    acc.cum_union += u;
    acc.per_image_ious.push_back(u == 0 ? 1.0
                                        : static_cast<double>(i) / static_cast<double>(u));
}

std::optional<double> finalize_miou(const MetricAccumulator& acc) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& [id, counts] : acc.per_class) {
        if (counts.union_ == 0) {
            continue;
        }
        sum += static_cast<double>(counts.intersection) / static_cast<double>(counts.union_);
        ++counted;
    }
    if (counted == 0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(counted);
}

double finalize_ciou(const MetricAccumulator& acc) {
    if (acc.cum_union == 0) {
        return 1.0;
    }
    return static_cast<double>(acc.cum_intersection) / static_cast<double>(acc.cum_union);
}

double finalize_giou(const MetricAccumulator& acc) {
    if (acc.per_image_ious.empty()) {
        return 1.0;
    }
    const double sum = std::accumulate(acc.per_image_ious.begin(), acc.per_image_ious.end(), 0.0);
    return sum / static_cast<double>(acc.per_image_ious.size());
}

std::map<ClassId, double> per_class_iou(const MetricAccumulator& acc) {
    std::map<ClassId, double> out;
    for (const auto& [id, counts] : acc.per_class) {
        if (counts.union_ == 0) {
            continue;
        }
        out[id] = static_cast<double>(counts.intersection) / static_cast<double>(counts.union_);
    }
    return out;
}

}  // namespace segquery
