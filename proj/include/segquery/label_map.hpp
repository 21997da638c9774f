#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "segquery/category.hpp"
#include "segquery/mask.hpp"

namespace segquery {

/// Row-major class-id pixel grid; rows = height, cols = width.
using LabelGrid = Eigen::Array<ClassId, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-pixel class-id image used as semantic segmentation ground truth.
/// Pixels holding kIgnoreId are excluded from evaluation.
class LabelMap {
public:
    LabelMap() : grid_(0, 0) {}
    explicit LabelMap(LabelGrid grid) : grid_(std::move(grid)) {}

    std::uint32_t width() const { return static_cast<std::uint32_t>(grid_.cols()); }
    std::uint32_t height() const { return static_cast<std::uint32_t>(grid_.rows()); }
    const LabelGrid& grid() const { return grid_; }

    /// Binarization of the grid for one class.
    BinaryMask class_mask(ClassId id) const { return grid_ == id; }

    /// Sorted distinct non-ignore ids occurring in the grid.
    std::vector<ClassId> present_ids() const;

private:
    LabelGrid grid_;
};

// On-disk format: magic "LSEG", then width and height as unsigned 32-bit
// little-endian, then width*height unsigned 16-bit little-endian class ids in
// row-major order.

LabelMap read_label_map(const std::filesystem::path& path);
void write_label_map(const std::filesystem::path& path, const LabelMap& map);

}  // namespace segquery
