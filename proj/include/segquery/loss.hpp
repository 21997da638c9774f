#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "segquery/mask.hpp"

namespace segquery {

using ProbGrid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Weighted-sum coefficients for the training objective
///   L = L_text + lambda_bce * L_bce + lambda_dice * L_dice.
struct LossWeights {
    double lambda_bce = 1.0;
    double lambda_dice = 0.5;
    double dice_epsilon = 1.0;
};

/// Next-token distributions for one sample: one row per position over a
/// shared vocabulary, plus the target id and supervision flag per position.
struct TokenBatch {
    ProbGrid distributions;            // positions x vocab
    std::vector<std::size_t> targets;  // one per position
    std::vector<bool> supervised;      // one per position

    /// Throws ValidationError unless sizes line up, targets are in range,
    /// and every row sums to 1 within 1e-9.
    void validate() const;
};

struct MaskPair {
    ProbGrid pred;  // per-pixel probabilities in [0,1]
    BinaryMask gt;

    void validate() const;
};

struct LossBreakdown {
    double text_ce = 0.0;
    double bce = 0.0;
    double dice = 0.0;
    double total = 0.0;
};

/// Mean of -log p(target) over supervised positions, p floored at 1e-12.
/// Zero supervised positions yields 0 (with a stderr warning).
double text_ce(const TokenBatch& batch);

/// Mean per-pixel binary cross-entropy, probabilities clamped to
/// [1e-12, 1 - 1e-12].
double bce(const MaskPair& pair);

/// Smoothed soft dice loss: 1 - (2*sum(p*g) + eps) / (sum(p) + sum(g) + eps).
double dice(const MaskPair& pair, double eps);

/// text_ce + lambda_bce * mean(bce) + lambda_dice * mean(dice); an empty pair
/// list contributes zero mask loss (text-only samples).
LossBreakdown total_loss(const TokenBatch& batch, std::span<const MaskPair> pairs,
                         const LossWeights& weights = {});

struct LossFixture {
    TokenBatch batch;
    std::vector<MaskPair> pairs;
    LossWeights weights;
};

/// Parses the JSON fixture format documented in docs/formats.md.
LossFixture load_loss_fixture(const std::filesystem::path& path);
LossFixture loss_fixture_from_json(const std::string& text);

}  // namespace segquery
