#include "segquery/loss.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "segquery/errors.hpp"

namespace segquery {

namespace {

constexpr double kProbFloor = 1e-12;

}  // namespace

void TokenBatch::validate() const {
    const auto positions = static_cast<std::size_t>(distributions.rows());
    if (targets.size() != positions || supervised.size() != positions) {
        throw ValidationError("token batch: " + std::to_string(positions) + " distributions, " +
                              std::to_string(targets.size()) + " targets, " +
                              std::to_string(supervised.size()) + " supervised flags");
    }
    const auto vocab = static_cast<std::size_t>(distributions.cols());
    for (std::size_t i = 0; i < positions; ++i) {
        if (targets[i] >= vocab) {
            throw ValidationError("token batch: position " + std::to_string(i) + " target " +
                                  std::to_string(targets[i]) + " outside vocabulary of " +
                                  std::to_string(vocab));
        }
        const double sum = distributions.row(static_cast<Eigen::Index>(i)).sum();
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ValidationError("token batch: position " + std::to_string(i) +
                                  " distribution sums to " + std::to_string(sum));
        }
    }
}

void MaskPair::validate() const {
    if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) {
        throw ValidationError("mask pair: prediction is " + std::to_string(pred.cols()) + "x" +
                              std::to_string(pred.rows()) + " but ground truth is " +
                              std::to_string(gt.cols()) + "x" + std::to_string(gt.rows()));
    }
    if ((pred < 0.0).any() || (pred > 1.0).any()) {
        throw ValidationError("mask pair: predicted probabilities outside [0, 1]");
    }
}

double text_ce(const TokenBatch& batch) {
    batch.validate();
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < batch.targets.size(); ++i) {
        if (!batch.supervised[i]) {
            continue;
        }
        const double p = batch.distributions(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(batch.targets[i]));
        sum += -std::log(std::max(p, kProbFloor));
        ++counted;
    }
    if (counted == 0) {
        std::cerr << "warning: token batch has no supervised positions; text loss is 0\n";
        return 0.0;
    }
    return sum / static_cast<double>(counted);
}

double bce(const MaskPair& pair) {
    pair.validate();
    if (pair.pred.size() == 0) {
        return 0.0;
    }
    // The clamp floors each log argument separately so that a hard-correct
    // pixel contributes exactly 0 rather than -log(1 - 1e-12).
    const auto& p = pair.pred;
    const auto g = pair.gt.cast<double>();
    return (-(g * p.max(kProbFloor).log() + (1.0 - g) * (1.0 - p).max(kProbFloor).log())).mean();
}

double dice(const MaskPair& pair, double eps) {
    pair.validate();
    if (eps <= 0.0) {
        throw ValidationError("dice epsilon must be positive");
    }
    const auto g = pair.gt.cast<double>();
    const double overlap = (pair.pred * g).sum();
    return 1.0 - (2.0 * overlap + eps) / (pair.pred.sum() + g.sum() + eps);
}

LossBreakdown total_loss(const TokenBatch& batch, std::span<const MaskPair> pairs,
                         const LossWeights& weights) {
    if (weights.lambda_bce < 0.0 || weights.lambda_dice < 0.0) {
        throw ValidationError("loss weights must be nonnegative");
    }
    LossBreakdown out;
    out.text_ce = text_ce(batch);
    if (!pairs.empty()) {
        double bce_sum = 0.0;
        double dice_sum = 0.0;
        for (const MaskPair& pair : pairs) {
            bce_sum += bce(pair);
            dice_sum += dice(pair, weights.dice_epsilon);
        }
        out.bce = bce_sum / static_cast<double>(pairs.size());
        out.dice = dice_sum / static_cast<double>(pairs.size());
    }
    out.total = out.text_ce + weights.lambda_bce * out.bce + weights.lambda_dice * out.dice;
    return out;
}

namespace {

ProbGrid grid_from_json(const nlohmann::json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty()) {
        throw ValidationError("loss fixture: " + what + " must be a nonempty 2d array");
    }
    const std::size_t height = rows.size();
    const std::size_t width = rows[0].size();
    ProbGrid grid(static_cast<Eigen::Index>(height), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < height; ++r) {
        if (!rows[r].is_array() || rows[r].size() != width) {
            throw ValidationError("loss fixture: " + what + " row " + std::to_string(r) +
                                  " is ragged");
        }
        for (std::size_t c = 0; c < width; ++c) {
            grid(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c].get<double>();
        }
    }
    return grid;
}

BinaryMask mask_from_json(const nlohmann::json& rows, const std::string& what) {
    ProbGrid grid = grid_from_json(rows, what);
    if (((grid != 0.0) && (grid != 1.0)).any()) {
        throw ValidationError("loss fixture: " + what + " must contain only 0 and 1");
    }
    return grid != 0.0;
}

}  // namespace

LossFixture loss_fixture_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("loss fixture: ") + e.what());
    }
    LossFixture fixture;
    try {
        if (doc.contains("weights")) {
            const auto& w = doc["weights"];
            fixture.weights.lambda_bce = w.value("lambda_bce", 1.0);
            fixture.weights.lambda_dice = w.value("lambda_dice", 0.5);
            fixture.weights.dice_epsilon = w.value("dice_epsilon", 1.0);
        }
        const auto& batch = doc.at("token_batch");
        fixture.batch.distributions = grid_from_json(batch.at("distributions"), "distributions");
        fixture.batch.targets = batch.at("targets").get<std::vector<std::size_t>>();
        fixture.batch.supervised = batch.at("supervised").get<std::vector<bool>>();
        for (const auto& entry : doc.value("mask_pairs", nlohmann::json::array())) {
            MaskPair pair;
            pair.pred = grid_from_json(entry.at("pred"), "pred");
            pair.gt = mask_from_json(entry.at("gt"), "gt");
            pair.validate();
            fixture.pairs.push_back(std::move(pair));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("loss fixture: ") + e.what());
    }
    fixture.batch.validate();
    return fixture;
}

LossFixture load_loss_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open loss fixture '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return loss_fixture_from_json(buffer.str());
}

}  // namespace segquery
