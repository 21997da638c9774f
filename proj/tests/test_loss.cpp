#include <doctest.h>

#include <cmath>

#include "segquery/errors.hpp"
#include "segquery/loss.hpp"
#include "support.hpp"

using namespace segquery;

namespace {

TokenBatch one_position(double p_target) {
    TokenBatch batch;
    batch.distributions.resize(1, 2);
    batch.distributions << p_target, 1.0 - p_target;
    batch.targets = {0};
    batch.supervised = {true};
    return batch;
}

ProbGrid constant_grid(Eigen::Index rows, Eigen::Index cols, double value) {
    ProbGrid grid(rows, cols);
    grid.setConstant(value);
    return grid;
}

ProbGrid random_probs(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    ProbGrid grid(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            grid(r, c) = rng.unit();
        }
    }
    return grid;
}

double bce_oracle(const MaskPair& pair) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < pair.pred.rows(); ++r) {
        for (Eigen::Index c = 0; c < pair.pred.cols(); ++c) {
            const double p = pair.pred(r, c);
            const double g = pair.gt(r, c) ? 1.0 : 0.0;
            sum += -(g * std::log(std::max(p, 1e-12)) +
                     (1.0 - g) * std::log(std::max(1.0 - p, 1e-12)));
        }
    }
    return sum / static_cast<double>(pair.pred.size());
}

double dice_oracle(const MaskPair& pair, double eps) {
    double overlap = 0.0;
    double p_sum = 0.0;
    double g_sum = 0.0;
    for (Eigen::Index r = 0; r < pair.pred.rows(); ++r) {
        for (Eigen::Index c = 0; c < pair.pred.cols(); ++c) {
            const double p = pair.pred(r, c);
            const double g = pair.gt(r, c) ? 1.0 : 0.0;
            overlap += p * g;
            p_sum += p;
            g_sum += g;
        }
    }
    return 1.0 - (2.0 * overlap + eps) / (p_sum + g_sum + eps);
}

}  // namespace

TEST_SUITE("loss") {

TEST_CASE("zero cases are exactly zero") {
    CHECK(text_ce(one_position(1.0)) == 0.0);

    Rng rng(3);
    MaskPair hard;
    hard.gt = testsupport::random_mask(rng, 6, 6);
    hard.pred = hard.gt.cast<double>();
    CHECK(bce(hard) == 0.0);
    CHECK(dice(hard, 1.0) == 0.0);

    MaskPair both_empty;
    both_empty.pred = constant_grid(4, 4, 0.0);
    both_empty.gt = BinaryMask::Constant(4, 4, false);
    CHECK(bce(both_empty) == 0.0);
    CHECK(dice(both_empty, 1.0) == 0.0);

    const std::vector<MaskPair> pairs{hard};
    const LossBreakdown perfect = total_loss(one_position(1.0), pairs, LossWeights{});
    CHECK(perfect.text_ce == 0.0);
    CHECK(perfect.bce == 0.0);
    CHECK(perfect.dice == 0.0);
    CHECK(perfect.total == 0.0);
}

TEST_CASE("closed-form values") {
    const double ln2 = 0.6931471805599453;

    SUBCASE("half-probability target costs ln 2") {
        CHECK(text_ce(one_position(0.5)) == ln2);
    }
    SUBCASE("uniform 0.5 mask costs ln 2 regardless of ground truth") {
        Rng rng(9);
        MaskPair pair;
        pair.pred = constant_grid(5, 7, 0.5);
        pair.gt = testsupport::random_mask(rng, 5, 7);
        CHECK(bce(pair) == doctest::Approx(ln2).epsilon(1e-12));
    }
    SUBCASE("all-wrong dice on four pixels with unit smoothing") {
        MaskPair pair;
        pair.pred = constant_grid(2, 2, 0.0);
        pair.gt = BinaryMask::Constant(2, 2, true);
        CHECK(dice(pair, 1.0) == 1.0 - 1.0 / 5.0);
        CHECK(dice(pair, 1.0) == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("zero-probability target hits the clamp floor") {
        CHECK(text_ce(one_position(0.0)) == -std::log(1e-12));
        CHECK(text_ce(one_position(0.0)) == doctest::Approx(27.631021115928547).epsilon(1e-12));
    }
}

TEST_CASE("unsupervised batches cost nothing") {
    TokenBatch batch = one_position(0.25);
    batch.supervised = {false};
    CHECK(text_ce(batch) == 0.0);
}

TEST_CASE("total loss composes per the weighted sum") {
    MaskPair pair;
    pair.pred = constant_grid(2, 2, 0.0);
    pair.gt = BinaryMask::Constant(2, 2, true);
    const std::vector<MaskPair> pairs{pair};

    SUBCASE("reference arithmetic") {
        const LossBreakdown out = total_loss(one_position(0.5), pairs, LossWeights{});
        CHECK(out.total ==
              doctest::Approx(out.text_ce + 1.0 * out.bce + 0.5 * out.dice).epsilon(1e-15));
        CHECK(out.dice == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("zero weights degenerate to the text loss") {
        LossWeights weights;
        weights.lambda_bce = 0.0;
        weights.lambda_dice = 0.0;
        const LossBreakdown out = total_loss(one_position(0.25), pairs, weights);
        CHECK(out.total == out.text_ce);
        CHECK(out.total == text_ce(one_position(0.25)));
    }
    SUBCASE("no mask pairs means no mask loss") {
        const LossBreakdown out = total_loss(one_position(0.5), {}, LossWeights{});
        CHECK(out.bce == 0.0);
        CHECK(out.dice == 0.0);
        CHECK(out.total == out.text_ce);
    }
    SUBCASE("several pairs aggregate by mean") {
        MaskPair perfect;
        perfect.gt = BinaryMask::Constant(2, 2, true);
        perfect.pred = perfect.gt.cast<double>();
        const std::vector<MaskPair> two{pair, perfect};
        const LossBreakdown out = total_loss(one_position(1.0), two, LossWeights{});
        CHECK(out.dice == doctest::Approx((0.8 + 0.0) / 2.0).epsilon(1e-12));
        CHECK(out.bce == doctest::Approx(bce(pair) / 2.0).epsilon(1e-12));
    }
    SUBCASE("negative weights are rejected") {
        LossWeights weights;
        weights.lambda_bce = -0.1;
        CHECK_THROWS_WITH_AS((void)total_loss(one_position(0.5), pairs, weights),
                             doctest::Contains("nonnegative"), ValidationError);
    }
}

TEST_CASE("validation rejects inconsistent inputs") {
    SUBCASE("token batch size mismatches") {
        TokenBatch batch = one_position(0.5);
        batch.targets = {0, 1};
        CHECK_THROWS_AS((void)text_ce(batch), ValidationError);
    }
    SUBCASE("target outside vocabulary") {
        TokenBatch batch = one_position(0.5);
        batch.targets = {2};
        CHECK_THROWS_WITH_AS((void)text_ce(batch), doctest::Contains("outside vocabulary"),
                             ValidationError);
    }
    SUBCASE("distribution that does not sum to one") {
        TokenBatch batch = one_position(0.5);
        batch.distributions(0, 1) = 0.6;
        CHECK_THROWS_WITH_AS((void)text_ce(batch), doctest::Contains("sums to"), ValidationError);
    }
    SUBCASE("mask dimension mismatch") {
        MaskPair pair;
        pair.pred = constant_grid(2, 2, 0.5);
        pair.gt = BinaryMask::Constant(2, 3, false);
        CHECK_THROWS_AS((void)bce(pair), ValidationError);
    }
    SUBCASE("probabilities outside the unit interval") {
        MaskPair pair;
        pair.pred = constant_grid(2, 2, 1.5);
        pair.gt = BinaryMask::Constant(2, 2, true);
        CHECK_THROWS_WITH_AS((void)bce(pair), doctest::Contains("outside [0, 1]"),
                             ValidationError);
    }
    SUBCASE("nonpositive dice smoothing") {
        MaskPair pair;
        pair.pred = constant_grid(2, 2, 0.5);
        pair.gt = BinaryMask::Constant(2, 2, true);
        CHECK_THROWS_WITH_AS((void)dice(pair, 0.0), doctest::Contains("positive"),
                             ValidationError);
    }
}

TEST_CASE("random pairs agree with scalar-loop oracles") {
    Rng rng(123);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng.below(64));
        const Eigen::Index cols = 1 + static_cast<Eigen::Index>(rng.below(64));
        MaskPair pair;
        pair.pred = random_probs(rng, rows, cols);
        pair.gt = testsupport::random_mask(rng, rows, cols);

        CHECK(std::abs(bce(pair) - bce_oracle(pair)) < 1e-9);
        CHECK(std::abs(dice(pair, 1.0) - dice_oracle(pair, 1.0)) < 1e-9);
        CHECK(std::abs(dice(pair, 0.5) - dice_oracle(pair, 0.5)) < 1e-9);
        CHECK(dice(pair, 1.0) >= 0.0);
        CHECK(dice(pair, 1.0) <= 1.0);
        CHECK(bce(pair) >= 0.0);
    }
}

TEST_CASE("dice is symmetric on hard masks") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        MaskPair forward;
        forward.gt = testsupport::random_mask(rng, 10, 10);
        MaskPair backward;
        backward.gt = testsupport::random_mask(rng, 10, 10);
        forward.pred = backward.gt.cast<double>();
        backward.pred = forward.gt.cast<double>();
        CHECK(dice(forward, 1.0) == doctest::Approx(dice(backward, 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("reference fixture reproduces the frozen values") {
    const LossFixture fixture =
        load_loss_fixture(std::filesystem::path(testsupport::fixture_dir()) / "loss_reference.json");
    CHECK(fixture.weights.lambda_bce == 1.0);
    CHECK(fixture.weights.lambda_dice == 0.5);
    CHECK(fixture.weights.dice_epsilon == 1.0);

    const LossBreakdown out = total_loss(fixture.batch, fixture.pairs, fixture.weights);
    CHECK(out.text_ce == 0.6931471805599453);
    CHECK(out.bce == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK(out.dice == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(std::abs(out.total - 1.7862943611198906) < 1e-9);
}

TEST_CASE("fixture parsing rejects malformed documents") {
    CHECK_THROWS_AS((void)loss_fixture_from_json("{oops"), ValidationError);
    CHECK_THROWS_WITH_AS((void)loss_fixture_from_json(R"({"token_batch": {
        "distributions": [[0.5, 0.5]], "targets": [0], "supervised": [true]},
        "mask_pairs": [{"pred": [[0.5]], "gt": [[0.25]]}]})"),
                         doctest::Contains("only 0 and 1"), ValidationError);
    CHECK_THROWS_WITH_AS((void)loss_fixture_from_json(R"({"token_batch": {
        "distributions": [[0.5, 0.5], [1.0]], "targets": [0, 0],
        "supervised": [true, true]}})"),
                         doctest::Contains("ragged"), ValidationError);
    CHECK_THROWS_AS((void)load_loss_fixture("/nonexistent/fixture.json"), ValidationError);
}

}  // TEST_SUITE
