#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "segquery/builder.hpp"
#include "segquery/chunking.hpp"
#include "segquery/endpoint.hpp"
#include "segquery/errors.hpp"
#include "segquery/loss.hpp"
#include "segquery/manifest.hpp"
#include "segquery/metrics.hpp"
#include "segquery/orchestrator.hpp"
#include "segquery/parallel.hpp"
#include "segquery/parser.hpp"
#include "segquery/templates.hpp"

namespace {

using namespace segquery;

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

LogLevel g_log_level = LogLevel::Info;

void diag(LogLevel level, const std::string& msg) {
    if (level < g_log_level) {
        return;
    }
    static const char* names[] = {"debug", "info", "warn", "error"};
    std::cerr << names[static_cast<int>(level)] << ": " << msg << '\n';
}

LogLevel log_level_from_name(const std::string& name) {
    if (name == "debug") return LogLevel::Debug;
    if (name == "info") return LogLevel::Info;
    if (name == "warn") return LogLevel::Warn;
    if (name == "error") return LogLevel::Error;
    throw ValidationError("unknown log level '" + name + "'");
}

std::size_t count_occurrences(std::string_view text, std::string_view token) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(token); pos != std::string_view::npos;
         pos = text.find(token, pos + token.size())) {
        ++count;
    }
    return count;
}

/// Output sink: --out file when given, stdout otherwise.
class OutputSink {
public:
    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) {
                throw ValidationError("cannot open output file '" + path + "'");
            }
        }
    }

    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

/// Input source: --in file when given, stdin otherwise.
class InputSource {
public:
    explicit InputSource(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw ValidationError("cannot open input file '" + path + "'");
            }
        }
    }

    std::istream& stream() { return file_.is_open() ? file_ : std::cin; }

private:
    std::ifstream file_;
};

std::vector<ClassId> all_table_ids(const CategoryTable& table) {
    std::vector<ClassId> ids;
    ids.reserve(table.size());
    for (const auto& entry : table.entries()) {
        ids.push_back(entry.id);
    }
    return ids;
}

std::vector<ClassId> eval_class_ids(const CategoryTable& table,
                                    const std::vector<std::uint32_t>& requested) {
    if (requested.empty()) {
        return all_table_ids(table);
    }
    std::vector<ClassId> ids;
    for (std::uint32_t raw : requested) {
        if (raw >= kIgnoreId || !table.find_by_id(static_cast<ClassId>(raw))) {
            throw ValidationError("--classes: id " + std::to_string(raw) +
                                  " is not in the category table");
        }
        ids.push_back(static_cast<ClassId>(raw));
    }
    return ids;
}

// ---------------------------------------------------------------- build-dataset

struct BuildOpts {
    std::string manifest;
    std::string out;
    std::size_t per_image = 1;
    std::size_t min_sample = 3;
    std::optional<std::size_t> max_sample;
    bool no_augment = false;
    bool no_order_consistent = false;
    bool single_target = false;
    std::size_t template_id = 0;
};

int run_build(const BuildOpts& o, std::uint64_t seed) {
    Manifest manifest = load_manifest(o.manifest);
    BuilderConfig cfg;
    cfg.min_sample = o.min_sample;
    cfg.max_sample = o.max_sample.value_or(std::min<std::size_t>(20, manifest.table.size()));
    cfg.augment_negatives = !o.no_augment;
    cfg.order_consistent = !o.no_order_consistent;
    cfg.template_id = o.template_id;
    cfg.seed = seed;

    OutputSink sink(o.out);
    const SampleMode mode = o.single_target ? SampleMode::SingleTarget : SampleMode::ComplexQuery;
    std::size_t written = 0;
    build_dataset(manifest, cfg, o.per_image, mode, [&](const TrainingSample& sample) {
        sink.stream() << to_jsonl(sample) << '\n';
        ++written;
    });
    diag(LogLevel::Info, "wrote " + std::to_string(written) + " samples");
    return 0;
}

// ------------------------------------------------------------------------ infer

struct InferOpts {
    std::string manifest;
    std::string endpoint;
    bool oracle = false;
    std::optional<double> oracle_drop;
    std::string chunk = "N";
    std::string out;
    std::size_t template_id = 0;
    unsigned retries = 2;
};

int run_infer(const InferOpts& o, std::uint64_t seed, std::size_t jobs) {
    const bool oracle_mode = o.oracle || o.oracle_drop.has_value();
    if (!o.endpoint.empty() && oracle_mode) {
        throw ValidationError("--endpoint conflicts with --oracle/--oracle-drop");
    }

    Manifest manifest = load_manifest(o.manifest);
    std::unique_ptr<ModelEndpoint> endpoint;
    if (oracle_mode) {
        OracleOptions opts;
        opts.drop_probability = o.oracle_drop.value_or(0.0);
        opts.seed = seed;
        endpoint = std::make_unique<OracleEndpoint>(manifest, opts);
    } else {
        std::string url = o.endpoint;
        if (url.empty()) {
            if (const char* env = std::getenv("SEGQUERY_ENDPOINT")) {
                url = env;
            }
        }
        if (url.empty()) {
            throw ValidationError(
                "no endpoint selected: pass --endpoint, --oracle, or --oracle-drop "
                "(or set SEGQUERY_ENDPOINT)");
        }
        endpoint = std::make_unique<HttpEndpoint>(url);
    }

    OrchestratorConfig cfg;
    cfg.chunk_spec = ChunkSpec::parse(o.chunk);
    cfg.template_id = o.template_id;
    cfg.retries = o.retries;
    cfg.jobs = jobs;

    const std::vector<ClassId> ids = all_table_ids(manifest.table);
    OutputSink sink(o.out);
    for (const ImageRecord& image : manifest.images) {
        diag(LogLevel::Debug, "infer " + image.image_id);
        MergedPrediction merged =
            run_chunked(image.image_id, ids, manifest.table, *endpoint, cfg);
        write_predictions(sink.stream(), image.image_id, ids, merged);
    }
    return 0;
}

// ------------------------------------------------------------------------ parse

struct ParseOpts {
    std::string manifest;
    std::string in;
    std::string out;
};

nlohmann::ordered_json report_to_json(const ParseReport& report) {
    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    for (const ParsedItem& item : report.items) {
        nlohmann::ordered_json j;
        j["raw_name"] = item.raw_name;
        if (item.resolved_id) {
            j["resolved_id"] = *item.resolved_id;
        } else {
            j["resolved_id"] = nullptr;
        }
        j["tag"] = item.tag == ItemTag::Seg ? "seg" : "neg";
        if (item.seg_index) {
            j["seg_index"] = *item.seg_index;
        } else {
            j["seg_index"] = nullptr;
        }
        items.push_back(std::move(j));
    }
    nlohmann::ordered_json out;
    out["items"] = std::move(items);
    out["missing"] = report.missing;
    out["extra"] = report.extra;
    out["duplicates"] = report.duplicates;
    out["order_matches_query"] = report.order_matches_query;
    if (report.trailing_garbage) {
        out["trailing_garbage"] = *report.trailing_garbage;
    } else {
        out["trailing_garbage"] = nullptr;
    }
    return out;
}

int run_parse(const ParseOpts& o) {
    Manifest manifest = load_manifest(o.manifest);
    InputSource source(o.in);
    OutputSink sink(o.out);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source.stream(), line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::string query;
        std::string response;
        try {
            auto doc = nlohmann::json::parse(line);
            query = doc.at("query").get<std::string>();
            response = doc.at("response").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        auto names = extract_query_names(query);
        if (!names) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": query text matches no known template");
        }
        ParseReport report = parse_response(response, *names, manifest.table);
        sink.stream() << report_to_json(report).dump() << '\n';
    }
    return 0;
}

// ------------------------------------------------------------------------- eval

struct EvalOpts {
    std::string manifest;
    std::string pred;
    std::string metric = "miou";
    std::vector<std::uint32_t> classes;
};

MergedPrediction merged_from_rows(const std::map<ClassId, PredictionRow>& rows,
                                  const LabelMap& label_map, const std::string& image_id) {
    MergedPrediction merged;
    for (const auto& [id, row] : rows) {
        ClassPrediction cp;
        cp.outcome = row.outcome;
        if (row.rle) {
            try {
                cp.mask = rle_decode(rle_from_text(*row.rle), label_map.width(),
                                     label_map.height());
            } catch (const ValidationError& e) {
                throw ValidationError("image '" + image_id + "' class " + std::to_string(id) +
                                      ": " + e.what());
            }
        }
        merged.classes.emplace(id, std::move(cp));
    }
    return merged;
}

int run_eval(const EvalOpts& o, std::size_t jobs) {
    Manifest manifest = load_manifest(o.manifest);
    const std::vector<ClassId> eval_ids = eval_class_ids(manifest.table, o.classes);

    std::ifstream in(o.pred, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open predictions file '" + o.pred + "'");
    }
    std::map<std::string, std::map<ClassId, PredictionRow>> by_image;
    std::vector<std::string> unknown_images;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        PredictionRow row;
        try {
            row = prediction_row_from_jsonl(line);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!manifest.find_image(row.image_id)) {
            if (std::find(unknown_images.begin(), unknown_images.end(), row.image_id) ==
                unknown_images.end()) {
                unknown_images.push_back(row.image_id);
            }
            continue;
        }
        if (!manifest.table.find_by_id(row.class_id)) {
            throw ValidationError("line " + std::to_string(line_no) + ": class id " +
                                  std::to_string(row.class_id) +
                                  " is not in the category table");
        }
        auto [it, inserted] = by_image[row.image_id].emplace(row.class_id, std::move(row));
        if (!inserted) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": duplicate prediction for image '" + it->second.image_id +
                                  "' class " + std::to_string(it->first));
        }
    }
    if (!unknown_images.empty()) {
        std::string joined;
        for (const auto& id : unknown_images) {
            joined += (joined.empty() ? "'" : ", '") + id + "'";
        }
        throw ValidationError("predictions reference images absent from the manifest: " + joined);
    }

    static const std::map<ClassId, PredictionRow> kNoRows;
    std::vector<MetricAccumulator> per_image(manifest.images.size());
    parallel_for(manifest.images.size(), jobs, [&](std::size_t i) {
        const ImageRecord& record = manifest.images[i];
        const auto rows_it = by_image.find(record.image_id);
        const auto& rows = rows_it == by_image.end() ? kNoRows : rows_it->second;
        const LabelMap label_map = load_label_map(manifest, record);
        const MergedPrediction merged = merged_from_rows(rows, label_map, record.image_id);

        MetricAccumulator& acc = per_image[i];
        accumulate_semantic(acc, merged, label_map, eval_ids);
        const BinaryMask valid = label_map.grid() != kIgnoreId;
        const BinaryMask empty = BinaryMask::Constant(valid.rows(), valid.cols(), false);
        for (ClassId id : eval_ids) {
            const BinaryMask gt = label_map.class_mask(id);
            const ClassPrediction* cp = merged.find(id);
            const BinaryMask pred = cp && cp->mask ? (*cp->mask && valid).eval() : empty;
            accumulate_referring(acc, pred, gt);
        }
    });
    MetricAccumulator total;
    for (const MetricAccumulator& acc : per_image) {
        total.merge(acc);
    }

    double value = 0.0;
    if (o.metric == "miou") {
        const auto miou = finalize_miou(total);
        if (!miou) {
            throw ValidationError("mIoU undefined: every evaluated class has zero union");
        }
        value = *miou;
    } else if (o.metric == "ciou") {
        value = finalize_ciou(total);
    } else {
        value = finalize_giou(total);
    }

    nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
    for (const auto& [id, iou] : per_class_iou(total)) {
        per_class[std::to_string(id)] = iou;
    }
    nlohmann::ordered_json out;
    out["metric"] = o.metric;
    out["value"] = value;
    out["per_class"] = std::move(per_class);
    std::cout << out.dump() << '\n';
    return 0;
}

// ------------------------------------------------------------------------- loss

struct LossOpts {
    std::string fixture;
};

int run_loss(const LossOpts& o) {
    LossFixture fixture = load_loss_fixture(o.fixture);
    LossBreakdown breakdown = total_loss(fixture.batch, fixture.pairs, fixture.weights);
    nlohmann::ordered_json out;
    out["weights"] = {{"lambda_bce", fixture.weights.lambda_bce},
                      {"lambda_dice", fixture.weights.lambda_dice},
                      {"dice_epsilon", fixture.weights.dice_epsilon}};
    out["text_ce"] = breakdown.text_ce;
    out["bce"] = breakdown.bce;
    out["dice"] = breakdown.dice;
    out["total"] = breakdown.total;
    std::cout << out.dump() << '\n';
    return 0;
}

// ------------------------------------------------------------------------ stats

struct StatsOpts {
    std::string manifest;
    std::string corpus;
};

struct RunningStat {
    std::uint64_t min = 0;
    std::uint64_t max = 0;
    double sum = 0.0;
    std::size_t n = 0;

    void add(std::uint64_t v) {
        min = n == 0 ? v : std::min(min, v);
        max = n == 0 ? v : std::max(max, v);
        sum += static_cast<double>(v);
        ++n;
    }

    nlohmann::ordered_json to_json() const {
        return {{"min", min}, {"max", max}, {"mean", n == 0 ? 0.0 : sum / static_cast<double>(n)}};
    }
};

int run_stats(const StatsOpts& o) {
    Manifest manifest = load_manifest(o.manifest);
    std::ifstream in(o.corpus, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open corpus file '" + o.corpus + "'");
    }

    std::size_t samples = 0;
    std::uint64_t seg_items = 0;
    std::uint64_t neg_items = 0;
    RunningStat items_stat;
    RunningStat query_chars;
    RunningStat response_chars;
    std::map<std::uint64_t, std::uint64_t> item_histogram;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        TrainingSample sample;
        try {
            sample = training_sample_from_jsonl(line);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!manifest.find_image(sample.image_id)) {
            throw ValidationError("line " + std::to_string(line_no) + ": image '" +
                                  sample.image_id + "' is not in the manifest");
        }
        const std::uint64_t segs = count_occurrences(sample.response, kSegToken);
        const std::uint64_t negs = count_occurrences(sample.response, kNegToken);
        seg_items += segs;
        neg_items += negs;
        items_stat.add(segs + negs);
        ++item_histogram[segs + negs];
        query_chars.add(sample.query.size());
        response_chars.add(sample.response.size());
        ++samples;
    }

    nlohmann::ordered_json histogram = nlohmann::ordered_json::object();
    for (const auto& [count, freq] : item_histogram) {
        histogram[std::to_string(count)] = freq;
    }
    nlohmann::ordered_json items = items_stat.to_json();
    items["histogram"] = std::move(histogram);

    const std::uint64_t total_items = seg_items + neg_items;
    nlohmann::ordered_json out;
    out["samples"] = samples;
    out["items"] = std::move(items);
    out["query_chars"] = query_chars.to_json();
    out["response_chars"] = response_chars.to_json();
    out["positive_items"] = seg_items;
    out["negative_items"] = neg_items;
    out["positive_ratio"] =
        total_items == 0 ? 0.0 : static_cast<double>(seg_items) / static_cast<double>(total_items);
    std::cout << out.dump() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"segquery: complex-query segmentation dataset, inference, and evaluation toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string log_level = "info";
    app.add_option("--seed", seed, "Seed for every deterministic draw");
    app.add_option("--jobs", jobs, "Parallelism bound for chunk dispatch and accumulation")
        ->check(CLI::PositiveNumber);
    app.add_option("--log-level", log_level, "Diagnostic verbosity on stderr")
        ->check(CLI::IsMember({"debug", "info", "warn", "error"}));

    BuildOpts build;
    auto* build_cmd =
        app.add_subcommand("build-dataset", "Build training samples from a manifest");
    build_cmd->fallthrough();
    build_cmd->add_option("--manifest", build.manifest, "Manifest JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    build_cmd->add_option("--out", build.out, "Output JSONL path (default stdout)");
    build_cmd->add_option("--per-image", build.per_image, "Samples per image")
        ->check(CLI::PositiveNumber);
    build_cmd->add_option("--min", build.min_sample, "Minimum sampled classes per query");
    build_cmd->add_option("--max", build.max_sample,
                          "Maximum sampled classes per query (default min(20, table size))");
    build_cmd->add_flag("--no-augment", build.no_augment,
                        "Emit only present classes, no <NEG> items");
    build_cmd->add_flag("--no-order-consistent", build.no_order_consistent,
                        "Order response items canonically instead of by query");
    build_cmd->add_flag("--single-target", build.single_target,
                        "Single existent-category baseline samples");
    build_cmd->add_option("--template", build.template_id, "Query template id");

    InferOpts infer;
    auto* infer_cmd = app.add_subcommand("infer", "Run chunked inference against an endpoint");
    infer_cmd->fallthrough();
    infer_cmd->add_option("--manifest", infer.manifest, "Manifest JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    infer_cmd->add_option("--endpoint", infer.endpoint,
                          "Model endpoint URL (default $SEGQUERY_ENDPOINT)");
    infer_cmd->add_flag("--oracle", infer.oracle, "Use the built-in ground-truth oracle");
    infer_cmd->add_option("--oracle-drop", infer.oracle_drop,
                          "Oracle that drops each positive with this probability")
        ->check(CLI::Range(0.0, 1.0));
    infer_cmd->add_option("--chunk", infer.chunk, "Chunk spec: N, N/2, N/3, N/4, or a size");
    infer_cmd->add_option("--out", infer.out, "Predictions JSONL path (default stdout)");
    infer_cmd->add_option("--template", infer.template_id, "Query template id");
    infer_cmd->add_option("--retries", infer.retries, "Retries per chunk on transport failure");

    ParseOpts parse;
    auto* parse_cmd =
        app.add_subcommand("parse", "Parse {query, response} JSONL into report JSONL");
    parse_cmd->fallthrough();
    parse_cmd->add_option("--manifest", parse.manifest, "Manifest JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    parse_cmd->add_option("--in", parse.in, "Input JSONL path (default stdin)");
    parse_cmd->add_option("--out", parse.out, "Output JSONL path (default stdout)");

    EvalOpts eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score predictions against a manifest");
    eval_cmd->fallthrough();
    eval_cmd->add_option("--manifest", eval.manifest, "Manifest JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--pred", eval.pred, "Predictions JSONL path")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--metric", eval.metric, "Metric to report")
        ->check(CLI::IsMember({"miou", "ciou", "giou"}));
    eval_cmd->add_option("--classes", eval.classes, "Class ids to evaluate (default all)");

    LossOpts loss;
    auto* loss_cmd = app.add_subcommand("loss", "Evaluate the loss reference on a JSON fixture");
    loss_cmd->fallthrough();
    loss_cmd->add_option("--fixture", loss.fixture, "Loss fixture JSON path")
        ->required()
        ->check(CLI::ExistingFile);

    StatsOpts stats;
    auto* stats_cmd = app.add_subcommand("stats", "Summarize a training corpus");
    stats_cmd->fallthrough();
    stats_cmd->add_option("--manifest", stats.manifest, "Manifest JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    stats_cmd->add_option("--corpus", stats.corpus, "Training JSONL path")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        g_log_level = log_level_from_name(log_level);
        if (app.got_subcommand(build_cmd)) {
            return run_build(build, seed);
        }
        if (app.got_subcommand(infer_cmd)) {
            return run_infer(infer, seed, jobs);
        }
        if (app.got_subcommand(parse_cmd)) {
            return run_parse(parse);
        }
        if (app.got_subcommand(eval_cmd)) {
            return run_eval(eval, jobs);
        }
        if (app.got_subcommand(loss_cmd)) {
            return run_loss(loss);
        }
        return run_stats(stats);
    } catch (const TransportError& e) {
        diag(LogLevel::Error, e.what());
        return 2;
    } catch (const ValidationError& e) {
        diag(LogLevel::Error, e.what());
        return 1;
    } catch (const std::exception& e) {
        diag(LogLevel::Error, e.what());
        return 1;
    }
}
