#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "segquery/manifest.hpp"

namespace segquery {

struct EndpointMask {
    std::string rle;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
};

struct EndpointReply {
    std::string text;
    std::vector<EndpointMask> masks;  // one per <SEG> occurrence, in text order
};

/// Behavior contract for a segmentation model: a query about an image yields
/// a response text plus one mask per <SEG> occurrence. Implementations must
/// be safe for concurrent submit calls.
class ModelEndpoint {
public:
    virtual ~ModelEndpoint() = default;
    virtual EndpointReply submit(const std::string& image_id, const std::string& query) = 0;
};

/// Drop protocol of the degraded oracle, shared with any replay tooling:
/// a positive class is omitted iff the (seed, image, class)-keyed hash maps
/// below drop_probability. Independent of how the query was chunked.
bool oracle_drops(std::uint64_t seed, std::string_view image_id, ClassId class_id,
                  double drop_probability);

struct OracleOptions {
    double drop_probability = 0.0;  // omit positives to simulate incomplete predictions
    std::uint64_t seed = 0;
    bool shuffle_order = false;     // reply in shuffled item order
};

/// Ground-truth mock endpoint: answers every templated query in perfect
/// sequence format, order-consistent, with exact label-map binarizations as
/// masks. The degraded and shuffled variants stay per-class deterministic,
/// so merged results remain chunk-invariant.
class OracleEndpoint : public ModelEndpoint {
public:
    explicit OracleEndpoint(const Manifest& manifest, OracleOptions options = {});

    EndpointReply submit(const std::string& image_id, const std::string& query) override;

private:
    const Manifest& manifest_;
    OracleOptions options_;
    std::map<std::string, LabelMap> label_maps_;
};

struct HttpEndpointOptions {
    int connect_timeout_seconds = 5;
    int read_timeout_seconds = 30;
};

/// Client for the wire protocol: POST /v1/segment-query with
/// {"image_id", "query"}, expecting {"text", "masks": [{"rle", "width",
/// "height"}]}. Any non-200 status, connection failure, or malformed payload
/// throws TransportError.
class HttpEndpoint : public ModelEndpoint {
public:
    explicit HttpEndpoint(std::string base_url, HttpEndpointOptions options = {});
    ~HttpEndpoint() override;

    EndpointReply submit(const std::string& image_id, const std::string& query) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace segquery
