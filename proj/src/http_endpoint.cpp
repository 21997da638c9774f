#include "segquery/endpoint.hpp"
#include "segquery/errors.hpp"

// httplib pulls system headers whose macros clash with Eigen internals, so it
// must come after any header that reaches Eigen.
#include <httplib.h>
#include <json.hpp>

namespace segquery {

struct HttpEndpoint::Impl {
    httplib::Client client;
    explicit Impl(const std::string& base_url) : client(base_url) {}
};

HttpEndpoint::HttpEndpoint(std::string base_url, HttpEndpointOptions options)
    : impl_(std::make_unique<Impl>(base_url)) {
    impl_->client.set_connection_timeout(options.connect_timeout_seconds, 0);
    impl_->client.set_read_timeout(options.read_timeout_seconds, 0);
}

HttpEndpoint::~HttpEndpoint() = default;

EndpointReply HttpEndpoint::submit(const std::string& image_id, const std::string& query) {
    nlohmann::json body;
    body["image_id"] = image_id;
    body["query"] = query;
    auto result = impl_->client.Post("/v1/segment-query", body.dump(), "application/json");
    if (!result) {
        throw TransportError("segment-query request failed: " + httplib::to_string(result.error()));
    }
    if (result->status != 200) {
        throw TransportError("segment-query returned status " + std::to_string(result->status));
    }
    try {
        auto doc = nlohmann::json::parse(result->body);
        EndpointReply reply;
        reply.text = doc.at("text").get<std::string>();
        for (const auto& mask : doc.at("masks")) {
            EndpointMask m;
            m.rle = mask.at("rle").get<std::string>();
            m.width = mask.at("width").get<std::uint32_t>();
            m.height = mask.at("height").get<std::uint32_t>();
            reply.masks.push_back(std::move(m));
        }
        return reply;
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("segment-query returned malformed payload: ") + e.what());
    }
}

}  // namespace segquery
