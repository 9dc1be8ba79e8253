#pragma once
// External oracle adapter: ships an OracleContext as one JSON line to an
// HTTP endpoint and parses one JSON line back into a HypothesisPrediction.
// The wire schema is frozen; see README for the field reference. Transport
// or parse failures surface as typed errors, which the agent records and
// converts into a uniform-distribution fallback.

#include <stdexcept>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oracle.hpp"
#include "taxonomy.hpp"

namespace scout {

struct ExternalOracleError : std::runtime_error {
    enum class Kind { Timeout, Transport, Parse };
    Kind kind;
    ExternalOracleError(Kind k, const std::string& what)
        : std::runtime_error(what), kind(k) {}
};

inline constexpr int kOracleProtocolVersion = 1;

// Request line: the context, no ground truth.
inline std::string serialize_oracle_request(const OracleContext& ctx, const Taxonomy& tax) {
    ordered_json j;
    j["schema_version"] = kOracleProtocolVersion;
    ordered_json f;
    f["id"] = ctx.frontier.id;
    f["centroid"] = {ctx.frontier.centroid.x, ctx.frontier.centroid.y};
    ordered_json cells = ordered_json::array();
    for (Cell c : ctx.frontier.member_cells) cells.push_back({c.x, c.y});
    f["member_cells"] = std::move(cells);
    j["frontier"] = std::move(f);
    j["perceived_region"] = ctx.perceived_region;
    ordered_json lo = ordered_json::array();
    for (int o : ctx.local_objects) lo.push_back(tax.objects.at(o));
    j["local_objects"] = std::move(lo);
    ordered_json ec = ordered_json::array();
    for (int c : ctx.explored_categories) ec.push_back(tax.categories.at(c));
    j["explored_categories"] = std::move(ec);
    if (ctx.goal_category >= 0)
        j["goal_category"] = tax.categories.at(ctx.goal_category);
    else
        j["goal_category"] = nullptr;
    j["attempt"] = ctx.attempt;
    return j.dump();
}

// Response line: "Room: <type> (confidence)" plus objects, as JSON.
inline std::string serialize_oracle_response(const HypothesisPrediction& pred,
                                             const Taxonomy& tax) {
    int argmax = 0;
    for (std::size_t c = 1; c < pred.distribution.size(); ++c)
        if (pred.distribution[c] > pred.distribution[argmax]) argmax = static_cast<int>(c);
    ordered_json j;
    j["room"] = tax.categories.at(argmax);
    j["confidence"] = pred.confidence;
    ordered_json objs = ordered_json::array();
    for (std::size_t i = 0; i < pred.objects.size(); ++i) {
        ordered_json o;
        o["name"] = tax.objects.at(pred.objects[i]);
        o["p"] = i < pred.object_rhos.size() ? pred.object_rhos[i] : 0.0;
        objs.push_back(std::move(o));
    }
    j["objects"] = std::move(objs);
    return j.dump();
}

inline HypothesisPrediction parse_oracle_response(const std::string& line,
                                                  const Taxonomy& tax, int frontier_id) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ExternalOracleError(ExternalOracleError::Kind::Parse,
                                  std::string("bad oracle response: ") + e.what());
    }
    try {
        std::string room = j.at("room").get<std::string>();
        double conf = j.at("confidence").get<double>();
        if (!(conf >= 0.0 && conf <= 1.0))
            throw ExternalOracleError(ExternalOracleError::Kind::Parse,
                                      "confidence outside [0,1]");
        int cat = tax.category_index(room);
        HypothesisPrediction p;
        p.confidence = conf;
        p.frontier_id = frontier_id;
        p.distribution = peaked_distribution(tax, cat, conf);
        for (const auto& jo : j.at("objects")) {
            p.objects.push_back(tax.object_index(jo.at("name").get<std::string>()));
            p.object_rhos.push_back(jo.at("p").get<double>());
        }
        p.embedding = make_region_embedding(tax, cat, p.objects);
        return p;
    } catch (const ExternalOracleError&) {
        throw;
    } catch (const std::exception& e) {
        throw ExternalOracleError(ExternalOracleError::Kind::Parse,
                                  std::string("bad oracle response: ") + e.what());
    }
}

// POST the request to http://host:port/predict. `endpoint` accepts
// "host:port" with an optional http:// prefix.
inline HypothesisPrediction predict_external(const OracleContext& ctx,
                                             const std::string& endpoint,
                                             const Taxonomy& tax,
                                             int timeout_seconds = 5) {
    std::string hostport = endpoint;
    if (hostport.rfind("http://", 0) == 0) hostport = hostport.substr(7);
    auto colon = hostport.rfind(':');
    if (colon == std::string::npos)
        throw ExternalOracleError(ExternalOracleError::Kind::Transport,
                                  "endpoint must be host:port");
    std::string host = hostport.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(hostport.substr(colon + 1));
    } catch (const std::exception&) {
        throw ExternalOracleError(ExternalOracleError::Kind::Transport, "bad endpoint port");
    }
    httplib::Client client(host, port);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    client.set_write_timeout(timeout_seconds, 0);
    auto res = client.Post("/predict", serialize_oracle_request(ctx, tax), "application/json");
    if (!res) {
        auto err = res.error();
        auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                        ? ExternalOracleError::Kind::Timeout
                        : ExternalOracleError::Kind::Transport;
        throw ExternalOracleError(kind, "oracle endpoint unreachable: " + httplib::to_string(err));
    }
    if (res->status != 200)
        throw ExternalOracleError(ExternalOracleError::Kind::Transport,
                                  "oracle endpoint returned status " +
                                      std::to_string(res->status));
    return parse_oracle_response(res->body, tax, ctx.frontier.id);
}

} // namespace scout
