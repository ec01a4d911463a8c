#include "emml/bundle.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emml/errors.hpp"

namespace emml {

std::string iso8601_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        long long v = std::strtoll(epoch, &end, 10);
        if (end && *end == '\0') now = static_cast<std::time_t>(v);
    }
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
    if (!bundle.model || !bundle.model->is_fitted())
        throw NotFitted("cannot save a bundle without a fitted model");
    nlohmann::json j;
    j["format_version"] = bundle.format_version;
    j["created_at"] = bundle.created_at.empty() ? iso8601_timestamp() : bundle.created_at;
    j["seed"] = bundle.seed;
    j["schema"] = nlohmann::json::parse(schema_to_json_text(bundle.schema));
    j["pipeline"] = bundle.pipeline.to_json();
    j["model"] = bundle.model->to_json();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open bundle file for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing bundle file: " + path);
}

ModelBundle load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open bundle file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid bundle JSON in " + path + ": " + e.what());
    }

    ModelBundle bundle;
    bundle.format_version = j.at("format_version").get<int>();
    if (bundle.format_version != 1)
        throw Error("unsupported bundle format_version: " +
                    std::to_string(bundle.format_version));
    bundle.created_at = j.at("created_at").get<std::string>();
    bundle.seed = j.at("seed").get<std::uint64_t>();
    bundle.schema = schema_from_json_text(j.at("schema").dump());
    bundle.pipeline = PreprocessPipeline::from_json(j.at("pipeline"), bundle.schema);
    bundle.model = regressor_from_json(j.at("model"));
    return bundle;
}

} // namespace emml
