#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "emml/dataset.hpp"
#include "emml/preprocess.hpp"
#include "emml/regressor.hpp"

namespace emml {

// Self-describing serialized pipeline + model. One JSON file; loading then
// saving reproduces identical predictions on any input.
struct ModelBundle {
    int format_version = 1;
    std::vector<ColumnSchema> schema;
    PreprocessPipeline pipeline;
    std::shared_ptr<Regressor> model;
    std::string created_at; // ISO-8601
    std::uint64_t seed = 42;
};

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

// Current UTC time, ISO-8601. Honors SOURCE_DATE_EPOCH for reproducible runs.
std::string iso8601_timestamp();

} // namespace emml
