#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emml/dataset.hpp"
#include "emml/matrix.hpp"

namespace emml {

// Fitted feature pipeline: min-max normalization for numeric columns, one-hot
// encoding for nominal columns (vocabulary sorted lexicographically), ordinal
// ranks straight from the schema's ordinal_order. The target is never
// transformed. Output columns follow schema order, nominal columns expanding
// into one block per training category.
//
// Fitting is single-writer; a fitted pipeline is immutable and safe for
// concurrent transform calls.
class PreprocessPipeline {
public:
    // Learns min/max and category vocabularies from the training table only.
    // Requires at least one row and no missing cells.
    void fit(const Table& train);

    bool fitted() const { return fitted_; }

    // Encodes feature columns into a dense matrix and returns the raw target
    // as y. Numeric: (v-min)/(max-min), constant features map to 0, values
    // outside the training range are not clipped. Nominal: unit indicator for
    // categories seen at fit time, all-zero block otherwise. Ordinal: rank.
    std::pair<Matrix, std::vector<double>> transform(const Table& t) const;

    // Feature-only variant for tables without a target column.
    Matrix transform_features(const Table& t) const;

    // Maps normalized numeric columns back to raw units: x*(max-min)+min.
    // Input columns follow the numeric features in schema order.
    Matrix inverse_transform_numeric(const Matrix& x_numeric) const;

    const std::vector<std::string>& feature_names_out() const;
    std::size_t output_width() const;
    std::size_t numeric_feature_count() const;

    nlohmann::json to_json() const;
    static PreprocessPipeline from_json(const nlohmann::json& j,
                                        const std::vector<ColumnSchema>& schema);

private:
    struct Encoder {
        std::string name;
        ColumnKind kind = ColumnKind::numeric;
        double min = 0.0, max = 0.0;         // numeric
        std::vector<std::string> categories; // nominal vocab / ordinal order
        std::size_t out_offset = 0;
        std::size_t out_width = 1;
    };

    void require_fitted() const;
    void check_conforms(const Table& t, bool need_target) const;
    void encode_row(const Table& t, std::size_t row,
                    const std::vector<std::size_t>& col_of_encoder, std::span<double> out) const;
    void rebuild_outputs();

    std::vector<ColumnSchema> schema_;
    std::vector<Encoder> encoders_; // non-target schema columns, schema order
    std::vector<std::string> feature_names_out_;
    std::size_t output_width_ = 0;
    bool fitted_ = false;
};

} // namespace emml
