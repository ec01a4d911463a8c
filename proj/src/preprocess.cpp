#include "emml/preprocess.hpp"

#include <algorithm>
#include <set>

namespace emml {

void PreprocessPipeline::fit(const Table& train) {
    if (train.n_rows() == 0) throw EmptyTable("cannot fit preprocessing on an empty table");
    if (train.has_missing())
        throw Error("cannot fit preprocessing on a table with missing cells; "
                    "call drop_null_rows first");

    schema_ = train.schema();
    encoders_.clear();
    for (std::size_t c = 0; c < schema_.size(); ++c) {
        const auto& col = schema_[c];
        if (col.kind == ColumnKind::target) continue;
        Encoder enc;
        enc.name = col.name;
        enc.kind = col.kind;
        switch (col.kind) {
            case ColumnKind::numeric: {
                double lo = train.num(0, c), hi = train.num(0, c);
                for (std::size_t r = 1; r < train.n_rows(); ++r) {
                    lo = std::min(lo, train.num(r, c));
                    hi = std::max(hi, train.num(r, c));
                }
                enc.min = lo;
                enc.max = hi;
                break;
            }
            case ColumnKind::nominal: {
                std::set<std::string> vocab;
                for (std::size_t r = 0; r < train.n_rows(); ++r) vocab.insert(train.str(r, c));
                enc.categories.assign(vocab.begin(), vocab.end());
                enc.out_width = enc.categories.size();
                break;
            }
            case ColumnKind::ordinal: {
                enc.categories = col.ordinal_order;
                for (std::size_t r = 0; r < train.n_rows(); ++r) {
                    const auto& cat = train.str(r, c);
                    if (std::find(enc.categories.begin(), enc.categories.end(), cat) ==
                        enc.categories.end())
                        throw UnknownOrdinalCategory(col.name, cat);
                }
                break;
            }
            case ColumnKind::target: break;
        }
        encoders_.push_back(std::move(enc));
    }
    rebuild_outputs();
    fitted_ = true;
}

void PreprocessPipeline::rebuild_outputs() {
    feature_names_out_.clear();
    std::size_t offset = 0;
    for (auto& enc : encoders_) {
        enc.out_offset = offset;
        switch (enc.kind) {
            case ColumnKind::numeric:
            case ColumnKind::ordinal:
                enc.out_width = 1;
                feature_names_out_.push_back(enc.name);
                break;
            case ColumnKind::nominal:
                enc.out_width = enc.categories.size();
                for (const auto& cat : enc.categories)
                    feature_names_out_.push_back(enc.name + "=" + cat);
                break;
            case ColumnKind::target: break;
        }
        offset += enc.out_width;
    }
    output_width_ = offset;
}

void PreprocessPipeline::require_fitted() const {
    if (!fitted_) throw NotFitted("pipeline is not fitted");
}

void PreprocessPipeline::check_conforms(const Table& t, bool need_target) const {
    for (const auto& enc : encoders_) {
        std::size_t c = t.column_index(enc.name); // throws MissingColumn
        if (t.schema()[c].kind != enc.kind)
            throw Error("column '" + enc.name + "' has kind " + to_string(t.schema()[c].kind) +
                        ", expected " + to_string(enc.kind));
    }
    if (need_target) (void)t.target_index();
}

void PreprocessPipeline::encode_row(const Table& t, std::size_t row,
                                    const std::vector<std::size_t>& col_of_encoder,
                                    std::span<double> out) const {
    for (std::size_t e = 0; e < encoders_.size(); ++e) {
        const Encoder& enc = encoders_[e];
        const std::size_t c = col_of_encoder[e];
        if (t.is_missing(row, c))
            throw Error("cannot transform row " + std::to_string(row) + ": column '" + enc.name +
                        "' is missing");
        switch (enc.kind) {
            case ColumnKind::numeric: {
                double v = t.num(row, c);
                double range = enc.max - enc.min;
                out[enc.out_offset] = range > 0.0 ? (v - enc.min) / range : 0.0;
                break;
            }
            case ColumnKind::nominal: {
                const auto& cat = t.str(row, c);
                auto it = std::lower_bound(enc.categories.begin(), enc.categories.end(), cat);
                if (it != enc.categories.end() && *it == cat)
                    out[enc.out_offset + static_cast<std::size_t>(it - enc.categories.begin())] =
                        1.0;
                break;
            }
            case ColumnKind::ordinal: {
                const auto& cat = t.str(row, c);
                auto it = std::find(enc.categories.begin(), enc.categories.end(), cat);
                if (it == enc.categories.end()) throw UnknownOrdinalCategory(enc.name, cat);
                out[enc.out_offset] = static_cast<double>(it - enc.categories.begin());
                break;
            }
            case ColumnKind::target: break;
        }
    }
}

Matrix PreprocessPipeline::transform_features(const Table& t) const {
    require_fitted();
    check_conforms(t, /*need_target=*/false);
    std::vector<std::size_t> col_of_encoder(encoders_.size());
    for (std::size_t e = 0; e < encoders_.size(); ++e)
        col_of_encoder[e] = t.column_index(encoders_[e].name);

    Matrix x(t.n_rows(), output_width_);
    for (std::size_t r = 0; r < t.n_rows(); ++r) encode_row(t, r, col_of_encoder, x.row(r));
    return x;
}

std::pair<Matrix, std::vector<double>> PreprocessPipeline::transform(const Table& t) const {
    require_fitted();
    check_conforms(t, /*need_target=*/true);
    Matrix x = transform_features(t);
    const std::size_t tc = t.target_index();
    std::vector<double> y(t.n_rows());
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        if (t.is_missing(r, tc))
            throw Error("cannot transform row " + std::to_string(r) + ": target is missing");
        y[r] = t.num(r, tc);
    }
    return {std::move(x), std::move(y)};
}

Matrix PreprocessPipeline::inverse_transform_numeric(const Matrix& x_numeric) const {
    require_fitted();
    std::vector<const Encoder*> numeric;
    for (const auto& enc : encoders_)
        if (enc.kind == ColumnKind::numeric) numeric.push_back(&enc);
    if (x_numeric.cols() != numeric.size())
        throw DimensionMismatch("inverse_transform_numeric: expected " +
                                std::to_string(numeric.size()) + " columns, got " +
                                std::to_string(x_numeric.cols()));
    Matrix out(x_numeric.rows(), x_numeric.cols());
    for (std::size_t r = 0; r < x_numeric.rows(); ++r)
        for (std::size_t j = 0; j < numeric.size(); ++j)
            out.at(r, j) = x_numeric.at(r, j) * (numeric[j]->max - numeric[j]->min) +
                           numeric[j]->min;
    return out;
}

const std::vector<std::string>& PreprocessPipeline::feature_names_out() const {
    require_fitted();
    return feature_names_out_;
}

std::size_t PreprocessPipeline::output_width() const {
    require_fitted();
    return output_width_;
}

std::size_t PreprocessPipeline::numeric_feature_count() const {
    require_fitted();
    std::size_t n = 0;
    for (const auto& enc : encoders_)
        if (enc.kind == ColumnKind::numeric) ++n;
    return n;
}

nlohmann::json PreprocessPipeline::to_json() const {
    require_fitted();
    nlohmann::json minmax = nlohmann::json::object();
    nlohmann::json onehot = nlohmann::json::object();
    nlohmann::json ordinal = nlohmann::json::object();
    for (const auto& enc : encoders_) {
        switch (enc.kind) {
            case ColumnKind::numeric:
                minmax[enc.name] = {{"min", enc.min}, {"max", enc.max}};
                break;
            case ColumnKind::nominal: onehot[enc.name] = enc.categories; break;
            case ColumnKind::ordinal: ordinal[enc.name] = enc.categories; break;
            case ColumnKind::target: break;
        }
    }
    return nlohmann::json{{"format_version", 1},
                          {"minmax", minmax},
                          {"onehot", onehot},
                          {"ordinal", ordinal},
                          {"feature_names_out", feature_names_out_}};
}

PreprocessPipeline PreprocessPipeline::from_json(const nlohmann::json& j,
                                                 const std::vector<ColumnSchema>& schema) {
    if (j.at("format_version").get<int>() != 1)
        throw Error("unsupported pipeline format_version");
    PreprocessPipeline p;
    p.schema_ = schema;
    for (const auto& col : schema) {
        if (col.kind == ColumnKind::target) continue;
        Encoder enc;
        enc.name = col.name;
        enc.kind = col.kind;
        switch (col.kind) {
            case ColumnKind::numeric: {
                const auto& mm = j.at("minmax").at(col.name);
                enc.min = mm.at("min").get<double>();
                enc.max = mm.at("max").get<double>();
                break;
            }
            case ColumnKind::nominal:
                enc.categories = j.at("onehot").at(col.name).get<std::vector<std::string>>();
                break;
            case ColumnKind::ordinal:
                enc.categories = j.at("ordinal").at(col.name).get<std::vector<std::string>>();
                break;
            case ColumnKind::target: break;
        }
        p.encoders_.push_back(std::move(enc));
    }
    p.rebuild_outputs();
    p.fitted_ = true;
    if (j.contains("feature_names_out")) {
        auto expected = j.at("feature_names_out").get<std::vector<std::string>>();
        if (expected != p.feature_names_out_)
            throw Error("pipeline feature_names_out does not match schema reconstruction");
    }
    return p;
}

} // namespace emml
