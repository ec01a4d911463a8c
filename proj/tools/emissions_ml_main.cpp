// emissions-ml: tabular CO2 regression toolkit.
//
// Subcommands: fit, predict, evaluate, compare, inspect. Exit codes: 0 ok,
// 1 configuration error, 2 data error, 3 training error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emml/bundle.hpp"
#include "emml/dataset.hpp"
#include "emml/ensemble.hpp"
#include "emml/errors.hpp"
#include "emml/metrics.hpp"
#include "emml/parallel.hpp"
#include "emml/preprocess.hpp"
#include "emml/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

int fail(int code, const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return code;
}

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Sentinel-based overrides: flags the user did not pass keep the per-method
// defaults.
struct HyperFlags {
    std::optional<int> n_estimators;
    std::optional<int> max_depth;
    std::optional<std::string> criterion;
    std::optional<int> min_samples_leaf;
    std::optional<double> max_features_fraction;
    std::optional<bool> bootstrap;
    std::optional<double> learning_rate;
    std::optional<double> lambda;
    std::optional<double> gamma;
    std::optional<double> min_child_weight;
    std::optional<int> epochs;
    std::optional<int> batch_size;
    std::optional<double> validation_split;
    std::optional<std::vector<std::size_t>> hidden_widths;
};

emml::ForestConfig make_forest_config(const HyperFlags& flags, std::uint64_t seed) {
    emml::ForestConfig config;
    config.seed = seed;
    config.tree.seed = seed;
    if (flags.n_estimators) config.n_estimators = *flags.n_estimators;
    if (flags.max_depth) config.tree.max_depth = *flags.max_depth;
    if (flags.criterion) config.tree.criterion = emml::criterion_from_string(*flags.criterion);
    if (flags.min_samples_leaf) config.tree.min_samples_leaf = *flags.min_samples_leaf;
    if (flags.max_features_fraction) config.max_features_fraction = *flags.max_features_fraction;
    if (flags.bootstrap) config.bootstrap = *flags.bootstrap;
    return config;
}

emml::GbtConfig make_gbt_config(const HyperFlags& flags, std::uint64_t seed) {
    emml::GbtConfig config;
    config.seed = seed;
    if (flags.n_estimators) config.n_estimators = *flags.n_estimators;
    if (flags.max_depth) config.max_depth = *flags.max_depth;
    if (flags.learning_rate) config.learning_rate = *flags.learning_rate;
    if (flags.lambda) config.lambda = *flags.lambda;
    if (flags.gamma) config.gamma = *flags.gamma;
    if (flags.min_child_weight) config.min_child_weight = *flags.min_child_weight;
    return config;
}

emml::MlpSpec make_mlp_spec(const HyperFlags& flags, std::uint64_t seed) {
    emml::MlpSpec spec;
    spec.train.seed = seed;
    if (flags.epochs) spec.train.epochs = *flags.epochs;
    if (flags.batch_size) spec.train.batch_size = *flags.batch_size;
    if (flags.validation_split) spec.train.validation_split = *flags.validation_split;
    if (flags.learning_rate) spec.train.learning_rate = *flags.learning_rate;
    if (flags.hidden_widths) spec.hidden_widths = *flags.hidden_widths;
    return spec;
}

struct LoadedData {
    emml::Table train;
    emml::Table test;
    emml::PreprocessPipeline pipeline;
    emml::Matrix x_train, x_test;
    std::vector<double> y_train, y_test;
};

// Shared ingestion path: load, drop nulls, optional row limit, split,
// fit pipeline on train only, transform both splits.
LoadedData prepare_data(const std::string& data_path,
                        const std::vector<emml::ColumnSchema>& schema, double train_fraction,
                        bool shuffle, std::uint64_t seed, std::size_t limit) {
    emml::Table raw = emml::load_csv(data_path, schema);
    emml::Table clean = emml::drop_null_rows(raw);
    if (limit > 0 && limit < clean.n_rows()) {
        std::vector<std::size_t> keep(limit);
        std::iota(keep.begin(), keep.end(), 0);
        clean = clean.select_rows(keep);
    }
    emml::SplitSpec split_spec{train_fraction, seed, shuffle};
    auto [train, test] = emml::train_test_split(clean, split_spec);

    LoadedData data;
    data.pipeline.fit(train);
    std::tie(data.x_train, data.y_train) = data.pipeline.transform(train);
    if (test.n_rows() > 0) std::tie(data.x_test, data.y_test) = data.pipeline.transform(test);
    data.train = std::move(train);
    data.test = std::move(test);
    return data;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOptions {
    std::string data_path;
    std::string schema_path;
    std::string method = "random_forest";
    std::string members = "random_forest,mlp";
    std::string out_path = "model_bundle.json";
    std::string metrics_path; // default: <out>.metrics.json
    double train_fraction = 0.9;
    bool no_shuffle = false;
    std::uint64_t seed = 42;
    std::size_t limit = 0;
    int random_search = 0;
    bool print_correlation = false;
    HyperFlags flags;
};

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    for (char ch : s) {
        if (ch == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item.push_back(ch);
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

int run_fit(const FitOptions& opt) {
    std::vector<emml::ColumnSchema> schema;
    try {
        schema = emml::load_schema(opt.schema_path);
        const bool known = opt.method == "random_forest" || opt.method == "gbt" ||
                           opt.method == "mlp" || opt.method == "voting";
        if (!known) throw emml::Error("unknown method: '" + opt.method + "'");
        if (opt.random_search > 0 && opt.method != "gbt")
            throw emml::Error("--random-search applies to --method gbt only");
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }

    LoadedData data;
    try {
        data = prepare_data(opt.data_path, schema, opt.train_fraction, !opt.no_shuffle, opt.seed,
                            opt.limit);
        if (opt.print_correlation) {
            emml::Table clean = emml::drop_null_rows(emml::load_csv(opt.data_path, schema));
            emml::CorrelationMatrix corr = emml::correlation_matrix(clean);
            std::cout << "correlation matrix (numeric + target columns):\n";
            for (std::size_t i = 0; i < corr.names.size(); ++i) {
                std::cout << corr.names[i] << ":";
                for (std::size_t j = 0; j < corr.names.size(); ++j) {
                    char buf[16];
                    std::snprintf(buf, sizeof(buf), " %7.4f", corr.values.at(i, j));
                    std::cout << buf;
                }
                std::cout << "\n";
            }
        }
    } catch (const std::exception& e) {
        return fail(kExitData, e.what());
    }

    std::shared_ptr<emml::Regressor> model;
    try {
        if (opt.method == "random_forest") {
            model = std::make_shared<emml::ForestRegressor>(
                make_forest_config(opt.flags, opt.seed));
        } else if (opt.method == "gbt") {
            emml::GbtConfig config = make_gbt_config(opt.flags, opt.seed);
            if (opt.random_search > 0) {
                // Default search space; toolkit defaults chosen for breadth,
                // not tuned to reproduce any published configuration.
                emml::GbtSearchSpace space;
                space.base = config;
                std::vector<std::size_t> order(data.x_train.rows());
                std::iota(order.begin(), order.end(), 0);
                std::size_t val_n = std::max<std::size_t>(1, order.size() / 5);
                std::span<const std::size_t> all(order);
                auto tr = all.subspan(0, order.size() - val_n);
                auto va = all.subspan(order.size() - val_n);
                emml::Matrix x_tr = emml::take_rows(data.x_train, tr);
                emml::Matrix x_va = emml::take_rows(data.x_train, va);
                std::vector<double> y_tr = emml::take(data.y_train, tr);
                std::vector<double> y_va = emml::take(data.y_train, va);
                emml::GbtSearchResult search = emml::random_search(
                    space, opt.random_search, x_tr, y_tr, x_va, y_va, opt.seed);
                std::cerr << "random search over " << search.table.size()
                          << " configurations (n_estimators in [" << space.n_estimators_min
                          << "," << space.n_estimators_max << "], learning_rate log-uniform in ["
                          << space.learning_rate_min << "," << space.learning_rate_max
                          << "], max_depth in [" << space.max_depth_min << ","
                          << space.max_depth_max << "]):\n";
                for (const auto& entry : search.table)
                    std::cerr << "  n_estimators=" << entry.config.n_estimators
                              << " learning_rate=" << entry.config.learning_rate
                              << " max_depth=" << entry.config.max_depth
                              << " val_mae=" << entry.val_mae << "\n";
                config = search.best;
                config.seed = opt.seed;
                std::cerr << "selected n_estimators=" << config.n_estimators
                          << " learning_rate=" << config.learning_rate
                          << " max_depth=" << config.max_depth << "\n";
            }
            model = std::make_shared<emml::GbtRegressor>(config);
        } else if (opt.method == "mlp") {
            emml::MlpSpec spec = make_mlp_spec(opt.flags, opt.seed);
            emml::MlpArchitecture arch;
            arch.layer_widths.push_back(data.pipeline.output_width());
            for (std::size_t w : spec.hidden_widths) arch.layer_widths.push_back(w);
            arch.layer_widths.push_back(1);
            std::cerr << "mlp trainable parameters: " << emml::count_parameters(arch) << "\n";
            model = std::make_shared<emml::MlpRegressor>(spec);
        } else { // voting
            std::vector<emml::ModelSpec> specs;
            for (const auto& member : split_csv_list(opt.members)) {
                std::uint64_t member_seed = emml::derive_stream(opt.seed, specs.size() + 1);
                if (member == "random_forest")
                    specs.emplace_back(make_forest_config(opt.flags, member_seed));
                else if (member == "gbt")
                    specs.emplace_back(make_gbt_config(opt.flags, member_seed));
                else if (member == "mlp")
                    specs.emplace_back(make_mlp_spec(opt.flags, member_seed));
                else
                    throw emml::Error("unknown voting member: '" + member + "'");
            }
            auto voting = std::make_shared<emml::VotingRegressor>();
            *voting = emml::VotingRegressor::fit_members(specs, data.x_train, data.y_train);
            model = voting;
        }
        if (!model->is_fitted()) model->fit(data.x_train, data.y_train);
    } catch (const std::exception& e) {
        return fail(kExitTraining, e.what());
    }

    try {
        emml::ModelBundle bundle;
        bundle.schema = schema;
        bundle.pipeline = data.pipeline;
        bundle.model = model;
        bundle.seed = opt.seed;
        bundle.created_at = emml::iso8601_timestamp();
        emml::save_bundle(bundle, opt.out_path);

        nlohmann::json sidecar;
        sidecar["train_mae"] = emml::mae(model->predict(data.x_train), data.y_train);
        sidecar["train_rows"] = data.x_train.rows();
        sidecar["test_rows"] = data.x_test.rows();
        if (data.x_test.rows() > 0)
            sidecar["test_mae"] = emml::mae(model->predict(data.x_test), data.y_test);
        else
            sidecar["test_mae"] = nullptr;
        std::string metrics_path =
            opt.metrics_path.empty() ? opt.out_path + ".metrics.json" : opt.metrics_path;
        std::ofstream metrics_out(metrics_path, std::ios::binary);
        if (!metrics_out) throw emml::IoError("cannot write metrics sidecar: " + metrics_path);
        metrics_out << sidecar.dump(2) << "\n";
        std::cout << "wrote " << opt.out_path << " and " << metrics_path << "\n";
    } catch (const std::exception& e) {
        return fail(kExitData, e.what());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// predict / evaluate
// ---------------------------------------------------------------------------

struct PredictOptions {
    std::string bundle_path;
    std::string data_path;
    std::string out_path = "predictions.csv";
};

// Loads the input CSV against the bundle schema; the target column may be
// absent at predict time.
emml::Table load_predict_table(const emml::ModelBundle& bundle, const std::string& data_path,
                               bool* has_target) {
    try {
        *has_target = true;
        return emml::load_csv(data_path, bundle.schema);
    } catch (const emml::MissingColumn& e) {
        std::vector<emml::ColumnSchema> features;
        std::string target_name;
        for (const auto& col : bundle.schema) {
            if (col.kind == emml::ColumnKind::target)
                target_name = col.name;
            else
                features.push_back(col);
        }
        if (e.column_name() != target_name) throw;
        *has_target = false;
        return emml::load_csv(data_path, features);
    }
}

int run_predict(const PredictOptions& opt) {
    emml::ModelBundle bundle;
    try {
        bundle = emml::load_bundle(opt.bundle_path);
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }

    try {
        bool has_target = false;
        emml::Table input = load_predict_table(bundle, opt.data_path, &has_target);
        emml::Matrix x = bundle.pipeline.transform_features(input);
        std::vector<double> pred =
            x.rows() > 0 ? bundle.model->predict(x) : std::vector<double>{};

        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw emml::IoError("cannot open output file: " + opt.out_path);
        out << "prediction\n";
        for (double v : pred) out << format17(v) << "\n";
        if (!out) throw emml::IoError("failed writing predictions: " + opt.out_path);

        if (has_target && x.rows() > 0) {
            std::size_t tc = input.target_index();
            bool target_complete = true;
            std::vector<double> truth(input.n_rows());
            for (std::size_t r = 0; r < input.n_rows(); ++r) {
                if (input.is_missing(r, tc)) {
                    target_complete = false;
                    break;
                }
                truth[r] = input.num(r, tc);
            }
            if (target_complete)
                std::cerr << "MAE: " << emml::mae(pred, truth) << "\n";
            else
                std::cerr << "target column has missing values; MAE not reported\n";
        }
    } catch (const std::exception& e) {
        return fail(kExitData, e.what());
    }
    return kExitOk;
}

struct EvaluateOptions {
    std::string bundle_path;
    std::string data_path;
    std::string format = "text";
};

int run_evaluate(const EvaluateOptions& opt) {
    emml::ModelBundle bundle;
    try {
        bundle = emml::load_bundle(opt.bundle_path);
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }

    try {
        emml::Table input = emml::load_csv(opt.data_path, bundle.schema);
        emml::Table clean = emml::drop_null_rows(input);
        auto [x, y] = bundle.pipeline.transform(clean);
        emml::MetricReport report =
            emml::evaluate_predictions(bundle.model->model_type(), bundle.model->predict(x), y);
        if (opt.format == "json") {
            nlohmann::json j{{"method", report.method_name},
                             {"mae", report.mae},
                             {"mse", report.mse},
                             {"rmse", report.rmse},
                             {"n", report.n}};
            std::cout << j.dump(2) << "\n";
        } else if (opt.format == "csv") {
            std::cout << "method,mae,mse,rmse,n\n"
                      << report.method_name << "," << format17(report.mae) << ","
                      << format17(report.mse) << "," << format17(report.rmse) << "," << report.n
                      << "\n";
        } else {
            std::cout << "method: " << report.method_name << "\n"
                      << "n:      " << report.n << "\n"
                      << "mae:    " << report.mae << "\n"
                      << "mse:    " << report.mse << "\n"
                      << "rmse:   " << report.rmse << "\n";
        }
    } catch (const std::exception& e) {
        return fail(kExitData, e.what());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareOptions {
    std::string data_path;
    std::string schema_path;
    std::string methods; // comma-separated keys, empty = all
    std::string format = "text";
    std::string out_csv = "comparison.csv";
    std::string out_json = "comparison.json";
    double train_fraction = 0.9;
    bool no_shuffle = false;
    std::uint64_t seed = 42;
    std::size_t limit = 0;
    HyperFlags rf_flags, gbt_flags, nn_flags;
};

int run_compare(const CompareOptions& opt) {
    std::vector<emml::ColumnSchema> schema;
    emml::CompareConfig config;
    try {
        schema = emml::load_schema(opt.schema_path);
        config.forest = make_forest_config(opt.rf_flags, opt.seed);
        config.gbt = make_gbt_config(opt.gbt_flags, opt.seed);
        config.mlp = make_mlp_spec(opt.nn_flags, opt.seed);
        config.seed = opt.seed;
        if (!opt.methods.empty()) config.methods = split_csv_list(opt.methods);
        for (const auto& key : config.methods) {
            const auto& known = emml::comparison_method_keys();
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw emml::Error("unknown method key: '" + key + "'");
        }
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }

    LoadedData data;
    try {
        data = prepare_data(opt.data_path, schema, opt.train_fraction, !opt.no_shuffle, opt.seed,
                            opt.limit);
        if (data.test.n_rows() == 0) throw emml::Error("compare needs a non-empty test split");
    } catch (const std::exception& e) {
        return fail(kExitData, e.what());
    }

    emml::ComparisonTable table;
    try {
        table = emml::compare_methods(data.train, data.test, config);
    } catch (const std::exception& e) {
        return fail(kExitTraining, e.what());
    }

    try {
        if (opt.format == "csv") {
            std::cout << emml::comparison_to_csv(table);
        } else if (opt.format == "json") {
            std::cout << emml::comparison_to_json(table).dump(2) << "\n";
        } else {
            std::cout << emml::comparison_to_text(table);
        }
        if (!opt.out_csv.empty()) {
            std::ofstream out(opt.out_csv, std::ios::binary);
            if (!out) throw emml::IoError("cannot write " + opt.out_csv);
            out << emml::comparison_to_csv(table);
        }
        if (!opt.out_json.empty()) {
            std::ofstream out(opt.out_json, std::ios::binary);
            if (!out) throw emml::IoError("cannot write " + opt.out_json);
            out << emml::comparison_to_json(table).dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        return fail(kExitData, e.what());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

struct InspectOptions {
    std::string bundle_path;
    std::string format = "text";
};

int run_inspect(const InspectOptions& opt) {
    emml::ModelBundle bundle;
    try {
        bundle = emml::load_bundle(opt.bundle_path);
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }

    nlohmann::json j;
    j["format_version"] = bundle.format_version;
    j["created_at"] = bundle.created_at;
    j["seed"] = bundle.seed;
    j["model_type"] = bundle.model->model_type();
    j["feature_width"] = bundle.pipeline.output_width();
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& col : bundle.schema)
        cols.push_back({{"name", col.name}, {"kind", emml::to_string(col.kind)}});
    j["schema"] = cols;

    if (opt.format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "format_version: " << bundle.format_version << "\n"
                  << "created_at:     " << bundle.created_at << "\n"
                  << "seed:           " << bundle.seed << "\n"
                  << "model_type:     " << bundle.model->model_type() << "\n"
                  << "feature_width:  " << bundle.pipeline.output_width() << "\n"
                  << "columns:\n";
        for (const auto& col : bundle.schema)
            std::cout << "  " << col.name << " (" << emml::to_string(col.kind) << ")\n";
    }
    return kExitOk;
}

void add_hyper_flags(CLI::App* cmd, HyperFlags& flags, const std::string& prefix) {
    cmd->add_option("--" + prefix + "n-estimators", flags.n_estimators);
    cmd->add_option("--" + prefix + "max-depth", flags.max_depth);
    cmd->add_option("--" + prefix + "criterion", flags.criterion)
        ->check(CLI::IsMember({"squared", "absolute"}));
    cmd->add_option("--" + prefix + "min-samples-leaf", flags.min_samples_leaf);
    cmd->add_option("--" + prefix + "max-features-fraction", flags.max_features_fraction);
    cmd->add_option("--" + prefix + "bootstrap", flags.bootstrap);
    cmd->add_option("--" + prefix + "learning-rate", flags.learning_rate);
    cmd->add_option("--" + prefix + "lambda", flags.lambda);
    cmd->add_option("--" + prefix + "gamma", flags.gamma);
    cmd->add_option("--" + prefix + "min-child-weight", flags.min_child_weight);
    cmd->add_option("--" + prefix + "epochs", flags.epochs);
    cmd->add_option("--" + prefix + "batch-size", flags.batch_size);
    cmd->add_option("--" + prefix + "validation-split", flags.validation_split);
    cmd->add_option("--" + prefix + "hidden-widths", flags.hidden_widths)->delimiter(',');
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"emissions-ml: tabular CO2 regression toolkit "
                 "(random forest, boosted trees, neural network, voting ensembles)"};
    app.require_subcommand(1);
    app.fallthrough();

    int threads = 0;
    app.add_option("--threads", threads,
                   "Cap worker threads; 0 uses the hardware default. Results are identical "
                   "for any value.");

    FitOptions fit_opt;
    CLI::App* fit = app.add_subcommand("fit", "Train one model and write a bundle");
    fit->add_option("--data", fit_opt.data_path, "Input CSV")->required();
    fit->add_option("--schema", fit_opt.schema_path, "Schema JSON")->required();
    fit->add_option("--method", fit_opt.method, "random_forest | gbt | mlp | voting");
    fit->add_option("--members", fit_opt.members,
                    "Voting members (comma-separated); hyperparameter flags apply to every "
                    "member whose family uses them");
    fit->add_option("--out", fit_opt.out_path, "Bundle output path");
    fit->add_option("--metrics-out", fit_opt.metrics_path, "Metrics sidecar path");
    fit->add_option("--train-fraction", fit_opt.train_fraction);
    fit->add_flag("--no-shuffle", fit_opt.no_shuffle, "Split without shuffling");
    fit->add_option("--seed", fit_opt.seed)->envname("EMISSIONS_ML_SEED");
    fit->add_option("--limit", fit_opt.limit, "Keep only the first N rows after cleaning");
    fit->add_option("--random-search", fit_opt.random_search,
                    "Sample K gbt configurations on a held-out fifth of the training split");
    fit->add_flag("--print-correlation", fit_opt.print_correlation,
                  "Print the Pearson correlation matrix of the cleaned data");
    add_hyper_flags(fit, fit_opt.flags, "");

    PredictOptions predict_opt;
    CLI::App* predict = app.add_subcommand("predict", "Predict with a saved bundle");
    predict->add_option("--bundle", predict_opt.bundle_path)->required();
    predict->add_option("--data", predict_opt.data_path, "Input CSV (target optional)")
        ->required();
    predict->add_option("--out", predict_opt.out_path, "Predictions CSV path");

    EvaluateOptions evaluate_opt;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a bundle on labeled data");
    evaluate->add_option("--bundle", evaluate_opt.bundle_path)->required();
    evaluate->add_option("--data", evaluate_opt.data_path)->required();
    evaluate->add_option("--format", evaluate_opt.format)
        ->check(CLI::IsMember({"text", "csv", "json"}));

    CompareOptions compare_opt;
    CLI::App* compare = app.add_subcommand(
        "compare", "Fit the six reference methods and print the comparison table");
    compare->add_option("--data", compare_opt.data_path)->required();
    compare->add_option("--schema", compare_opt.schema_path)->required();
    compare->add_option("--methods", compare_opt.methods,
                        "Subset: random_forest,gbt,mlp,mlp_gbt,mlp_random_forest,"
                        "mlp_gbt_random_forest");
    compare->add_option("--format", compare_opt.format)
        ->check(CLI::IsMember({"text", "csv", "json"}));
    compare->add_option("--out-csv", compare_opt.out_csv, "Report CSV path ('' disables)");
    compare->add_option("--out-json", compare_opt.out_json, "Report JSON path ('' disables)");
    compare->add_option("--train-fraction", compare_opt.train_fraction);
    compare->add_flag("--no-shuffle", compare_opt.no_shuffle);
    compare->add_option("--seed", compare_opt.seed)->envname("EMISSIONS_ML_SEED");
    compare->add_option("--limit", compare_opt.limit);
    add_hyper_flags(compare, compare_opt.rf_flags, "rf-");
    add_hyper_flags(compare, compare_opt.gbt_flags, "gbt-");
    add_hyper_flags(compare, compare_opt.nn_flags, "nn-");

    InspectOptions inspect_opt;
    CLI::App* inspect = app.add_subcommand("inspect", "Print a bundle summary");
    inspect->add_option("--bundle", inspect_opt.bundle_path)->required();
    inspect->add_option("--format", inspect_opt.format)
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    emml::set_max_threads(threads);
    if (fit->parsed()) return run_fit(fit_opt);
    if (predict->parsed()) return run_predict(predict_opt);
    if (evaluate->parsed()) return run_evaluate(evaluate_opt);
    if (compare->parsed()) return run_compare(compare_opt);
    if (inspect->parsed()) return run_inspect(inspect_opt);
    return kExitConfig;
}
