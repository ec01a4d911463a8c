#include "emml/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <sys/resource.h>

#include "emml/ensemble.hpp"
#include "emml/errors.hpp"
#include "emml/preprocess.hpp"
#include "emml/rng.hpp"

namespace emml {

double mae(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw DimensionMismatch("mae: input lengths differ");
    if (pred.empty()) throw EmptyInput("mae: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred[i] - truth[i]);
    return acc / static_cast<double>(pred.size());
}

std::pair<double, double> mse_rmse(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw DimensionMismatch("mse_rmse: input lengths differ");
    if (pred.empty()) throw EmptyInput("mse_rmse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - truth[i];
        acc += d * d;
    }
    double mse = acc / static_cast<double>(pred.size());
    return {mse, std::sqrt(mse)};
}

MetricReport evaluate_predictions(const std::string& method_name, std::span<const double> pred,
                                  std::span<const double> truth) {
    MetricReport report;
    report.method_name = method_name;
    report.mae = mae(pred, truth);
    auto [mse, rmse] = mse_rmse(pred, truth);
    report.mse = mse;
    report.rmse = rmse;
    report.n = pred.size();
    return report;
}

namespace {

struct MethodInfo {
    std::string key;
    std::string label;          // report row label
    double reference_mae;       // previously published result for the default config
    std::vector<std::string> members; // base-learner keys; empty for base methods
};

const std::vector<MethodInfo>& method_table() {
    static const std::vector<MethodInfo> table = {
        {"random_forest", "Random Forest", 0.65, {}},
        {"gbt", "XGBoost", 2.73, {}},
        {"mlp", "Neural Network", 0.62, {}},
        {"mlp_gbt", "Neural Network And XGBoost Ensemble", 2.2, {"mlp", "gbt"}},
        {"mlp_random_forest", "Neural Network And Random Forest Ensemble", 0.58,
         {"mlp", "random_forest"}},
        {"mlp_gbt_random_forest", "Neural Network,XGBoost,Random Forest Ensemble", 1.74,
         {"mlp", "gbt", "random_forest"}},
    };
    return table;
}

double peak_rss_mb_now() {
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    return static_cast<double>(usage.ru_maxrss) / 1024.0; // ru_maxrss is KiB on Linux
}

} // namespace

const std::vector<std::string>& comparison_method_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& info : method_table()) out.push_back(info.key);
        return out;
    }();
    return keys;
}

ComparisonTable compare_methods(const Table& train, const Table& test,
                                const CompareConfig& config) {
    std::vector<std::string> selected =
        config.methods.empty() ? comparison_method_keys() : config.methods;
    for (const auto& key : selected) {
        bool known = std::any_of(method_table().begin(), method_table().end(),
                                 [&](const MethodInfo& m) { return m.key == key; });
        if (!known) throw Error("unknown comparison method: '" + key + "'");
    }

    PreprocessPipeline pipeline;
    pipeline.fit(train);
    auto [x_train, y_train] = pipeline.transform(train);
    auto [x_test, y_test] = pipeline.transform(test);

    ComparisonTable table;
    table.train_rows = x_train.rows();
    table.test_rows = x_test.rows();

    double train_mean = 0.0;
    for (double v : y_train) train_mean += v;
    train_mean /= static_cast<double>(y_train.size());
    std::vector<double> baseline_pred(y_test.size(), train_mean);
    table.baseline_mae = mae(baseline_pred, y_test);

    // Decouple per-method seeds from the master seed.
    ForestConfig forest_config = config.forest;
    forest_config.seed = derive_stream(config.seed, 1);
    GbtConfig gbt_config = config.gbt;
    gbt_config.seed = derive_stream(config.seed, 2);
    MlpSpec mlp_spec = config.mlp;
    mlp_spec.train.seed = derive_stream(config.seed, 3);

    auto base_needed = [&](const std::string& base_key) {
        for (const auto& key : selected) {
            for (const auto& info : method_table()) {
                if (info.key != key) continue;
                if (info.key == base_key) return true;
                if (std::find(info.members.begin(), info.members.end(), base_key) !=
                    info.members.end())
                    return true;
            }
        }
        return false;
    };

    struct FittedBase {
        std::shared_ptr<Regressor> model;
        std::vector<double> test_pred;
        double fit_seconds = 0.0;
        double peak_rss_mb = 0.0;
    };
    std::map<std::string, FittedBase> bases;

    auto fit_base = [&](const std::string& key) {
        ModelSpec spec = key == "random_forest" ? ModelSpec(forest_config)
                         : key == "gbt"         ? ModelSpec(gbt_config)
                                                : ModelSpec(mlp_spec);
        FittedBase base;
        double rss_before = peak_rss_mb_now();
        auto t0 = std::chrono::steady_clock::now();
        base.model = fit_regressor(spec, x_train, y_train);
        auto t1 = std::chrono::steady_clock::now();
        base.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
        base.peak_rss_mb = std::max(0.0, peak_rss_mb_now() - rss_before);
        base.test_pred = base.model->predict(x_test);
        bases[key] = std::move(base);
    };

    for (const auto& key : {"random_forest", "gbt", "mlp"})
        if (base_needed(key)) fit_base(key);

    for (const auto& info : method_table()) {
        if (std::find(selected.begin(), selected.end(), info.key) == selected.end()) continue;
        ComparisonRow row;
        row.reference_mae = info.reference_mae;
        if (info.members.empty()) {
            const FittedBase& base = bases.at(info.key);
            row.metrics = evaluate_predictions(info.label, base.test_pred, y_test);
            row.fit_seconds = base.fit_seconds;
            row.peak_rss_mb = base.peak_rss_mb;
        } else {
            std::vector<std::shared_ptr<Regressor>> members;
            for (const auto& member_key : info.members) {
                const FittedBase& base = bases.at(member_key);
                members.push_back(base.model);
                row.fit_seconds += base.fit_seconds;
                row.peak_rss_mb = std::max(row.peak_rss_mb, base.peak_rss_mb);
            }
            VotingRegressor ensemble(members);
            std::vector<double> pred = ensemble.predict_vote(x_test);
            row.metrics = evaluate_predictions(info.label, pred, y_test);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out += "\"";
    return out;
}

} // namespace

std::string comparison_to_text(const ComparisonTable& table) {
    std::size_t name_width = 6;
    for (const auto& row : table.rows)
        name_width = std::max(name_width, row.metrics.method_name.size());

    std::ostringstream out;
    out << std::string(name_width, ' ') << "  " << "         mae" << "          mse"
        << "         rmse" << "    paper_mae" << "  fit_seconds" << "  peak_rss_mb" << "\n";
    for (const auto& row : table.rows) {
        out << row.metrics.method_name
            << std::string(name_width - row.metrics.method_name.size(), ' ') << "  ";
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%12.4f %12.4f %12.4f %12.2f %12.3f %12.1f",
                      row.metrics.mae, row.metrics.mse, row.metrics.rmse, row.reference_mae,
                      row.fit_seconds, row.peak_rss_mb);
        out << buf << "\n";
    }
    out << "\n";
    out << "test rows: " << table.test_rows << ", train rows: " << table.train_rows << "\n";
    out << "baseline (predict train mean) MAE: " << fmt(table.baseline_mae, 4) << "\n";
    out << "paper_mae column: previously published reference values for the default\n"
           "configurations; shown for context, not computed by this run.\n";
    return out.str();
}

std::string comparison_to_csv(const ComparisonTable& table) {
    std::string out = "method,mae,mse,rmse,paper_mae\n";
    for (const auto& row : table.rows) {
        out += csv_field(row.metrics.method_name);
        out += ",";
        out += fmt17(row.metrics.mae);
        out += ",";
        out += fmt17(row.metrics.mse);
        out += ",";
        out += fmt17(row.metrics.rmse);
        out += ",";
        out += fmt17(row.reference_mae);
        out += "\n";
    }
    return out;
}

nlohmann::json comparison_to_json(const ComparisonTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"method", row.metrics.method_name},
                        {"mae", row.metrics.mae},
                        {"mse", row.metrics.mse},
                        {"rmse", row.metrics.rmse},
                        {"paper_mae", row.reference_mae},
                        {"n", row.metrics.n},
                        {"fit_seconds", row.fit_seconds},
                        {"peak_rss_mb", row.peak_rss_mb}});
    }
    return {{"rows", rows},
            {"baseline_mae", table.baseline_mae},
            {"train_rows", table.train_rows},
            {"test_rows", table.test_rows}};
}

} // namespace emml
