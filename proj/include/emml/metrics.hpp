#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emml/dataset.hpp"
#include "emml/regressor.hpp"

namespace emml {

// Mean absolute error, target units.
double mae(std::span<const double> pred, std::span<const double> truth);

// Mean squared error and its square root.
std::pair<double, double> mse_rmse(std::span<const double> pred, std::span<const double> truth);

struct MetricReport {
    std::string method_name;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
};

MetricReport evaluate_predictions(const std::string& method_name, std::span<const double> pred,
                                  std::span<const double> truth);

// One comparison row. reference_mae carries the previously published result
// for the method's default configuration (the CSV/JSON column `paper_mae`);
// it is display-only and never asserted against.
struct ComparisonRow {
    MetricReport metrics;
    double reference_mae = 0.0;
    double fit_seconds = 0.0;  // volatile; kept out of the CSV format
    double peak_rss_mb = 0.0;  // high-water RSS delta while fitting, coarse
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    double baseline_mae = 0.0; // predict-the-train-mean on the test split
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
};

// Method keys accepted by CompareConfig::methods, in report order.
const std::vector<std::string>& comparison_method_keys();

struct CompareConfig {
    ForestConfig forest;                     // 250 trees, depth 9, absolute
    GbtConfig gbt;                           // 1000 rounds, lr 0.05
    MlpSpec mlp;                             // 500 epochs, batch 128, split 0.2
    std::vector<std::string> methods;        // empty means all six
    std::uint64_t seed = 42;
};

// Fits preprocessing on train only, fits each selected method, and evaluates
// MAE/MSE/RMSE on the test table. Base learners are fitted once and shared
// with the ensembles; with seeded fitting this is exactly equivalent to
// refitting each member. Ensemble rows report the summed member fit times.
ComparisonTable compare_methods(const Table& train, const Table& test,
                                const CompareConfig& config);

std::string comparison_to_text(const ComparisonTable& table);
// Deterministic columns only: method,mae,mse,rmse,paper_mae (timings vary
// across runs and would break byte-identical reports).
std::string comparison_to_csv(const ComparisonTable& table);
nlohmann::json comparison_to_json(const ComparisonTable& table);

} // namespace emml
