#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "emml/matrix.hpp"
#include "emml/tree.hpp"

namespace emml {

// Second-order boosted trees with squared-error objective, L2 leaf
// regularization lambda and split-gain threshold gamma.
struct GbtConfig {
    int n_estimators = 1000;
    double learning_rate = 0.05;
    std::string objective = "squared_error"; // only supported objective
    int max_depth = 6;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
    std::uint64_t seed = 42;
};

struct GbtModel {
    double base_score = 0.0;
    std::vector<Tree> trees; // leaves store weights w
    GbtConfig config;
    std::size_t n_features = 0;
};

// g_i = pred_i - y_i, h_i = 1 for the squared objective.
void grad_hess_squared(std::span<const double> pred, std::span<const double> y,
                       std::vector<double>& g, std::vector<double>& h);

struct LeafSplitEval {
    double w_left = 0.0;
    double w_right = 0.0;
    double split_gain = 0.0; // already includes the -gamma penalty
    bool accepted = false;   // gain > 0 and both child hessians >= min_child_weight
};

// w = -G/(H+lambda) per side;
// gain = 0.5*(GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)) - gamma.
LeafSplitEval leaf_weight_and_gain(double g_left, double h_left, double g_right, double h_right,
                                   const GbtConfig& config);

// base_score = mean(y); each round fits one tree to (g, h) at the current
// predictions and updates them by learning_rate * tree(x). Split search may
// parallelize across features; results are bit-identical to fit_gbt_serial.
GbtModel fit_gbt(const Matrix& x, std::span<const double> y, const GbtConfig& config);
GbtModel fit_gbt_serial(const Matrix& x, std::span<const double> y, const GbtConfig& config);

// base_score + learning_rate * sum of tree outputs, summed in tree order.
std::vector<double> predict_gbt(const GbtModel& model, const Matrix& x);

struct GbtSearchSpace {
    int n_estimators_min = 100;
    int n_estimators_max = 1000;
    double learning_rate_min = 0.01; // log-uniform
    double learning_rate_max = 0.3;
    int max_depth_min = 3;
    int max_depth_max = 9;
    GbtConfig base; // remaining knobs copied into every sample
};

struct GbtSearchEntry {
    GbtConfig config;
    double val_mae = 0.0;
};

struct GbtSearchResult {
    GbtConfig best;
    double best_val_mae = 0.0;
    std::vector<GbtSearchEntry> table; // in sampling order
};

// Samples k configurations uniformly from the space with a seeded RNG, fits
// each on the train split and scores MAE on the validation split. Ties keep
// the first sampled configuration.
GbtSearchResult random_search(const GbtSearchSpace& space, int k, const Matrix& x_train,
                              std::span<const double> y_train, const Matrix& x_val,
                              std::span<const double> y_val, std::uint64_t seed);

} // namespace emml
