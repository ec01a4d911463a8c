#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "emml/matrix.hpp"
#include "emml/rng.hpp"

namespace emml {

enum class SplitCriterion { squared, absolute };

std::string to_string(SplitCriterion c);
SplitCriterion criterion_from_string(const std::string& s);

struct TreeConfig {
    int max_depth = 9;        // path length limit in edges; 0 means a single leaf
    int min_samples_leaf = 1;
    SplitCriterion criterion = SplitCriterion::squared;
    std::uint64_t seed = 42;
};

// Internal nodes route x[feature] <= threshold to the left child.
struct TreeNode {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0; // leaf payload, target units
    std::int32_t left = -1;
    std::int32_t right = -1;
    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    std::size_t n_features = 0;

    bool operator==(const Tree&) const = default;
};

struct SplitResult {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
};

// Best (feature, threshold) by weighted impurity decrease. Impurity is the
// variance (squared) or the mean absolute deviation about the weighted median
// (absolute). Thresholds are midpoints between consecutive distinct sorted
// feature values. Ties break to the lowest feature index, then the lowest
// threshold. Returns nullopt when no candidate reduces impurity while leaving
// min_samples_leaf samples on each side.
//
// The absolute criterion runs on incrementally updated order-statistic trees;
// best_split_naive recomputes every candidate from scratch in O(n^2 log n) and
// is kept as the reference implementation for tests and benchmarks.
std::optional<SplitResult> best_split(const Matrix& x, std::span<const double> y,
                                      std::span<const double> sample_weights,
                                      const TreeConfig& config);
std::optional<SplitResult> best_split_naive(const Matrix& x, std::span<const double> y,
                                            std::span<const double> sample_weights,
                                            const TreeConfig& config);

// Naive-path score of a single candidate, recomputed from scratch. Lets tests
// confirm co-optimality when float noise breaks an exact tie differently in
// the two search paths.
double impurity_decrease_at(const Matrix& x, std::span<const double> y,
                            std::span<const double> sample_weights, std::size_t feature,
                            double threshold, const TreeConfig& config);

// Greedy CART fit. Leaf values are the weighted mean (squared) or the weighted
// lower median (absolute) of the samples reaching the leaf. Deterministic for
// identical inputs and seed.
Tree fit_tree(const Matrix& x, std::span<const double> y,
              std::span<const double> sample_weights, const TreeConfig& config);

// Variant used by the forest: when max_features_fraction < 1 each split
// considers a random subset of features drawn from rng.
Tree fit_tree_sampled(const Matrix& x, std::span<const double> y,
                      std::span<const double> sample_weights, const TreeConfig& config,
                      double max_features_fraction, Pcg32& rng);

std::vector<double> predict_tree(const Tree& tree, const Matrix& x);
double predict_tree_row(const Tree& tree, std::span<const double> row);

// Nested JSON: internal {f, t, l, r}, leaf {v}.
nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& j, std::size_t n_features);

// Weighted lower median: smallest y whose cumulative weight reaches half the
// total. Exposed for reuse by tests and the split search.
double weighted_median_lower(std::span<const double> y, std::span<const double> w);
double weighted_mean(std::span<const double> y, std::span<const double> w);

} // namespace emml
