#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emml/matrix.hpp"
#include "emml/rng.hpp"
#include "emml/tree.hpp"

namespace emml {

struct ForestConfig {
    int n_estimators = 250;
    TreeConfig tree{.max_depth = 9, .min_samples_leaf = 1,
                    .criterion = SplitCriterion::absolute, .seed = 42};
    bool bootstrap = true;
    double max_features_fraction = 1.0; // fraction of features considered per split
    std::uint64_t seed = 42;
};

struct ForestModel {
    std::vector<Tree> trees;
    ForestConfig config;
    std::size_t n_features = 0;
};

// Exactly n draws with replacement from [0, n). Tree i uses the stream
// derive_stream(config.seed, i), so results do not depend on scheduling.
std::vector<std::size_t> bootstrap_indices(Pcg32& rng, std::size_t n);

// Bagged fit: trees are trained independently and in parallel; the serial
// variant is the reference the kernels are checked against.
ForestModel fit_forest(const Matrix& x, std::span<const double> y, const ForestConfig& config);
ForestModel fit_forest_serial(const Matrix& x, std::span<const double> y,
                              const ForestConfig& config);

// Arithmetic mean of member predictions, accumulated in tree order per row.
// The parallel variant splits across rows and is bit-identical to the serial
// one.
std::vector<double> predict_forest(const ForestModel& model, const Matrix& x);
std::vector<double> predict_forest_serial(const ForestModel& model, const Matrix& x);

} // namespace emml
