#include "emml/forest.hpp"

#include <numeric>

#include "emml/errors.hpp"
#include "emml/parallel.hpp"

namespace emml {

std::vector<std::size_t> bootstrap_indices(Pcg32& rng, std::size_t n) {
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = rng.bounded(static_cast<std::uint32_t>(n));
    return indices;
}

namespace {

void check_inputs(const Matrix& x, std::span<const double> y, const ForestConfig& config) {
    if (x.rows() != y.size()) throw DimensionMismatch("fit_forest: x rows and y must agree");
    if (y.empty()) throw EmptyInput("fit_forest: no samples");
    if (config.n_estimators < 1) throw Error("fit_forest: n_estimators must be >= 1");
    if (!(config.max_features_fraction > 0.0 && config.max_features_fraction <= 1.0))
        throw Error("fit_forest: max_features_fraction must lie in (0,1]");
}

Tree fit_one_tree(const Matrix& x, std::span<const double> y, const ForestConfig& config,
                  std::size_t tree_index) {
    Pcg32 rng(derive_stream(config.seed, tree_index));
    const std::size_t n = x.rows();
    std::vector<double> weights(n, 1.0);
    if (config.bootstrap) {
        std::vector<std::size_t> idx = bootstrap_indices(rng, n);
        Matrix xb = take_rows(x, idx);
        std::vector<double> yb = take(std::vector<double>(y.begin(), y.end()), idx);
        return fit_tree_sampled(xb, yb, weights, config.tree, config.max_features_fraction, rng);
    }
    return fit_tree_sampled(x, y, weights, config.tree, config.max_features_fraction, rng);
}

} // namespace

ForestModel fit_forest(const Matrix& x, std::span<const double> y, const ForestConfig& config) {
    check_inputs(x, y, config);
    ForestModel model;
    model.config = config;
    model.n_features = x.cols();
    model.trees.resize(static_cast<std::size_t>(config.n_estimators));
    Tree* trees = model.trees.data();
    const Matrix* xp = &x;
    parallel_for(model.trees.size(),
                 [=, &config](std::size_t i) { trees[i] = fit_one_tree(*xp, y, config, i); });
    return model;
}

ForestModel fit_forest_serial(const Matrix& x, std::span<const double> y,
                              const ForestConfig& config) {
    check_inputs(x, y, config);
    ForestModel model;
    model.config = config;
    model.n_features = x.cols();
    model.trees.reserve(static_cast<std::size_t>(config.n_estimators));
    for (std::size_t i = 0; i < static_cast<std::size_t>(config.n_estimators); ++i)
        model.trees.push_back(fit_one_tree(x, y, config, i));
    return model;
}

namespace {

// Mean over trees for one row, summed in tree order.
double predict_row(const ForestModel& model, std::span<const double> row) {
    double acc = 0.0;
    for (const Tree& tree : model.trees) acc += predict_tree_row(tree, row);
    return acc / static_cast<double>(model.trees.size());
}

void check_predict(const ForestModel& model, const Matrix& x) {
    if (model.trees.empty()) throw Error("predict_forest: model is not fitted");
    if (x.cols() != model.n_features)
        throw DimensionMismatch("predict_forest: expected " + std::to_string(model.n_features) +
                                " features, got " + std::to_string(x.cols()));
}

} // namespace

std::vector<double> predict_forest(const ForestModel& model, const Matrix& x) {
    check_predict(model, x);
    std::vector<double> out(x.rows());
    double* out_ptr = out.data();
    const ForestModel* mp = &model;
    const Matrix* xp = &x;
    parallel_for(x.rows(), [=](std::size_t r) { out_ptr[r] = predict_row(*mp, xp->row(r)); });
    return out;
}

std::vector<double> predict_forest_serial(const ForestModel& model, const Matrix& x) {
    check_predict(model, x);
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_row(model, x.row(r));
    return out;
}

} // namespace emml
