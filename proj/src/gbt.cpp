#include "emml/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emml/errors.hpp"
#include "emml/parallel.hpp"
#include "emml/rng.hpp"

namespace emml {

void grad_hess_squared(std::span<const double> pred, std::span<const double> y,
                       std::vector<double>& g, std::vector<double>& h) {
    if (pred.size() != y.size())
        throw DimensionMismatch("grad_hess_squared: pred and y must agree");
    g.resize(pred.size());
    h.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        g[i] = pred[i] - y[i];
        h[i] = 1.0;
    }
}

LeafSplitEval leaf_weight_and_gain(double g_left, double h_left, double g_right, double h_right,
                                   const GbtConfig& config) {
    const double l = config.lambda;
    LeafSplitEval eval;
    eval.w_left = -g_left / (h_left + l);
    eval.w_right = -g_right / (h_right + l);
    const double g_all = g_left + g_right;
    const double h_all = h_left + h_right;
    eval.split_gain = 0.5 * (g_left * g_left / (h_left + l) + g_right * g_right / (h_right + l) -
                             g_all * g_all / (h_all + l)) -
                      config.gamma;
    eval.accepted = eval.split_gain > 0.0 && h_left >= config.min_child_weight &&
                    h_right >= config.min_child_weight;
    return eval;
}

namespace {

struct GbtCandidate {
    bool valid = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

struct GbtNodeView {
    const Matrix& x;
    std::span<const double> g;
    std::span<const double> h;
    std::span<const std::size_t> rows;
    const GbtConfig& config;
};

GbtCandidate scan_feature(const GbtNodeView& node, std::size_t feature,
                          std::vector<std::size_t>& order) {
    const std::size_t m = node.rows.size();
    order.resize(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double xa = node.x.at(node.rows[a], feature), xb = node.x.at(node.rows[b], feature);
        if (xa != xb) return xa < xb;
        return node.rows[a] < node.rows[b];
    });

    double g_tot = 0.0, h_tot = 0.0;
    for (std::size_t r : node.rows) {
        g_tot += node.g[r];
        h_tot += node.h[r];
    }

    GbtCandidate best;
    double gl = 0.0, hl = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        std::size_t r = node.rows[order[k]];
        gl += node.g[r];
        hl += node.h[r];
        double xa = node.x.at(r, feature);
        double xb = node.x.at(node.rows[order[k + 1]], feature);
        if (xa == xb) continue;
        LeafSplitEval eval = leaf_weight_and_gain(gl, hl, g_tot - gl, h_tot - hl, node.config);
        if (eval.accepted && (!best.valid || eval.split_gain > best.gain)) {
            best.valid = true;
            best.feature = feature;
            best.threshold = 0.5 * (xa + xb);
            best.gain = eval.split_gain;
        }
    }
    return best;
}

// Best candidate across features; per-feature scans may run in parallel, the
// reduction is always in ascending feature order.
GbtCandidate find_node_split(const GbtNodeView& node, bool parallel) {
    const std::size_t d = node.x.cols();
    std::vector<GbtCandidate> per_feature(d);
    if (parallel) {
        GbtCandidate* out = per_feature.data();
        const GbtNodeView* np = &node;
        parallel_for(d, [=](std::size_t f) {
            std::vector<std::size_t> order;
            out[f] = scan_feature(*np, f, order);
        });
    } else {
        std::vector<std::size_t> order;
        for (std::size_t f = 0; f < d; ++f) per_feature[f] = scan_feature(node, f, order);
    }
    GbtCandidate best;
    for (const GbtCandidate& c : per_feature)
        if (c.valid && (!best.valid || c.gain > best.gain)) best = c;
    return best;
}

struct GbtTreeBuilder {
    const Matrix& x;
    std::span<const double> g;
    std::span<const double> h;
    const GbtConfig& config;
    bool parallel;
    Tree out;

    std::int32_t build(std::span<std::size_t> rows, int depth) {
        auto index = static_cast<std::int32_t>(out.nodes.size());
        out.nodes.emplace_back();

        double g_sum = 0.0, h_sum = 0.0;
        for (std::size_t r : rows) {
            g_sum += g[r];
            h_sum += h[r];
        }
        out.nodes[index].value = -g_sum / (h_sum + config.lambda);

        if (depth >= config.max_depth || rows.size() < 2) return index;
        GbtNodeView view{x, g, h, rows, config};
        GbtCandidate c = find_node_split(view, parallel);
        if (!c.valid) return index;

        auto mid = std::stable_partition(rows.begin(), rows.end(), [&](std::size_t r) {
            return x.at(r, c.feature) <= c.threshold;
        });
        auto left_rows = rows.subspan(0, static_cast<std::size_t>(mid - rows.begin()));
        auto right_rows = rows.subspan(left_rows.size());
        std::int32_t left = build(left_rows, depth + 1);
        std::int32_t right = build(right_rows, depth + 1);
        out.nodes[index].feature = static_cast<std::int32_t>(c.feature);
        out.nodes[index].threshold = c.threshold;
        out.nodes[index].left = left;
        out.nodes[index].right = right;
        return index;
    }
};

GbtModel fit_gbt_impl(const Matrix& x, std::span<const double> y, const GbtConfig& config,
                      bool parallel) {
    if (x.rows() != y.size()) throw DimensionMismatch("fit_gbt: x rows and y must agree");
    if (y.empty()) throw EmptyInput("fit_gbt: no samples");
    if (!(config.learning_rate > 0.0)) throw Error("fit_gbt: learning_rate must be > 0");
    if (config.n_estimators < 0) throw Error("fit_gbt: n_estimators must be >= 0");
    if (config.objective != "squared_error")
        throw Error("fit_gbt: unsupported objective '" + config.objective + "'");
    if (!x.all_finite()) throw NonFiniteInput("fit_gbt: non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v)) throw NonFiniteInput("fit_gbt: non-finite target value");

    GbtModel model;
    model.config = config;
    model.n_features = x.cols();
    model.base_score = 0.0;
    for (double v : y) model.base_score += v;
    model.base_score /= static_cast<double>(y.size());

    std::vector<double> pred(y.size(), model.base_score);
    std::vector<double> g, h;
    std::vector<std::size_t> rows(y.size());
    for (int round = 0; round < config.n_estimators; ++round) {
        grad_hess_squared(pred, y, g, h);
        GbtTreeBuilder builder{x, g, h, config, parallel, Tree{}};
        builder.out.n_features = x.cols();
        std::iota(rows.begin(), rows.end(), 0);
        builder.build(rows, 0);
        Tree tree = std::move(builder.out);
        for (std::size_t r = 0; r < y.size(); ++r)
            pred[r] += config.learning_rate * predict_tree_row(tree, x.row(r));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

} // namespace

GbtModel fit_gbt(const Matrix& x, std::span<const double> y, const GbtConfig& config) {
    return fit_gbt_impl(x, y, config, true);
}

GbtModel fit_gbt_serial(const Matrix& x, std::span<const double> y, const GbtConfig& config) {
    return fit_gbt_impl(x, y, config, false);
}

std::vector<double> predict_gbt(const GbtModel& model, const Matrix& x) {
    if (x.cols() != model.n_features)
        throw DimensionMismatch("predict_gbt: expected " + std::to_string(model.n_features) +
                                " features, got " + std::to_string(x.cols()));
    std::vector<double> out(x.rows(), model.base_score);
    for (const Tree& tree : model.trees)
        for (std::size_t r = 0; r < x.rows(); ++r)
            out[r] += model.config.learning_rate * predict_tree_row(tree, x.row(r));
    return out;
}

GbtSearchResult random_search(const GbtSearchSpace& space, int k, const Matrix& x_train,
                              std::span<const double> y_train, const Matrix& x_val,
                              std::span<const double> y_val, std::uint64_t seed) {
    if (k < 1) throw EmptySpace("random_search: k must be >= 1");
    if (space.n_estimators_min > space.n_estimators_max || space.n_estimators_min < 0 ||
        space.max_depth_min > space.max_depth_max ||
        !(space.learning_rate_min > 0.0) || space.learning_rate_min > space.learning_rate_max)
        throw EmptySpace("random_search: empty parameter space");
    if (y_val.empty()) throw EmptyInput("random_search: empty validation set");

    Pcg32 rng(derive_stream(seed, 0x736561726368ull)); // "search" stream tag
    GbtSearchResult result;
    for (int i = 0; i < k; ++i) {
        GbtConfig config = space.base;
        config.n_estimators =
            space.n_estimators_min +
            static_cast<int>(rng.bounded(static_cast<std::uint32_t>(
                space.n_estimators_max - space.n_estimators_min + 1)));
        config.learning_rate = std::exp(
            rng.uniform(std::log(space.learning_rate_min), std::log(space.learning_rate_max)));
        config.max_depth =
            space.max_depth_min + static_cast<int>(rng.bounded(static_cast<std::uint32_t>(
                                      space.max_depth_max - space.max_depth_min + 1)));

        GbtModel model = fit_gbt(x_train, y_train, config);
        std::vector<double> pred = predict_gbt(model, x_val);
        double mae = 0.0;
        for (std::size_t r = 0; r < y_val.size(); ++r) mae += std::abs(pred[r] - y_val[r]);
        mae /= static_cast<double>(y_val.size());
        result.table.push_back({config, mae});
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i)
        if (result.table[i].val_mae < result.table[best].val_mae) best = i;
    result.best = result.table[best].config;
    result.best_val_mae = result.table[best].val_mae;
    return result;
}

} // namespace emml
