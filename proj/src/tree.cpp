#include "emml/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "emml/errors.hpp"

namespace emml {

std::string to_string(SplitCriterion c) {
    return c == SplitCriterion::squared ? "squared" : "absolute";
}

SplitCriterion criterion_from_string(const std::string& s) {
    if (s == "squared") return SplitCriterion::squared;
    if (s == "absolute") return SplitCriterion::absolute;
    throw Error("unknown split criterion: '" + s + "'");
}

double weighted_mean(std::span<const double> y, std::span<const double> w) {
    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sw += w[i];
        swy += w[i] * y[i];
    }
    return sw > 0.0 ? swy / sw : 0.0;
}

double weighted_median_lower(std::span<const double> y, std::span<const double> w) {
    if (y.empty()) return 0.0;
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    double total = 0.0;
    for (double v : w) total += v;
    double acc = 0.0;
    for (std::size_t i : order) {
        acc += w[i];
        if (acc >= 0.5 * total) return y[i];
    }
    return y[order.back()];
}

namespace {

// ---------------------------------------------------------------------------
// Fenwick trees over y-ranks, used by the absolute-criterion scan.
// ---------------------------------------------------------------------------

void fenwick_add(std::vector<double>& t, std::size_t rank, double v) {
    for (std::size_t x = rank + 1; x < t.size(); x += x & (~x + 1)) t[x] += v;
}

double fenwick_prefix(const std::vector<double>& t, std::size_t rank) {
    double s = 0.0;
    for (std::size_t x = rank + 1; x > 0; x -= x & (~x + 1)) s += t[x];
    return s;
}

// Smallest 0-based rank whose prefix sum reaches target.
std::size_t fenwick_lower_bound(const std::vector<double>& t, double target) {
    std::size_t n = t.size() - 1;
    if (n == 0) return 0;
    std::size_t pos = 0;
    double acc = 0.0;
    for (std::size_t k = std::bit_floor(n); k > 0; k >>= 1) {
        if (pos + k <= n && acc + t[pos + k] < target) {
            pos += k;
            acc += t[pos];
        }
    }
    return pos; // 0-based rank of the answer
}

struct Candidate {
    bool valid = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = 0.0;
};

// State shared by the per-feature scans of one node.
struct NodeView {
    const Matrix& x;
    std::span<const double> y;
    std::span<const double> w;
    std::span<const std::size_t> rows; // rows of x belonging to this node
    int min_samples_leaf;
};

// sum of w*|y - median| for one side, from its Fenwick pair
double side_abs_dev(const std::vector<double>& fw, const std::vector<double>& fwy,
                    double w_side, double s_side, const std::vector<double>& uniq) {
    if (!(w_side > 0.0)) return 0.0;
    std::size_t mrank = fenwick_lower_bound(fw, 0.5 * w_side);
    double med = uniq[mrank];
    double w_le = fenwick_prefix(fw, mrank);
    double s_le = fenwick_prefix(fwy, mrank);
    return med * (2.0 * w_le - w_side) - 2.0 * s_le + s_side;
}

struct AbsWorkspace {
    std::vector<double> uniq_y;
    std::vector<std::size_t> rank_of; // per node position
    std::vector<double> lw, lwy, rw, rwy;
    double w_total = 0.0;
    double s_total = 0.0;
    double parent_abs = 0.0; // sum of w*|y - median| over the node

    void build(const NodeView& node) {
        const std::size_t m = node.rows.size();
        uniq_y.clear();
        uniq_y.reserve(m);
        for (std::size_t r : node.rows) uniq_y.push_back(node.y[r]);
        std::sort(uniq_y.begin(), uniq_y.end());
        uniq_y.erase(std::unique(uniq_y.begin(), uniq_y.end()), uniq_y.end());

        rank_of.resize(m);
        w_total = 0.0;
        s_total = 0.0;
        for (std::size_t p = 0; p < m; ++p) {
            std::size_t r = node.rows[p];
            rank_of[p] = static_cast<std::size_t>(
                std::lower_bound(uniq_y.begin(), uniq_y.end(), node.y[r]) - uniq_y.begin());
            w_total += node.w[r];
            s_total += node.w[r] * node.y[r];
        }

        const std::size_t size = uniq_y.size() + 1;
        lw.assign(size, 0.0);
        lwy.assign(size, 0.0);
        rw.assign(size, 0.0);
        rwy.assign(size, 0.0);
        for (std::size_t p = 0; p < m; ++p) {
            std::size_t r = node.rows[p];
            fenwick_add(rw, rank_of[p], node.w[r]);
            fenwick_add(rwy, rank_of[p], node.w[r] * node.y[r]);
        }
        parent_abs = side_abs_dev(rw, rwy, w_total, s_total, uniq_y);
    }

    void reset_sides(const NodeView& node) {
        std::fill(lw.begin(), lw.end(), 0.0);
        std::fill(lwy.begin(), lwy.end(), 0.0);
        std::fill(rw.begin(), rw.end(), 0.0);
        std::fill(rwy.begin(), rwy.end(), 0.0);
        for (std::size_t p = 0; p < node.rows.size(); ++p) {
            std::size_t r = node.rows[p];
            fenwick_add(rw, rank_of[p], node.w[r]);
            fenwick_add(rwy, rank_of[p], node.w[r] * node.y[r]);
        }
    }
};

// Positions of node.rows sorted by (feature value, row index).
void feature_order(const NodeView& node, std::size_t feature, std::vector<std::size_t>& order) {
    order.resize(node.rows.size());
    std::iota(order.begin(), order.end(), 0);
    const Matrix& x = node.x;
    std::span<const std::size_t> rows = node.rows;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double xa = x.at(rows[a], feature), xb = x.at(rows[b], feature);
        if (xa != xb) return xa < xb;
        return rows[a] < rows[b];
    });
}

Candidate scan_feature_squared(const NodeView& node, std::size_t feature,
                               std::vector<std::size_t>& order) {
    const std::size_t m = node.rows.size();
    feature_order(node, feature, order);

    double w_tot = 0.0, s_tot = 0.0;
    for (std::size_t r : node.rows) {
        w_tot += node.w[r];
        s_tot += node.w[r] * node.y[r];
    }

    Candidate best;
    double wl = 0.0, sl = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        std::size_t r = node.rows[order[k]];
        wl += node.w[r];
        sl += node.w[r] * node.y[r];
        double xa = node.x.at(r, feature);
        double xb = node.x.at(node.rows[order[k + 1]], feature);
        if (xa == xb) continue;
        const auto left_count = static_cast<long>(k + 1);
        const auto right_count = static_cast<long>(m - k - 1);
        if (left_count < node.min_samples_leaf || right_count < node.min_samples_leaf) continue;
        double wr = w_tot - wl, sr = s_tot - sl;
        if (!(wl > 0.0) || !(wr > 0.0)) continue;
        // variance-reduction identity: gain*W = S1L^2/WL + S1R^2/WR - S1^2/W
        double decrease = (sl * sl / wl + sr * sr / wr - s_tot * s_tot / w_tot) / w_tot;
        if (decrease > 0.0 && (!best.valid || decrease > best.decrease)) {
            best.valid = true;
            best.feature = feature;
            best.threshold = 0.5 * (xa + xb);
            best.decrease = decrease;
        }
    }
    return best;
}

Candidate scan_feature_absolute(const NodeView& node, std::size_t feature,
                                std::vector<std::size_t>& order, AbsWorkspace& ws) {
    const std::size_t m = node.rows.size();
    feature_order(node, feature, order);
    ws.reset_sides(node);

    Candidate best;
    double wl = 0.0, sl = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        std::size_t p = order[k];
        std::size_t r = node.rows[p];
        double wgt = node.w[r];
        double wy = wgt * node.y[r];
        fenwick_add(ws.lw, ws.rank_of[p], wgt);
        fenwick_add(ws.lwy, ws.rank_of[p], wy);
        fenwick_add(ws.rw, ws.rank_of[p], -wgt);
        fenwick_add(ws.rwy, ws.rank_of[p], -wy);
        wl += wgt;
        sl += wy;

        double xa = node.x.at(r, feature);
        double xb = node.x.at(node.rows[order[k + 1]], feature);
        if (xa == xb) continue;
        const auto left_count = static_cast<long>(k + 1);
        const auto right_count = static_cast<long>(m - k - 1);
        if (left_count < node.min_samples_leaf || right_count < node.min_samples_leaf) continue;
        double wr = ws.w_total - wl, sr = ws.s_total - sl;
        if (!(wl > 0.0) || !(wr > 0.0)) continue;
        double abs_l = side_abs_dev(ws.lw, ws.lwy, wl, sl, ws.uniq_y);
        double abs_r = side_abs_dev(ws.rw, ws.rwy, wr, sr, ws.uniq_y);
        double decrease = (ws.parent_abs - abs_l - abs_r) / ws.w_total;
        if (decrease > 0.0 && (!best.valid || decrease > best.decrease)) {
            best.valid = true;
            best.feature = feature;
            best.threshold = 0.5 * (xa + xb);
            best.decrease = decrease;
        }
    }
    return best;
}

bool y_is_constant(const NodeView& node) {
    if (node.rows.empty()) return true;
    double first = node.y[node.rows[0]];
    for (std::size_t r : node.rows)
        if (node.y[r] != first) return false;
    return true;
}

// Search over the given features; features must be in ascending order so that
// first-strictly-better reduction implements the tie rule.
Candidate search_split(const NodeView& node, const TreeConfig& config,
                       std::span<const std::size_t> features) {
    Candidate best;
    if (node.rows.size() < 2 * static_cast<std::size_t>(std::max(1, node.min_samples_leaf)))
        return best;
    if (y_is_constant(node)) return best;

    std::vector<std::size_t> order;
    AbsWorkspace ws;
    if (config.criterion == SplitCriterion::absolute) ws.build(node);

    for (std::size_t f : features) {
        Candidate c = config.criterion == SplitCriterion::squared
                          ? scan_feature_squared(node, f, order)
                          : scan_feature_absolute(node, f, order, ws);
        if (c.valid && (!best.valid || c.decrease > best.decrease)) best = c;
    }
    return best;
}

void check_fit_inputs(const Matrix& x, std::span<const double> y, std::span<const double> w) {
    if (x.rows() != y.size() || x.rows() != w.size())
        throw DimensionMismatch("tree fit: x rows, y and sample_weights must agree");
    if (y.empty()) throw EmptyInput("tree fit: no samples");
    if (!x.all_finite()) throw NonFiniteInput("tree fit: non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v)) throw NonFiniteInput("tree fit: non-finite target value");
    for (double v : w)
        if (!std::isfinite(v) || v < 0.0) throw NonFiniteInput("tree fit: bad sample weight");
}

struct TreeBuilder {
    const Matrix& x;
    std::span<const double> y;
    std::span<const double> w;
    const TreeConfig& config;
    double max_features_fraction;
    Pcg32* rng;
    Tree out;
    std::vector<std::size_t> all_features;
    std::vector<std::size_t> feature_buf;

    double leaf_value(std::span<const std::size_t> rows) const {
        std::vector<double> ys, ws;
        ys.reserve(rows.size());
        ws.reserve(rows.size());
        for (std::size_t r : rows) {
            ys.push_back(y[r]);
            ws.push_back(w[r]);
        }
        return config.criterion == SplitCriterion::squared ? weighted_mean(ys, ws)
                                                           : weighted_median_lower(ys, ws);
    }

    std::span<const std::size_t> split_features() {
        if (max_features_fraction >= 1.0 || rng == nullptr) return all_features;
        const std::size_t d = all_features.size();
        auto k = static_cast<std::size_t>(
            std::ceil(max_features_fraction * static_cast<double>(d)));
        k = std::clamp<std::size_t>(k, 1, d);
        feature_buf = all_features;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + rng->bounded(static_cast<std::uint32_t>(d - i));
            std::swap(feature_buf[i], feature_buf[j]);
        }
        feature_buf.resize(k);
        std::sort(feature_buf.begin(), feature_buf.end());
        return feature_buf;
    }

    std::int32_t build(std::span<std::size_t> rows, int depth) {
        auto node_index = static_cast<std::int32_t>(out.nodes.size());
        out.nodes.emplace_back();
        out.nodes[node_index].value = leaf_value(rows);

        if (depth >= config.max_depth) return node_index;
        NodeView view{x, y, w, rows, std::max(1, config.min_samples_leaf)};
        Candidate c = search_split(view, config, split_features());
        if (!c.valid) return node_index;

        auto mid = std::stable_partition(rows.begin(), rows.end(), [&](std::size_t r) {
            return x.at(r, c.feature) <= c.threshold;
        });
        auto left_rows = rows.subspan(0, static_cast<std::size_t>(mid - rows.begin()));
        auto right_rows = rows.subspan(left_rows.size());

        std::int32_t left = build(left_rows, depth + 1);
        std::int32_t right = build(right_rows, depth + 1);
        out.nodes[node_index].feature = static_cast<std::int32_t>(c.feature);
        out.nodes[node_index].threshold = c.threshold;
        out.nodes[node_index].left = left;
        out.nodes[node_index].right = right;
        return node_index;
    }
};

Tree fit_tree_impl(const Matrix& x, std::span<const double> y, std::span<const double> w,
                   const TreeConfig& config, double max_features_fraction, Pcg32* rng) {
    check_fit_inputs(x, y, w);
    TreeBuilder builder{x, y, w, config, max_features_fraction, rng, Tree{}, {}, {}};
    builder.all_features.resize(x.cols());
    std::iota(builder.all_features.begin(), builder.all_features.end(), 0);
    builder.out.n_features = x.cols();

    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), 0);
    builder.build(rows, 0);
    return std::move(builder.out);
}

} // namespace

std::optional<SplitResult> best_split(const Matrix& x, std::span<const double> y,
                                      std::span<const double> sample_weights,
                                      const TreeConfig& config) {
    if (x.rows() != y.size() || x.rows() != sample_weights.size())
        throw DimensionMismatch("best_split: x rows, y and sample_weights must agree");
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<std::size_t> features(x.cols());
    std::iota(features.begin(), features.end(), 0);
    NodeView view{x, y, sample_weights, rows, std::max(1, config.min_samples_leaf)};
    Candidate c = search_split(view, config, features);
    if (!c.valid) return std::nullopt;
    return SplitResult{c.feature, c.threshold, c.decrease};
}

namespace {

// Reference path: recompute both sides from scratch for every candidate.
double side_impurity_naive(std::vector<double>& ys, std::vector<double>& ws,
                           SplitCriterion criterion) {
    double w_tot = 0.0;
    for (double v : ws) w_tot += v;
    if (!(w_tot > 0.0)) return 0.0;
    if (criterion == SplitCriterion::squared) {
        double mean = weighted_mean(ys, ws);
        double acc = 0.0;
        for (std::size_t i = 0; i < ys.size(); ++i) acc += ws[i] * (ys[i] - mean) * (ys[i] - mean);
        return acc / w_tot;
    }
    double med = weighted_median_lower(ys, ws);
    double acc = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) acc += ws[i] * std::abs(ys[i] - med);
    return acc / w_tot;
}

} // namespace

namespace {

// Shared by best_split_naive and impurity_decrease_at: score one candidate by
// recomputing both sides from scratch. Returns nullopt when min_samples_leaf
// is violated or a side is empty.
std::optional<double> naive_candidate_decrease(const Matrix& x, std::span<const double> y,
                                               std::span<const double> sample_weights,
                                               std::size_t feature, double threshold,
                                               const TreeConfig& config, double parent,
                                               double w_tot) {
    const auto msl = static_cast<std::size_t>(std::max(1, config.min_samples_leaf));
    std::vector<double> ly, lw, ry, rw;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        if (x.at(r, feature) <= threshold) {
            ly.push_back(y[r]);
            lw.push_back(sample_weights[r]);
        } else {
            ry.push_back(y[r]);
            rw.push_back(sample_weights[r]);
        }
    }
    if (ly.size() < msl || ry.size() < msl) return std::nullopt;
    double wl = 0.0, wr = 0.0;
    for (double v : lw) wl += v;
    for (double v : rw) wr += v;
    if (!(wl > 0.0) || !(wr > 0.0)) return std::nullopt;
    return parent - (wl * side_impurity_naive(ly, lw, config.criterion) +
                     wr * side_impurity_naive(ry, rw, config.criterion)) /
                        w_tot;
}

} // namespace

double impurity_decrease_at(const Matrix& x, std::span<const double> y,
                            std::span<const double> sample_weights, std::size_t feature,
                            double threshold, const TreeConfig& config) {
    if (x.rows() != y.size() || x.rows() != sample_weights.size())
        throw DimensionMismatch("impurity_decrease_at: x rows, y and sample_weights must agree");
    double w_tot = 0.0;
    for (double v : sample_weights) w_tot += v;
    std::vector<double> all_y(y.begin(), y.end());
    std::vector<double> all_w(sample_weights.begin(), sample_weights.end());
    const double parent = side_impurity_naive(all_y, all_w, config.criterion);
    auto decrease =
        naive_candidate_decrease(x, y, sample_weights, feature, threshold, config, parent, w_tot);
    return decrease.value_or(0.0);
}

std::optional<SplitResult> best_split_naive(const Matrix& x, std::span<const double> y,
                                            std::span<const double> sample_weights,
                                            const TreeConfig& config) {
    if (x.rows() != y.size() || x.rows() != sample_weights.size())
        throw DimensionMismatch("best_split_naive: x rows, y and sample_weights must agree");
    const std::size_t n = x.rows();
    const auto msl = static_cast<std::size_t>(std::max(1, config.min_samples_leaf));
    if (n < 2 * msl) return std::nullopt;

    double w_tot = 0.0;
    for (double v : sample_weights) w_tot += v;
    std::vector<double> all_y(y.begin(), y.end());
    std::vector<double> all_w(sample_weights.begin(), sample_weights.end());
    const double parent = side_impurity_naive(all_y, all_w, config.criterion);

    std::optional<SplitResult> best;
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::vector<double> values;
        values.reserve(n);
        for (std::size_t r = 0; r < n; ++r) values.push_back(x.at(r, f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t k = 0; k + 1 < values.size(); ++k) {
            double threshold = 0.5 * (values[k] + values[k + 1]);
            auto decrease = naive_candidate_decrease(x, y, sample_weights, f, threshold, config,
                                                     parent, w_tot);
            if (decrease && *decrease > 0.0 && (!best || *decrease > best->impurity_decrease))
                best = SplitResult{f, threshold, *decrease};
        }
    }
    return best;
}

Tree fit_tree(const Matrix& x, std::span<const double> y, std::span<const double> sample_weights,
              const TreeConfig& config) {
    return fit_tree_impl(x, y, sample_weights, config, 1.0, nullptr);
}

Tree fit_tree_sampled(const Matrix& x, std::span<const double> y,
                      std::span<const double> sample_weights, const TreeConfig& config,
                      double max_features_fraction, Pcg32& rng) {
    return fit_tree_impl(x, y, sample_weights, config, max_features_fraction, &rng);
}

double predict_tree_row(const Tree& tree, std::span<const double> row) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
        node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &tree.nodes[static_cast<std::size_t>(node->left)]
                   : &tree.nodes[static_cast<std::size_t>(node->right)];
    }
    return node->value;
}

std::vector<double> predict_tree(const Tree& tree, const Matrix& x) {
    if (tree.nodes.empty()) throw Error("predict_tree: tree is not fitted");
    if (x.cols() != tree.n_features)
        throw DimensionMismatch("predict_tree: expected " + std::to_string(tree.n_features) +
                                " features, got " + std::to_string(x.cols()));
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_tree_row(tree, x.row(r));
    return out;
}

namespace {

nlohmann::json node_to_json(const Tree& tree, std::int32_t index) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    if (node.is_leaf()) return nlohmann::json{{"v", node.value}};
    return nlohmann::json{{"f", node.feature},
                          {"t", node.threshold},
                          {"l", node_to_json(tree, node.left)},
                          {"r", node_to_json(tree, node.right)}};
}

std::int32_t node_from_json(const nlohmann::json& j, Tree& tree) {
    auto index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("v")) {
        tree.nodes[static_cast<std::size_t>(index)].value = j.at("v").get<double>();
        return index;
    }
    std::int32_t feature = j.at("f").get<std::int32_t>();
    double threshold = j.at("t").get<double>();
    std::int32_t left = node_from_json(j.at("l"), tree);
    std::int32_t right = node_from_json(j.at("r"), tree);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    node.feature = feature;
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    return index;
}

} // namespace

nlohmann::json tree_to_json(const Tree& tree) {
    if (tree.nodes.empty()) throw Error("tree_to_json: tree is not fitted");
    return node_to_json(tree, 0);
}

Tree tree_from_json(const nlohmann::json& j, std::size_t n_features) {
    Tree tree;
    tree.n_features = n_features;
    node_from_json(j, tree);
    return tree;
}

} // namespace emml
