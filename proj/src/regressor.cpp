#include "emml/regressor.hpp"

#include "emml/ensemble.hpp"
#include "emml/errors.hpp"

namespace emml {

std::string model_type_of(const ModelSpec& spec) {
    if (std::holds_alternative<ForestConfig>(spec)) return "random_forest";
    if (std::holds_alternative<GbtConfig>(spec)) return "gbt";
    return "mlp";
}

std::unique_ptr<Regressor> make_regressor(const ModelSpec& spec) {
    if (const auto* forest = std::get_if<ForestConfig>(&spec))
        return std::make_unique<ForestRegressor>(*forest);
    if (const auto* gbt = std::get_if<GbtConfig>(&spec))
        return std::make_unique<GbtRegressor>(*gbt);
    return std::make_unique<MlpRegressor>(std::get<MlpSpec>(spec));
}

std::shared_ptr<Regressor> fit_regressor(const ModelSpec& spec, const Matrix& x,
                                         std::span<const double> y) {
    std::shared_ptr<Regressor> r = make_regressor(spec);
    r->fit(x, y);
    return r;
}

nlohmann::json forest_config_to_json(const ForestConfig& config) {
    return {{"n_estimators", config.n_estimators},
            {"bootstrap", config.bootstrap},
            {"max_features_fraction", config.max_features_fraction},
            {"seed", config.seed},
            {"tree",
             {{"max_depth", config.tree.max_depth},
              {"min_samples_leaf", config.tree.min_samples_leaf},
              {"criterion", to_string(config.tree.criterion)},
              {"seed", config.tree.seed}}}};
}

ForestConfig forest_config_from_json(const nlohmann::json& j) {
    ForestConfig config;
    config.n_estimators = j.at("n_estimators").get<int>();
    config.bootstrap = j.at("bootstrap").get<bool>();
    config.max_features_fraction = j.at("max_features_fraction").get<double>();
    config.seed = j.at("seed").get<std::uint64_t>();
    const auto& t = j.at("tree");
    config.tree.max_depth = t.at("max_depth").get<int>();
    config.tree.min_samples_leaf = t.at("min_samples_leaf").get<int>();
    config.tree.criterion = criterion_from_string(t.at("criterion").get<std::string>());
    config.tree.seed = t.at("seed").get<std::uint64_t>();
    return config;
}

nlohmann::json gbt_config_to_json(const GbtConfig& config) {
    return {{"n_estimators", config.n_estimators},
            {"learning_rate", config.learning_rate},
            {"objective", config.objective},
            {"max_depth", config.max_depth},
            {"lambda", config.lambda},
            {"gamma", config.gamma},
            {"min_child_weight", config.min_child_weight},
            {"seed", config.seed}};
}

GbtConfig gbt_config_from_json(const nlohmann::json& j) {
    GbtConfig config;
    config.n_estimators = j.at("n_estimators").get<int>();
    config.learning_rate = j.at("learning_rate").get<double>();
    config.objective = j.at("objective").get<std::string>();
    config.max_depth = j.at("max_depth").get<int>();
    config.lambda = j.at("lambda").get<double>();
    config.gamma = j.at("gamma").get<double>();
    config.min_child_weight = j.at("min_child_weight").get<double>();
    config.seed = j.at("seed").get<std::uint64_t>();
    return config;
}

// --- forest -----------------------------------------------------------------

void ForestRegressor::fit(const Matrix& x, std::span<const double> y) {
    model_ = fit_forest(x, y, config_);
    fitted_ = true;
}

std::vector<double> ForestRegressor::predict(const Matrix& x) const {
    if (!fitted_) throw NotFitted("random_forest model is not fitted");
    return predict_forest(model_, x);
}

const ForestModel& ForestRegressor::model() const {
    if (!fitted_) throw NotFitted("random_forest model is not fitted");
    return model_;
}

nlohmann::json ForestRegressor::to_json() const {
    if (!fitted_) throw NotFitted("random_forest model is not fitted");
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : model_.trees) trees.push_back(tree_to_json(tree));
    return {{"model_type", "random_forest"},
            {"config", forest_config_to_json(config_)},
            {"n_features", model_.n_features},
            {"trees", trees}};
}

std::unique_ptr<ForestRegressor> ForestRegressor::from_json(const nlohmann::json& j) {
    auto r = std::make_unique<ForestRegressor>(forest_config_from_json(j.at("config")));
    r->model_.config = r->config_;
    r->model_.n_features = j.at("n_features").get<std::size_t>();
    for (const auto& tj : j.at("trees"))
        r->model_.trees.push_back(tree_from_json(tj, r->model_.n_features));
    r->fitted_ = true;
    return r;
}

// --- gbt ---------------------------------------------------------------------

void GbtRegressor::fit(const Matrix& x, std::span<const double> y) {
    model_ = fit_gbt(x, y, config_);
    fitted_ = true;
}

std::vector<double> GbtRegressor::predict(const Matrix& x) const {
    if (!fitted_) throw NotFitted("gbt model is not fitted");
    return predict_gbt(model_, x);
}

const GbtModel& GbtRegressor::model() const {
    if (!fitted_) throw NotFitted("gbt model is not fitted");
    return model_;
}

nlohmann::json GbtRegressor::to_json() const {
    if (!fitted_) throw NotFitted("gbt model is not fitted");
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : model_.trees) trees.push_back(tree_to_json(tree));
    return {{"model_type", "gbt"},
            {"config", gbt_config_to_json(config_)},
            {"n_features", model_.n_features},
            {"base_score", model_.base_score},
            {"trees", trees}};
}

std::unique_ptr<GbtRegressor> GbtRegressor::from_json(const nlohmann::json& j) {
    auto r = std::make_unique<GbtRegressor>(gbt_config_from_json(j.at("config")));
    r->model_.config = r->config_;
    r->model_.n_features = j.at("n_features").get<std::size_t>();
    r->model_.base_score = j.at("base_score").get<double>();
    for (const auto& tj : j.at("trees"))
        r->model_.trees.push_back(tree_from_json(tj, r->model_.n_features));
    r->fitted_ = true;
    return r;
}

// --- mlp ---------------------------------------------------------------------

void MlpRegressor::fit(const Matrix& x, std::span<const double> y) {
    MlpArchitecture arch;
    arch.layer_widths.push_back(x.cols());
    for (std::size_t w : spec_.hidden_widths) arch.layer_widths.push_back(w);
    arch.layer_widths.push_back(1);
    model_ = he_init(arch, spec_.train.seed);
    history_ = train(model_, x, y, spec_.train);
    fitted_ = true;
}

std::vector<double> MlpRegressor::predict(const Matrix& x) const {
    if (!fitted_) throw NotFitted("mlp model is not fitted");
    return forward(model_, x);
}

const MlpModel& MlpRegressor::model() const {
    if (!fitted_) throw NotFitted("mlp model is not fitted");
    return model_;
}

const TrainResult& MlpRegressor::history() const {
    if (!fitted_) throw NotFitted("mlp model is not fitted");
    return history_;
}

nlohmann::json MlpRegressor::to_json() const {
    if (!fitted_) throw NotFitted("mlp model is not fitted");
    std::vector<std::size_t> widths;
    widths.push_back(model_.input_width());
    for (const auto& b : model_.biases) widths.push_back(b.size());

    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    for (std::size_t l = 0; l < model_.weights.size(); ++l) {
        weights.push_back(model_.weights[l].data()); // row-major
        biases.push_back(model_.biases[l]);
    }
    return {{"model_type", "mlp"},
            {"layer_widths", widths},
            {"weights", weights},
            {"biases", biases},
            {"adam",
             {{"beta1", 0.9}, {"beta2", 0.999}, {"epsilon", 1e-8},
              {"learning_rate", spec_.train.learning_rate}}},
            {"train",
             {{"epochs", spec_.train.epochs},
              {"batch_size", spec_.train.batch_size},
              {"validation_split", spec_.train.validation_split},
              {"seed", spec_.train.seed}}}};
}

std::unique_ptr<MlpRegressor> MlpRegressor::from_json(const nlohmann::json& j) {
    MlpSpec spec;
    auto widths = j.at("layer_widths").get<std::vector<std::size_t>>();
    if (widths.size() < 2) throw Error("mlp bundle: bad layer_widths");
    spec.hidden_widths.assign(widths.begin() + 1, widths.end() - 1);
    const auto& train_j = j.at("train");
    spec.train.epochs = train_j.at("epochs").get<int>();
    spec.train.batch_size = train_j.at("batch_size").get<int>();
    spec.train.validation_split = train_j.at("validation_split").get<double>();
    spec.train.seed = train_j.at("seed").get<std::uint64_t>();
    spec.train.learning_rate = j.at("adam").at("learning_rate").get<double>();

    auto r = std::make_unique<MlpRegressor>(spec);
    const auto& weights_j = j.at("weights");
    const auto& biases_j = j.at("biases");
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Matrix w(widths[l], widths[l + 1]);
        auto flat = weights_j.at(l).get<std::vector<double>>();
        if (flat.size() != widths[l] * widths[l + 1])
            throw Error("mlp bundle: weight shape mismatch at layer " + std::to_string(l));
        w.data() = std::move(flat);
        r->model_.weights.push_back(std::move(w));
        r->model_.biases.push_back(biases_j.at(l).get<std::vector<double>>());
        if (r->model_.biases.back().size() != widths[l + 1])
            throw Error("mlp bundle: bias shape mismatch at layer " + std::to_string(l));
    }
    r->fitted_ = true;
    return r;
}

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j) {
    const auto type = j.at("model_type").get<std::string>();
    if (type == "random_forest") return ForestRegressor::from_json(j);
    if (type == "gbt") return GbtRegressor::from_json(j);
    if (type == "mlp") return MlpRegressor::from_json(j);
    if (type == "voting") return VotingRegressor::from_json(j);
    throw Error("unknown model_type in bundle: '" + type + "'");
}

} // namespace emml
