#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "emml/forest.hpp"
#include "emml/gbt.hpp"
#include "emml/matrix.hpp"
#include "emml/nn.hpp"

namespace emml {

// Shared learner contract: fit on a matrix plus targets, predict a vector.
// Fitted regressors are immutable and safe for concurrent predict calls.
class Regressor {
public:
    virtual ~Regressor() = default;
    virtual void fit(const Matrix& x, std::span<const double> y) = 0;
    virtual std::vector<double> predict(const Matrix& x) const = 0;
    virtual std::string model_type() const = 0; // random_forest | gbt | mlp | voting
    virtual bool is_fitted() const = 0;
    virtual nlohmann::json to_json() const = 0; // model bundle entry
};

// Network learner spec: hidden widths plus training schedule. The input width
// comes from the data at fit time.
struct MlpSpec {
    std::vector<std::size_t> hidden_widths = {128, 512, 512, 512, 256, 256};
    TrainConfig train;
};

using ModelSpec = std::variant<ForestConfig, GbtConfig, MlpSpec>;

std::string model_type_of(const ModelSpec& spec);

std::unique_ptr<Regressor> make_regressor(const ModelSpec& spec);
std::shared_ptr<Regressor> fit_regressor(const ModelSpec& spec, const Matrix& x,
                                         std::span<const double> y);

// Bundle entry round-trip.
std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j);

nlohmann::json forest_config_to_json(const ForestConfig& config);
ForestConfig forest_config_from_json(const nlohmann::json& j);
nlohmann::json gbt_config_to_json(const GbtConfig& config);
GbtConfig gbt_config_from_json(const nlohmann::json& j);

// Concrete wrappers, exposed so callers can reach the underlying models.
class ForestRegressor : public Regressor {
public:
    explicit ForestRegressor(ForestConfig config) : config_(std::move(config)) {}
    void fit(const Matrix& x, std::span<const double> y) override;
    std::vector<double> predict(const Matrix& x) const override;
    std::string model_type() const override { return "random_forest"; }
    bool is_fitted() const override { return fitted_; }
    nlohmann::json to_json() const override;
    static std::unique_ptr<ForestRegressor> from_json(const nlohmann::json& j);

    const ForestModel& model() const;
    const ForestConfig& config() const { return config_; }

private:
    ForestConfig config_;
    ForestModel model_;
    bool fitted_ = false;
};

class GbtRegressor : public Regressor {
public:
    explicit GbtRegressor(GbtConfig config) : config_(std::move(config)) {}
    void fit(const Matrix& x, std::span<const double> y) override;
    std::vector<double> predict(const Matrix& x) const override;
    std::string model_type() const override { return "gbt"; }
    bool is_fitted() const override { return fitted_; }
    nlohmann::json to_json() const override;
    static std::unique_ptr<GbtRegressor> from_json(const nlohmann::json& j);

    const GbtModel& model() const;
    const GbtConfig& config() const { return config_; }

private:
    GbtConfig config_;
    GbtModel model_;
    bool fitted_ = false;
};

class MlpRegressor : public Regressor {
public:
    explicit MlpRegressor(MlpSpec spec) : spec_(std::move(spec)) {}
    void fit(const Matrix& x, std::span<const double> y) override;
    std::vector<double> predict(const Matrix& x) const override;
    std::string model_type() const override { return "mlp"; }
    bool is_fitted() const override { return fitted_; }
    nlohmann::json to_json() const override;
    static std::unique_ptr<MlpRegressor> from_json(const nlohmann::json& j);

    const MlpModel& model() const;
    const MlpSpec& spec() const { return spec_; }
    const TrainResult& history() const;

private:
    MlpSpec spec_;
    MlpModel model_;
    TrainResult history_;
    bool fitted_ = false;
};

} // namespace emml
