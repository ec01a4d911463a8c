#include "emml/ensemble.hpp"

#include "emml/errors.hpp"

namespace emml {

VotingRegressor::VotingRegressor(std::vector<std::shared_ptr<Regressor>> members,
                                 std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
    if (weights_.empty()) weights_.assign(members_.size(), 1.0);
    check_invariants();
}

void VotingRegressor::check_invariants() const {
    if (members_.empty()) throw Error("voting regressor needs at least one member");
    if (weights_.size() != members_.size())
        throw DimensionMismatch("voting regressor: one weight per member required");
    double total = 0.0;
    for (double w : weights_) {
        if (w < 0.0) throw Error("voting regressor: weights must be >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw Error("voting regressor: weights must not all be zero");
}

VotingRegressor VotingRegressor::fit_members(const std::vector<ModelSpec>& specs, const Matrix& x,
                                             std::span<const double> y,
                                             std::vector<double> weights) {
    if (specs.empty()) throw Error("voting regressor needs at least one member spec");
    std::vector<std::shared_ptr<Regressor>> members;
    members.reserve(specs.size());
    for (const ModelSpec& spec : specs) members.push_back(fit_regressor(spec, x, y));
    return VotingRegressor(std::move(members), std::move(weights));
}

void VotingRegressor::fit(const Matrix& x, std::span<const double> y) {
    check_invariants();
    for (auto& member : members_) member->fit(x, y);
}

bool VotingRegressor::is_fitted() const {
    if (members_.empty()) return false;
    for (const auto& member : members_)
        if (!member->is_fitted()) return false;
    return true;
}

std::vector<double> VotingRegressor::predict_vote(const Matrix& x) const {
    check_invariants();
    if (!is_fitted()) throw NotFitted("voting regressor has unfitted members");
    double weight_sum = 0.0;
    for (double w : weights_) weight_sum += w;

    std::vector<double> out(x.rows(), 0.0);
    for (std::size_t m = 0; m < members_.size(); ++m) {
        std::vector<double> pred = members_[m]->predict(x);
        if (pred.size() != out.size())
            throw DimensionMismatch("voting regressor: member prediction size mismatch");
        for (std::size_t r = 0; r < out.size(); ++r) out[r] += weights_[m] * pred[r];
    }
    for (double& v : out) v /= weight_sum;
    return out;
}

std::vector<double> VotingRegressor::predict(const Matrix& x) const { return predict_vote(x); }

nlohmann::json VotingRegressor::to_json() const {
    if (!is_fitted()) throw NotFitted("voting regressor has unfitted members");
    nlohmann::json members = nlohmann::json::array();
    for (const auto& member : members_) members.push_back(member->to_json());
    return {{"model_type", "voting"}, {"members", members}, {"weights", weights_}};
}

std::unique_ptr<VotingRegressor> VotingRegressor::from_json(const nlohmann::json& j) {
    std::vector<std::shared_ptr<Regressor>> members;
    for (const auto& mj : j.at("members")) members.push_back(regressor_from_json(mj));
    auto weights = j.at("weights").get<std::vector<double>>();
    return std::make_unique<VotingRegressor>(std::move(members), std::move(weights));
}

} // namespace emml
