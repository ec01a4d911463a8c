#pragma once

#include <memory>
#include <span>
#include <vector>

#include "emml/regressor.hpp"

namespace emml {

// Voting regressor: fits every member on the identical full training set and
// predicts the weighted arithmetic mean of the member predictions, in member
// order. Weights default to 1.
class VotingRegressor : public Regressor {
public:
    VotingRegressor() = default;

    // Builds an ensemble over already-fitted members (shared, not copied).
    VotingRegressor(std::vector<std::shared_ptr<Regressor>> members,
                    std::vector<double> weights = {});

    // Fits one member per spec, all on the same (x, y).
    static VotingRegressor fit_members(const std::vector<ModelSpec>& specs, const Matrix& x,
                                       std::span<const double> y,
                                       std::vector<double> weights = {});

    void fit(const Matrix& x, std::span<const double> y) override; // refits every member
    std::vector<double> predict(const Matrix& x) const override;   // alias of predict_vote
    std::vector<double> predict_vote(const Matrix& x) const;

    std::string model_type() const override { return "voting"; }
    bool is_fitted() const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<VotingRegressor> from_json(const nlohmann::json& j);

    std::size_t member_count() const { return members_.size(); }
    const Regressor& member(std::size_t i) const { return *members_[i]; }
    const std::vector<double>& weights() const { return weights_; }

private:
    void check_invariants() const;

    std::vector<std::shared_ptr<Regressor>> members_;
    std::vector<double> weights_;
};

} // namespace emml
