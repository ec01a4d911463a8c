#include <doctest.h>

#include <cmath>

#include "emml/ensemble.hpp"
#include "emml/errors.hpp"
#include "emml/metrics.hpp"
#include "emml/rng.hpp"

using emml::Matrix;
using emml::Regressor;
using emml::VotingRegressor;

namespace {

// Fixed-output stand-in member, for arithmetic checks.
class ConstantModel : public Regressor {
public:
    explicit ConstantModel(double value) : value_(value) {}
    void fit(const Matrix&, std::span<const double>) override {}
    std::vector<double> predict(const Matrix& x) const override {
        return std::vector<double>(x.rows(), value_);
    }
    std::string model_type() const override { return "mlp"; }
    bool is_fitted() const override { return true; }
    nlohmann::json to_json() const override { return {}; }

private:
    double value_;
};

std::shared_ptr<Regressor> constant(double v) { return std::make_shared<ConstantModel>(v); }

struct Toy {
    Matrix x;
    std::vector<double> y;
};

Toy toy_data(std::size_t n, std::uint64_t seed) {
    emml::Pcg32 rng(seed);
    Toy toy;
    toy.x = Matrix(n, 2);
    toy.y.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        toy.x.at(r, 0) = rng.uniform(0, 1);
        toy.x.at(r, 1) = rng.uniform(0, 1);
        toy.y[r] = 10.0 * toy.x.at(r, 0) + 5.0 * toy.x.at(r, 1) + rng.next_normal(0.0, 0.5) +
                   20.0;
    }
    return toy;
}

} // namespace

TEST_SUITE("ensemble") {

    TEST_CASE("equal weights average: 0.0 and 1.0 vote to 0.5") {
        VotingRegressor ens({constant(0.0), constant(1.0)});
        Matrix x(3, 1);
        for (double v : ens.predict_vote(x)) CHECK(v == doctest::Approx(0.5));
    }

    TEST_CASE("degenerate weights (1,0) reproduce the first member") {
        VotingRegressor ens({constant(4.0), constant(9.0)}, {1.0, 0.0});
        Matrix x(2, 1);
        for (double v : ens.predict_vote(x)) CHECK(v == 4.0);
    }

    TEST_CASE("three members 1,2,6 vote to 3") {
        VotingRegressor ens({constant(1.0), constant(2.0), constant(6.0)});
        Matrix x(1, 1);
        CHECK(ens.predict_vote(x)[0] == doctest::Approx(3.0));
    }

    TEST_CASE("invariants: members required, weights match, not all zero") {
        CHECK_THROWS_AS(VotingRegressor(std::vector<std::shared_ptr<Regressor>>{}), emml::Error);
        CHECK_THROWS_AS(VotingRegressor({constant(1.0)}, {1.0, 2.0}), emml::DimensionMismatch);
        CHECK_THROWS_AS(VotingRegressor({constant(1.0)}, {0.0}), emml::Error);
        CHECK_THROWS_AS(VotingRegressor({constant(1.0)}, {-1.0}), emml::Error);
    }

    TEST_CASE("permuting members with their weights leaves predictions unchanged") {
        Matrix x(4, 1);
        VotingRegressor a({constant(1.0), constant(5.0), constant(11.0)}, {3.0, 1.0, 2.0});
        VotingRegressor b({constant(11.0), constant(1.0), constant(5.0)}, {2.0, 3.0, 1.0});
        std::vector<double> pa = a.predict_vote(x);
        std::vector<double> pb = b.predict_vote(x);
        for (std::size_t r = 0; r < 4; ++r) CHECK(std::abs(pa[r] - pb[r]) <= 1e-12);
    }

    TEST_CASE("an ensemble of one model equals that model") {
        Toy toy = toy_data(80, 5);
        emml::ForestConfig config;
        config.n_estimators = 5;
        config.tree.max_depth = 4;
        auto member = emml::fit_regressor(emml::ModelSpec(config), toy.x, toy.y);
        VotingRegressor ens({member});
        CHECK(ens.predict_vote(toy.x) == member->predict(toy.x));
    }

    TEST_CASE("the same model k times equals the single model") {
        Toy toy = toy_data(60, 6);
        emml::GbtConfig config;
        config.n_estimators = 10;
        config.max_depth = 3;
        auto member = emml::fit_regressor(emml::ModelSpec(config), toy.x, toy.y);
        VotingRegressor ens({member, member, member});
        std::vector<double> single = member->predict(toy.x);
        std::vector<double> voted = ens.predict_vote(toy.x);
        for (std::size_t r = 0; r < single.size(); ++r)
            CHECK(voted[r] == doctest::Approx(single[r]).epsilon(1e-15));
    }

    TEST_CASE("fit_members trains every member on the identical full data") {
        Toy toy = toy_data(120, 7);
        emml::ForestConfig rf;
        rf.n_estimators = 5;
        rf.tree.max_depth = 4;
        rf.tree.criterion = emml::SplitCriterion::squared;
        emml::GbtConfig gbt;
        gbt.n_estimators = 20;
        gbt.max_depth = 3;

        VotingRegressor ens = VotingRegressor::fit_members(
            {emml::ModelSpec(rf), emml::ModelSpec(gbt)}, toy.x, toy.y);
        REQUIRE(ens.member_count() == 2);
        CHECK(ens.is_fitted());

        // members equal independently fitted models (identical data and seeds)
        auto solo_rf = emml::fit_regressor(emml::ModelSpec(rf), toy.x, toy.y);
        auto solo_gbt = emml::fit_regressor(emml::ModelSpec(gbt), toy.x, toy.y);
        CHECK(ens.member(0).predict(toy.x) == solo_rf->predict(toy.x));
        CHECK(ens.member(1).predict(toy.x) == solo_gbt->predict(toy.x));

        // prediction equals the running weighted mean in member order
        std::vector<double> p0 = ens.member(0).predict(toy.x);
        std::vector<double> p1 = ens.member(1).predict(toy.x);
        std::vector<double> voted = ens.predict_vote(toy.x);
        for (std::size_t r = 0; r < voted.size(); ++r)
            CHECK(std::abs(voted[r] - (p0[r] + p1[r]) / 2.0) <= 1e-12);
    }

    TEST_CASE("Jensen bound holds for fitted ensembles on held-out data") {
        Toy train = toy_data(200, 8);
        Toy test = toy_data(100, 9);

        emml::ForestConfig rf;
        rf.n_estimators = 10;
        rf.tree.max_depth = 5;
        emml::GbtConfig gbt;
        gbt.n_estimators = 40;
        gbt.max_depth = 3;
        emml::MlpSpec mlp;
        mlp.hidden_widths = {16, 8};
        mlp.train.epochs = 30;
        mlp.train.batch_size = 32;
        mlp.train.validation_split = 0.0;

        VotingRegressor ens = VotingRegressor::fit_members(
            {emml::ModelSpec(rf), emml::ModelSpec(gbt), emml::ModelSpec(mlp)}, train.x, train.y);

        double ens_mae = emml::mae(ens.predict_vote(test.x), test.y);
        double member_mean = 0.0;
        for (std::size_t m = 0; m < ens.member_count(); ++m)
            member_mean += emml::mae(ens.member(m).predict(test.x), test.y);
        member_mean /= static_cast<double>(ens.member_count());
        CHECK(ens_mae <= member_mean + 1e-12);
    }

    TEST_CASE("unfitted members are rejected at predict time") {
        auto unfitted = std::make_shared<emml::ForestRegressor>(emml::ForestConfig{});
        VotingRegressor ens({unfitted});
        Matrix x(1, 1);
        CHECK_THROWS_AS(ens.predict_vote(x), emml::NotFitted);
    }
}
