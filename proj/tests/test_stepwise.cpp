#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "chebstack/stepwise.hpp"

using chebstack::Activation;
using chebstack::DataPoint;
using chebstack::Dataset;
using chebstack::StackedModel;
using chebstack::Unit;
using chebstack::WeightVector;

namespace {

Dataset make_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<DataPoint> pts;
    for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({{xs[i]}, ys[i]});
    return Dataset(std::move(pts));
}

Dataset tent() { return make_1d({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}); }

Unit identity_unit(double bias, std::vector<double> weights) {
    WeightVector w;
    w.bias = bias;
    w.weights = std::move(weights);
    return Unit{Activation::identity(), std::move(w)};
}

Dataset random_dataset(std::mt19937& rng, const Activation& act, std::size_t n,
                       std::size_t d) {
    std::uniform_real_distribution<double> feat(-1.5, 1.5);
    const bool bounded = act.kind() == chebstack::ActivationKind::Sigmoid;
    std::uniform_real_distribution<double> targ(bounded ? 0.05 : -1.0,
                                                bounded ? 0.95 : 1.0);
    std::vector<DataPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        DataPoint p;
        p.features.resize(d);
        for (double& f : p.features) f = feat(rng);
        p.target = targ(rng);
        pts.push_back(std::move(p));
    }
    return Dataset(std::move(pts));
}

// Targets produced exactly by one hidden unit, so a single step interpolates.
Dataset planted_dataset(std::mt19937& rng, const Activation& act, std::size_t n,
                        std::size_t d) {
    std::uniform_real_distribution<double> feat(-2.0, 2.0);
    std::uniform_real_distribution<double> wdist(-1.0, 1.0);
    WeightVector truth;
    truth.bias = wdist(rng);
    truth.weights.resize(d);
    for (double& w : truth.weights) w = wdist(rng);
    std::vector<DataPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        DataPoint p;
        p.features.resize(d);
        for (double& f : p.features) f = feat(rng);
        p.target = act.evaluate(truth.preactivation(p.features));
        pts.push_back(std::move(p));
    }
    return Dataset(std::move(pts));
}

} // namespace

TEST_CASE("predict sums the units") {
    StackedModel model;
    CHECK(model.predict({1.0}) == 0.0);
    CHECK(model.predict({}) == 0.0);

    model.units.push_back(identity_unit(0.5, {0.0}));
    CHECK(model.predict({3.7}) == 0.5);
    CHECK(model.predict({-100.0}) == 0.5);

    model.units.push_back(identity_unit(0.0, {0.0}));
    CHECK(model.predict({1.0}) == 0.5);

    CHECK_THROWS_AS(model.predict({1.0, 2.0}), chebstack::DimensionError);
    CHECK(identity_unit(0.0, {}).coefficient == 1.0);
}

TEST_CASE("fit_stepwise validates its configuration") {
    const Dataset data = tent();
    const Activation id = Activation::identity();
    CHECK_THROWS_AS(chebstack::fit_stepwise(data, id, 0, 1e-6), chebstack::ConfigError);
    CHECK_THROWS_AS(chebstack::fit_stepwise(data, id, 1, 0.0), chebstack::ConfigError);
    CHECK_THROWS_AS(chebstack::fit_stepwise(data, id, 1, 1e-6, -1.0),
                    chebstack::ConfigError);
}

TEST_CASE("one step reproduces a plain bisection fit") {
    std::mt19937 rng(4242);
    for (int run = 0; run < 6; ++run) {
        const Activation act = run % 2 == 0 ? Activation::identity()
                                            : Activation::leaky_relu(0.01);
        const Dataset data = random_dataset(rng, act, 6, 2);
        const StackedModel model = chebstack::fit_stepwise(data, act, 1, 1e-4);
        const chebstack::BisectionTrace direct = chebstack::bisect(data, act, 1e-4);

        REQUIRE(model.steps.size() == 1);
        CHECK(model.max_units == 1);
        const WeightVector& got = model.steps[0].trace.final_weights;
        CHECK(got.bias == direct.final_weights.bias);
        CHECK(got.weights == direct.final_weights.weights);
        CHECK(model.steps[0].trace.final_objective == direct.final_objective);
        if (!model.steps[0].stalled) {
            REQUIRE(model.units.size() == 1);
            CHECK(model.step_objectives[0] == direct.final_objective);
        }
    }
}

TEST_CASE("tent data stalls on the second step") {
    const StackedModel model =
        chebstack::fit_stepwise(tent(), Activation::identity(), 2, 1e-6);

    REQUIRE(model.step_objectives.size() == 2);
    CHECK(model.step_objectives[0] == Catch::Approx(0.5).margin(1e-6));
    CHECK(model.step_objectives[1] == Catch::Approx(0.5).margin(1e-6));

    REQUIRE(model.steps.size() == 2);
    CHECK_FALSE(model.steps[0].stalled);
    CHECK(model.steps[1].stalled);
    CHECK(model.steps[1].improvement < 1e-6);
    CHECK(model.units.size() == 1);

    // The step-one residual alternates at +-0.5, which no further unit improves.
    CHECK(model.steps[0].residual_targets == std::vector<double>{0.0, 1.0, 0.0});
    REQUIRE(model.steps[1].residual_targets.size() == 3);
    CHECK(model.steps[1].residual_targets[0] == Catch::Approx(-0.5).margin(1e-4));
    CHECK(model.steps[1].residual_targets[1] == Catch::Approx(0.5).margin(1e-4));
    CHECK(model.steps[1].residual_targets[2] == Catch::Approx(-0.5).margin(1e-4));
}

TEST_CASE("planted targets interpolate in one step and stall on the next") {
    std::mt19937 rng(501);
    const Activation leaky = Activation::leaky_relu(0.01);
    for (int run = 0; run < 4; ++run) {
        const Dataset data = planted_dataset(rng, leaky, 12, 2);
        const StackedModel model = chebstack::fit_stepwise(data, leaky, 2, 1e-6);

        REQUIRE_FALSE(model.step_objectives.empty());
        CHECK(model.step_objectives[0] <= 1e-6);
        REQUIRE(model.steps.size() == 2);
        CHECK(model.steps[1].stalled);
        CHECK(model.units.size() == 1);
    }
}

TEST_CASE("refinement below tolerance is opt-in") {
    std::mt19937 rng(807);
    const Activation leaky = Activation::leaky_relu(0.01);
    const Dataset data = planted_dataset(rng, leaky, 10, 2);

    const StackedModel refined = chebstack::fit_stepwise(data, leaky, 3, 1e-6, 1e-6, true);
    REQUIRE(refined.steps.size() == 3);
    CHECK(refined.units.size() == 3);
    for (const chebstack::StepRecord& s : refined.steps) CHECK_FALSE(s.stalled);
    // Later steps fit residuals already under eps; their units stay near zero
    // and the error never degrades.
    CHECK(refined.step_objectives[1] <= refined.step_objectives[0] + 1e-6);
    CHECK(refined.step_objectives[2] <= refined.step_objectives[1] + 1e-6);

    const StackedModel stopped = chebstack::fit_stepwise(data, leaky, 3, 1e-6, 1e-6, false);
    CHECK(stopped.steps.size() == 2);
    CHECK(stopped.steps.back().stalled);
    CHECK(stopped.units.size() == 1);
}

TEST_CASE("an immediately stationary dataset stalls on step one") {
    const Dataset alternating = make_1d({0.0, 1.0, 2.0}, {-0.5, 0.5, -0.5});
    const StackedModel model =
        chebstack::fit_stepwise(alternating, Activation::identity(), 3, 1e-6);

    REQUIRE(model.steps.size() == 1);
    CHECK(model.steps[0].stalled);
    CHECK(model.units.empty());
    CHECK(model.step_objectives[0] == Catch::Approx(0.5).margin(1e-6));
    CHECK(model.predict({1.0}) == 0.0);
}

TEST_CASE("errors stay near-monotone and residuals match the model") {
    std::mt19937 rng(90210);
    const double eps = 1e-4;
    const Activation acts[] = {Activation::identity(), Activation::leaky_relu(0.01),
                               Activation::sigmoid()};
    for (int run = 0; run < 12; ++run) {
        const Activation& act = acts[run % 3];
        const Dataset data = random_dataset(rng, act, 3 + run % 6, 1 + run % 3);
        const StackedModel model = chebstack::fit_stepwise(data, act, 4, eps);

        REQUIRE(model.step_objectives.size() == model.steps.size());
        CHECK(model.units.size() + (model.steps.back().stalled ? 1 : 0) ==
              model.steps.size());

        double prev = 0.0;
        for (const DataPoint& p : data) prev = std::max(prev, std::abs(p.target));
        for (std::size_t k = 0; k < model.step_objectives.size(); ++k) {
            // eps of slack for the step, a hair more for the feasibility tolerance.
            CHECK(model.step_objectives[k] <= prev + eps + 1e-8);
            CHECK(model.steps[k].improvement ==
                  Catch::Approx(prev - model.step_objectives[k]).margin(1e-12));
            prev = model.step_objectives[k];
        }

        double worst = 0.0;
        for (const DataPoint& p : data)
            worst = std::max(worst, std::abs(model.predict(p.features) - p.target));
        const std::size_t kept = model.units.size();
        double expected = 0.0;
        if (kept == 0) {
            for (const DataPoint& p : data)
                expected = std::max(expected, std::abs(p.target));
        } else {
            expected = model.step_objectives[kept - 1];
        }
        CHECK(worst == Catch::Approx(expected).margin(1e-9));
    }
}

TEST_CASE("sigmoid stacking survives residuals that leave the range") {
    // After one sigmoid unit the residuals dip below 0, so second-step levels
    // under the gap must read as infeasible for the loop to keep going.
    const Dataset data = make_1d({-2.0, -1.0, 0.0, 1.0, 2.0}, {0.1, 0.8, 0.2, 0.9, 0.3});
    const StackedModel model =
        chebstack::fit_stepwise(data, Activation::sigmoid(), 3, 1e-3);

    REQUIRE_FALSE(model.steps.empty());
    bool negative_residual = false;
    for (std::size_t k = 1; k < model.steps.size(); ++k)
        for (double r : model.steps[k].residual_targets)
            if (r < 0.0) negative_residual = true;
    if (model.steps.size() > 1) CHECK(negative_residual);

    double prev = 0.9;
    for (double obj : model.step_objectives) {
        CHECK(obj <= prev + 1e-3 + 1e-8);
        prev = obj;
    }
}
