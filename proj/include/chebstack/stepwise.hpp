#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "chebstack/activation.hpp"
#include "chebstack/bisection.hpp"
#include "chebstack/dataset.hpp"
#include "chebstack/errors.hpp"

namespace chebstack {

/// One fitted neuron. The stacking procedure never refits coefficients, so
/// every unit enters the sum with weight 1.
struct Unit {
    Activation activation;
    WeightVector weights;
    double coefficient = 1.0;

    double evaluate(const std::vector<double>& features) const {
        return coefficient * activation.evaluate(weights.preactivation(features));
    }
};

/// Diagnostics for one step of the stacking loop: the bisection trace, the
/// residual targets the step was fit against, and whether the step stalled.
struct StepRecord {
    BisectionTrace trace;
    std::vector<double> residual_targets;
    double objective = 0.0;  // uniform error of the partial model on the original targets
    double improvement = 0.0;
    bool stalled = false;
};

struct StackedModel {
    std::vector<Unit> units;
    std::vector<double> step_objectives;  // one per step record, stalled steps included
    std::vector<StepRecord> steps;
    std::size_t max_units = 0;

    double predict(const std::vector<double>& features) const {
        double sum = 0.0;
        for (const Unit& unit : units) {
            if (features.size() != unit.weights.dimension())
                throw DimensionError("predict expected " +
                                     std::to_string(unit.weights.dimension()) +
                                     " features, got " +
                                     std::to_string(features.size()));
            sum += unit.evaluate(features);
        }
        return sum;
    }
};

/// Greedy stacking: fit one unit to the current residual by bisection,
/// subtract its prediction, repeat. Stops after max_units, or as soon as a
/// step improves the uniform error by less than stall_tol; the stalled step
/// stays in the trace but its unit is left out of the model.
///
/// Once the error is already within eps, continue_past_tolerance decides
/// whether further steps keep refining (the stall check is waived) or the
/// usual stall exit applies.
inline StackedModel fit_stepwise(const Dataset& data, const Activation& act,
                                 std::size_t max_units, double eps, double stall_tol,
                                 bool continue_past_tolerance = false) {
    if (max_units < 1) throw ConfigError("fit_stepwise needs at least one unit");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (!(stall_tol >= 0.0))
        throw ConfigError("stall tolerance must be nonnegative, got " +
                          std::to_string(stall_tol));

    std::vector<double> residual = data.targets();
    double prev_error = 0.0;  // uniform error of the empty model
    for (double r : residual) prev_error = std::max(prev_error, std::abs(r));

    StackedModel model;
    model.max_units = max_units;
    for (std::size_t step = 0; step < max_units; ++step) {
        StepRecord record;
        record.residual_targets = residual;
        record.trace = bisect(data.with_targets(residual), act, eps);

        std::vector<double> next = residual;
        double objective = 0.0;
        for (std::size_t j = 0; j < data.size(); ++j) {
            next[j] -= act.evaluate(record.trace.final_weights.preactivation(data[j].features));
            objective = std::max(objective, std::abs(next[j]));
        }
        record.objective = objective;
        record.improvement = prev_error - objective;
        const bool refining = continue_past_tolerance && prev_error <= eps;
        record.stalled = record.improvement < stall_tol && !refining;

        model.step_objectives.push_back(objective);
        if (!record.stalled) model.units.push_back(Unit{act, record.trace.final_weights});
        const bool stop = record.stalled;
        model.steps.push_back(std::move(record));
        if (stop) break;
        residual = std::move(next);
        prev_error = objective;
    }
    return model;
}

inline StackedModel fit_stepwise(const Dataset& data, const Activation& act,
                                 std::size_t max_units, double eps) {
    return fit_stepwise(data, act, max_units, eps, eps);
}

}  // namespace chebstack
