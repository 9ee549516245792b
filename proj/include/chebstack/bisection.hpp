#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chebstack/activation.hpp"
#include "chebstack/dataset.hpp"
#include "chebstack/errors.hpp"
#include "chebstack/linear_program.hpp"

namespace chebstack {

/// Largest absolute deviation of the unit's prediction from the targets.
inline double objective(const Dataset& data, const Activation& act,
                        const WeightVector& weights) {
    if (weights.dimension() != data.dimension())
        throw DimensionError("weight dimension " + std::to_string(weights.dimension()) +
                             " does not match data dimension " +
                             std::to_string(data.dimension()));
    double worst = 0.0;
    for (const DataPoint& p : data) {
        const double dev = std::abs(act.evaluate(weights.preactivation(p.features)) -
                                    p.target);
        if (dev > worst) worst = dev;
    }
    return worst;
}

/// (0, deviation of the zero-weight unit): a bracket that always contains the
/// optimum, since the objective is nonnegative and W = 0 is one candidate.
inline std::pair<double, double> initial_bounds(const Dataset& data,
                                                const Activation& act) {
    return {0.0, objective(data, act, WeightVector::zeros(data.dimension()))};
}

/// Whether some unit stays within L of every target, answered by slack
/// maximization over the rows
///   inverse(y_i - L) <= w0 + w . T_i <= inverse(y_i + L).
/// Returns the slack-maximal weights when feasible.
inline std::optional<WeightVector> feasibility(const Dataset& data, const Activation& act,
                                               double L) {
    if (!(L >= 0.0)) throw ConfigError("feasibility level must be nonnegative");
    const std::size_t d = data.dimension();
    const double inf = std::numeric_limits<double>::infinity();

    TwoSidedSystem sys(d + 1);
    bool below_range = false;
    for (const DataPoint& p : data) {
        const double lo = act.inverse_extended(p.target - L);
        const double hi = act.inverse_extended(p.target + L);
        if (lo == inf)
            throw RangeInfeasibleError("target " + std::to_string(p.target) +
                                       " lies above the activation range by more than " +
                                       std::to_string(L));
        if (hi == -inf) {
            // The target sits below the range by more than L. No unit reaches
            // it, so the level is infeasible rather than an input error; this
            // keeps bisection total on residual targets that dip under the
            // range floor. Keep scanning so an above-range row still throws.
            below_range = true;
            continue;
        }
        std::vector<double> coeffs;
        coeffs.reserve(d + 1);
        coeffs.push_back(1.0);
        coeffs.insert(coeffs.end(), p.features.begin(), p.features.end());
        sys.add_row(std::move(coeffs), lo, hi);
    }
    if (below_range) return std::nullopt;

    const FeasibilityResult r = max_slack(sys);
    if (!r.feasible()) return std::nullopt;
    WeightVector w;
    w.bias = r.witness[0];
    w.weights.assign(r.witness.begin() + 1, r.witness.end());
    return w;
}

struct BisectionIteration {
    double lower = 0.0;
    double upper = 0.0;
    double midpoint = 0.0;
    bool feasible = false;
};

struct BisectionTrace {
    double initial_lower = 0.0;
    double initial_upper = 0.0;
    std::vector<BisectionIteration> iterations;
    WeightVector final_weights;
    double final_objective = 0.0;
    double epsilon = 0.0;
};

namespace detail {

// Smallest k >= 0 with width * 2^-k <= eps. Halving a normal double only
// decrements its exponent, so the comparison sequence is exact.
inline int halving_count(double width, double eps) {
    int k = 0;
    while (width > eps) {
        width *= 0.5;
        if (++k > 60) break;
    }
    return k;
}

// Smallest double >= x with at most `bits` significant bits.
inline double round_up_to_bits(double x, int bits) {
    if (x == 0.0) return 0.0;
    int e = 0;
    const double m = std::frexp(x, &e);
    return std::ldexp(std::ceil(std::ldexp(m, bits)), e - bits);
}

} // namespace detail

/// Bisection on the level L: feasible midpoints pull the upper bound down,
/// infeasible ones push the lower bound up.
///
/// The bracket top is first rounded up to a short mantissa (any value above
/// the zero-weight deviation is still a valid upper bound). Each bound is
/// then index * ldexp(top, -k) with index below 2^k, so every recorded bound,
/// midpoint, and width is an exact double and u_k - l_k halves exactly.
inline BisectionTrace bisect(const Dataset& data, const Activation& act, double eps) {
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");

    BisectionTrace trace;
    trace.epsilon = eps;
    trace.final_weights = WeightVector::zeros(data.dimension());

    const double u0_raw = initial_bounds(data, act).second;
    if (u0_raw == 0.0) return trace; // every target equals the zero unit's value

    double top = u0_raw;
    int levels = detail::halving_count(top, eps);
    for (int pass = 0;; ++pass) {
        if (levels > 51)
            throw ConfigError("eps " + std::to_string(eps) +
                              " is too small relative to the initial bracket " +
                              std::to_string(u0_raw));
        top = detail::round_up_to_bits(u0_raw, std::min(26, 52 - levels));
        const int rounded_levels = detail::halving_count(top, eps);
        if (rounded_levels == levels) break;
        levels = rounded_levels;
        if (pass >= 8) throw NumericError("bracket rounding failed to stabilize");
    }

    trace.initial_lower = 0.0;
    trace.initial_upper = top;

    std::optional<WeightVector> witness;
    std::uint64_t index = 0; // bracket is [index, index+1] * width at each level
    for (int k = 1; k <= levels; ++k) {
        const double width = std::ldexp(top, -k);
        const double mid = static_cast<double>(2 * index + 1) * width;
        auto w = feasibility(data, act, mid);
        const bool ok = w.has_value();
        if (ok) {
            witness = std::move(w);
            index = 2 * index;
        } else {
            index = 2 * index + 1;
        }
        trace.iterations.push_back({static_cast<double>(index) * width,
                                    static_cast<double>(index + 1) * width, mid, ok});
    }

    if (!witness) {
        // Only midpoints were tested, so certify the standing upper bound;
        // it always admits a unit (the zero unit at worst).
        const double u_last =
            trace.iterations.empty() ? top : trace.iterations.back().upper;
        witness = feasibility(data, act, u_last);
    }
    if (witness) trace.final_weights = std::move(*witness);
    trace.final_objective = objective(data, act, trace.final_weights);
    return trace;
}

} // namespace chebstack
