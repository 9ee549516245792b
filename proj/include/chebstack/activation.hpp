#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "chebstack/errors.hpp"

namespace chebstack {

enum class ActivationKind { Sigmoid, Identity, LeakyRelu };

/// A strictly increasing activation function with an extended-real inverse.
///
/// Smooth kinds (sigmoid, identity) additionally expose a derivative.
/// inverse_extended() maps values at or beyond the open range to +-infinity,
/// which downstream code uses to drop one side of a two-sided constraint.
class Activation {
public:
    static Activation sigmoid() { return Activation(ActivationKind::Sigmoid, 0.0); }
    static Activation identity() { return Activation(ActivationKind::Identity, 0.0); }

    static Activation leaky_relu(double alpha) {
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw ConfigError("leaky_relu slope must satisfy 0 < alpha < 1, got " +
                              std::to_string(alpha));
        return Activation(ActivationKind::LeakyRelu, alpha);
    }

    // Name strings accepted by the CLI: "sigmoid" | "identity" | "leaky_relu".
    static Activation from_name(std::string_view name, std::optional<double> alpha = {}) {
        if (name == "sigmoid") return sigmoid();
        if (name == "identity") return identity();
        if (name == "leaky_relu") return leaky_relu(alpha.value_or(0.01));
        throw ConfigError("unknown activation \"" + std::string(name) + "\"");
    }

    ActivationKind kind() const { return kind_; }
    bool smooth() const { return kind_ != ActivationKind::LeakyRelu; }

    double alpha() const {
        if (kind_ != ActivationKind::LeakyRelu)
            throw ConfigError("alpha is only defined for leaky_relu");
        return alpha_;
    }

    double range_low() const {
        return kind_ == ActivationKind::Sigmoid ? 0.0
                                                : -std::numeric_limits<double>::infinity();
    }

    double range_high() const {
        return kind_ == ActivationKind::Sigmoid ? 1.0
                                                : std::numeric_limits<double>::infinity();
    }

    double evaluate(double x) const {
        switch (kind_) {
        case ActivationKind::Sigmoid:
            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
            else {
                const double e = std::exp(x);
                return e / (1.0 + e);
            }
        case ActivationKind::Identity:
            return x;
        case ActivationKind::LeakyRelu:
            return x >= 0.0 ? x : alpha_ * x;
        }
        return 0.0; // unreachable
    }

    /// Extended-real inverse: y at or beyond the open range maps to +-infinity.
    /// For sigmoid, y within 1e-15 of an endpoint counts as out of range so the
    /// logit cannot overflow.
    double inverse_extended(double y) const {
        const double inf = std::numeric_limits<double>::infinity();
        switch (kind_) {
        case ActivationKind::Sigmoid:
            if (y <= kSigmoidBand) return -inf;
            if (y >= 1.0 - kSigmoidBand) return inf;
            return std::log(y) - std::log1p(-y);
        case ActivationKind::Identity:
            return y;
        case ActivationKind::LeakyRelu:
            return y >= 0.0 ? y : y / alpha_;
        }
        return 0.0; // unreachable
    }

    double derivative(double x) const {
        switch (kind_) {
        case ActivationKind::Sigmoid: {
            const double s = evaluate(x);
            return s * (1.0 - s);
        }
        case ActivationKind::Identity:
            return 1.0;
        case ActivationKind::LeakyRelu:
            throw NotSmoothError("leaky_relu has no pointwise derivative here; "
                                 "use the segment-based inclusion certificate");
        }
        return 0.0; // unreachable
    }

    std::string name() const {
        switch (kind_) {
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Identity: return "identity";
        case ActivationKind::LeakyRelu: return "leaky_relu";
        }
        return {};
    }

private:
    static constexpr double kSigmoidBand = 1e-15;

    Activation(ActivationKind kind, double alpha) : kind_(kind), alpha_(alpha) {}

    ActivationKind kind_;
    double alpha_;
};

} // namespace chebstack
