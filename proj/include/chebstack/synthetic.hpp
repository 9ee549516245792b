#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "chebstack/activation.hpp"
#include "chebstack/dataset.hpp"
#include "chebstack/errors.hpp"

namespace chebstack {

enum class SyntheticKind { Tent, Planted, Random };

inline SyntheticKind parse_synthetic_kind(std::string_view name) {
    if (name == "tent") return SyntheticKind::Tent;
    if (name == "planted") return SyntheticKind::Planted;
    if (name == "random") return SyntheticKind::Random;
    throw ConfigError("unknown synthetic kind \"" + std::string(name) +
                      "\"; expected tent, planted, or random");
}

/// The three-point hat sample whose best single-unit uniform error is 0.5
/// for the identity activation.
inline Dataset tent_dataset() {
    return Dataset({{{0.0}, 0.0}, {{1.0}, 1.0}, {{2.0}, 0.0}});
}

/// Targets produced exactly by one hidden unit with weights drawn from
/// [-1, 1], so a single fitted unit can interpolate.
inline Dataset planted_dataset(const Activation& act, std::size_t n, std::size_t d,
                               std::uint64_t seed) {
    if (n == 0 || d == 0) throw ConfigError("planted data needs n >= 1 and d >= 1");
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::uniform_real_distribution<double> feat(-2.0, 2.0);
    std::uniform_real_distribution<double> wdist(-1.0, 1.0);
    WeightVector truth;
    truth.bias = wdist(rng);
    truth.weights.resize(d);
    for (double& w : truth.weights) w = wdist(rng);
    std::vector<DataPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        DataPoint p;
        p.features.resize(d);
        for (double& f : p.features) f = feat(rng);
        p.target = act.evaluate(truth.preactivation(p.features));
        pts.push_back(std::move(p));
    }
    return Dataset(std::move(pts));
}

/// Features in [-1.5, 1.5], targets drawn inside the activation's range
/// (away from the sigmoid's asymptotes).
inline Dataset random_dataset(const Activation& act, std::size_t n, std::size_t d,
                              std::uint64_t seed) {
    if (n == 0 || d == 0) throw ConfigError("random data needs n >= 1 and d >= 1");
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::uniform_real_distribution<double> feat(-1.5, 1.5);
    const bool bounded = act.kind() == ActivationKind::Sigmoid;
    std::uniform_real_distribution<double> targ(bounded ? 0.05 : -1.0,
                                                bounded ? 0.95 : 1.0);
    std::vector<DataPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        DataPoint p;
        p.features.resize(d);
        for (double& f : p.features) f = feat(rng);
        p.target = targ(rng);
        pts.push_back(std::move(p));
    }
    return Dataset(std::move(pts));
}

inline Dataset generate_dataset(SyntheticKind kind, const Activation& act, std::size_t n,
                                std::size_t d, std::uint64_t seed) {
    switch (kind) {
    case SyntheticKind::Tent: return tent_dataset();
    case SyntheticKind::Planted: return planted_dataset(act, n, d, seed);
    default: return random_dataset(act, n, d, seed);
    }
}

}  // namespace chebstack
