#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "chebstack/activation.hpp"
#include "chebstack/bisection.hpp"
#include "chebstack/dataset.hpp"
#include "chebstack/errors.hpp"
#include "chebstack/linear_program.hpp"

namespace chebstack {

/// Tolerance for near-maximal deviations, scaled to the deviation itself.
inline double default_tau(double max_deviation) {
    return 1e-6 * std::max(1.0, max_deviation);
}

/// Signed deviations of a unit on a dataset, with the indices whose absolute
/// deviation comes within tau of the maximum, split by sign.
struct DeviationProfile {
    std::vector<double> deltas;       // prediction minus target, per point
    double max_deviation = 0.0;
    double tau = 0.0;
    std::vector<std::size_t> pos_idx; // near-maximal with delta >= 0
    std::vector<std::size_t> neg_idx; // near-maximal with delta < 0
};

inline DeviationProfile deviation_profile(const Dataset& data, const Activation& act,
                                          const WeightVector& weights, double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw ConfigError("tau must be nonnegative and finite, got " + std::to_string(tau));
    if (weights.dimension() != data.dimension())
        throw DimensionError("weight dimension " + std::to_string(weights.dimension()) +
                             " does not match data dimension " +
                             std::to_string(data.dimension()));
    DeviationProfile prof;
    prof.tau = tau;
    prof.deltas.reserve(data.size());
    for (const DataPoint& p : data) {
        const double delta = act.evaluate(weights.preactivation(p.features)) - p.target;
        prof.deltas.push_back(delta);
        prof.max_deviation = std::max(prof.max_deviation, std::abs(delta));
    }
    const double cut = prof.max_deviation - tau;
    for (std::size_t i = 0; i < prof.deltas.size(); ++i) {
        if (std::abs(prof.deltas[i]) < cut) continue;
        (prof.deltas[i] >= 0.0 ? prof.pos_idx : prof.neg_idx).push_back(i);
    }
    return prof;
}

enum class StationarityVerdict { Stationary, NotStationary };
enum class CertificateMethod { SmoothHull, LeakyInclusion };

/// Candidate enumeration variants for the leaky test. FullSum rebuilds the
/// segment sum per positive-side index, skipping that index if it also
/// appeared on the negative side; Simplified reuses one shared sum. The two
/// agree whenever the sign classes are disjoint, which the deviation profile
/// guarantees.
enum class SubdifferentialForm { FullSum, Simplified };

struct StationarityCertificate {
    StationarityVerdict verdict = StationarityVerdict::NotStationary;
    CertificateMethod method = CertificateMethod::SmoothHull;
    double tau = 0.0;
    DeviationProfile profile;

    // SmoothHull, stationary: convex weights over the two gradient hulls and
    // the shared point they certify.
    std::vector<double> pos_coefficients;
    std::vector<double> neg_coefficients;
    std::vector<double> common_point;

    // SmoothHull, not stationary: direction strictly shrinking every
    // near-maximal deviation, and the separator margin behind it.
    std::vector<double> descent;
    double descent_margin = 0.0;

    // LeakyInclusion, not stationary: first upper-set vertex that escapes the
    // lower hull, with the endpoint mask that produced it.
    std::vector<double> failing_vertex;
    std::uint64_t failing_mask = 0;

    bool stationary() const { return verdict == StationarityVerdict::Stationary; }
};

namespace detail {

// (1, T_j): gradient of the preactivation in (bias, weights) coordinates.
inline std::vector<double> lifted_features(const std::vector<double>& features) {
    std::vector<double> e;
    e.reserve(features.size() + 1);
    e.push_back(1.0);
    e.insert(e.end(), features.begin(), features.end());
    return e;
}

// Endpoints of the subgradient segment of the hinge max(alpha z, z) at one
// point, ordered by the active branch: the shallow slope comes first when the
// preactivation is positive, second otherwise. The unordered pair is the same
// either way; the order only fixes what an endpoint mask bit refers to.
inline std::pair<std::vector<double>, std::vector<double>> hinge_segment(
    const DataPoint& p, double alpha, const WeightVector& weights) {
    std::vector<double> full = lifted_features(p.features);
    std::vector<double> shallow = full;
    for (double& v : shallow) v *= alpha;
    if (weights.preactivation(p.features) > 0.0)
        return {std::move(shallow), std::move(full)};
    return {std::move(full), std::move(shallow)};
}

// All 2^k endpoint choices of a sum of k segments. Bit b of the mask picks
// the second endpoint of the b-th segment. An empty index list yields the
// single zero vector.
inline std::vector<std::vector<double>> endpoint_sums(const Dataset& data, double alpha,
                                                      const WeightVector& weights,
                                                      const std::vector<std::size_t>& idx) {
    const std::size_t lifted_dim = data.dimension() + 1;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> segments;
    segments.reserve(idx.size());
    for (std::size_t i : idx) {
        if (i >= data.size())
            throw DimensionError("segment index " + std::to_string(i) +
                                 " is out of range for " + std::to_string(data.size()) +
                                 " points");
        segments.push_back(hinge_segment(data.points()[i], alpha, weights));
    }
    std::vector<std::vector<double>> sums;
    sums.reserve(std::size_t{1} << idx.size());
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << idx.size()); ++mask) {
        std::vector<double> v(lifted_dim, 0.0);
        for (std::size_t b = 0; b < segments.size(); ++b) {
            const auto& endpoint = ((mask >> b) & 1u) ? segments[b].second
                                                      : segments[b].first;
            for (std::size_t k = 0; k < lifted_dim; ++k) v[k] += endpoint[k];
        }
        sums.push_back(std::move(v));
    }
    return sums;
}

}  // namespace detail

inline constexpr std::size_t kSegmentCap = 20;
inline constexpr std::size_t kEnumerationBudget = std::size_t{1} << 22;

/// Vertices of the negated superdifferential: every endpoint choice of the
/// summed hinge segments over the given indices. Bit b of a vertex's position
/// selects the second endpoint of segment b.
inline std::vector<std::vector<double>> leaky_superdiff_vertices(
    const Dataset& data, double alpha, const WeightVector& weights,
    const std::vector<std::size_t>& neg_idx) {
    Activation::leaky_relu(alpha);  // validates alpha
    if (weights.dimension() != data.dimension())
        throw DimensionError("weight dimension " + std::to_string(weights.dimension()) +
                             " does not match data dimension " +
                             std::to_string(data.dimension()));
    if (neg_idx.size() > kSegmentCap)
        throw CapExceededError("negative near-maximal set has " +
                               std::to_string(neg_idx.size()) +
                               " points, above the enumeration cap of " +
                               std::to_string(kSegmentCap));
    return detail::endpoint_sums(data, alpha, weights, neg_idx);
}

/// Stationarity test for a smooth unit: the positive and negative scaled
/// gradient hulls intersect exactly when no direction shrinks every
/// near-maximal deviation at once. Not-stationary verdicts carry such a
/// direction; stationary ones carry the convex witness.
inline StationarityCertificate smooth_certificate(const Dataset& data, const Activation& act,
                                                  const WeightVector& weights, double tau) {
    if (!act.smooth())
        throw NotSmoothError("hull-intersection certification needs a smooth activation; " +
                             act.name() + " is piecewise linear");
    StationarityCertificate cert;
    cert.method = CertificateMethod::SmoothHull;
    cert.tau = tau;
    cert.profile = deviation_profile(data, act, weights, tau);
    if (cert.profile.max_deviation <= tau)
        throw ZeroDeviationError("max deviation " + std::to_string(cert.profile.max_deviation) +
                                 " is within tau = " + std::to_string(tau) +
                                 "; the unit interpolates the targets");

    const auto scaled_gradient = [&](std::size_t i) {
        const DataPoint& p = data.points()[i];
        std::vector<double> g = detail::lifted_features(p.features);
        const double slope = act.derivative(weights.preactivation(p.features));
        for (double& v : g) v *= slope;
        return g;
    };
    std::vector<std::vector<double>> pos, neg;
    for (std::size_t i : cert.profile.pos_idx) pos.push_back(scaled_gradient(i));
    for (std::size_t i : cert.profile.neg_idx) neg.push_back(scaled_gradient(i));

    if (!pos.empty() && !neg.empty()) {
        const HullIntersection meet = hulls_intersect(pos, neg);
        if (meet.intersects) {
            cert.verdict = StationarityVerdict::Stationary;
            cert.pos_coefficients = meet.p_coefficients;
            cert.neg_coefficients = meet.q_coefficients;
            cert.common_point = meet.common_point;
            return cert;
        }
    }

    // One-sided or separated: a hyperplane through the origin splits the
    // positive gradients from the negated negative ones, and its inward
    // normal shrinks every near-maximal deviation.
    cert.verdict = StationarityVerdict::NotStationary;
    std::vector<std::vector<double>> combined = pos;
    for (const auto& g : neg) {
        std::vector<double> flipped(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) flipped[k] = -g[k];
        combined.push_back(std::move(flipped));
    }
    const std::vector<std::vector<double>> origin{
        std::vector<double>(data.dimension() + 1, 0.0)};
    const HullSeparator sep =
        detail::separating_hyperplane(origin, combined, data.dimension() + 1);
    cert.descent.assign(sep.normal.size(), 0.0);
    for (std::size_t k = 0; k < sep.normal.size(); ++k) cert.descent[k] = -sep.normal[k];
    cert.descent_margin = sep.margin;
    return cert;
}

inline StationarityCertificate smooth_certificate(const Dataset& data, const Activation& act,
                                                  const WeightVector& weights) {
    return smooth_certificate(data, act, weights,
                              default_tau(objective(data, act, weights)));
}

/// Stationarity test for a leaky-relu unit via quasidifferential inclusion:
/// every vertex of the negated superdifferential must lie in the hull of the
/// subdifferential candidates. Candidates combine each positive-side segment
/// endpoint with a full negative-side segment sum, plus, for each
/// negative-side index, the sum over the remaining negative segments.
inline StationarityCertificate leaky_certificate(const Dataset& data, double alpha,
                                                 const WeightVector& weights, double tau,
                                                 SubdifferentialForm form =
                                                     SubdifferentialForm::Simplified) {
    const Activation act = Activation::leaky_relu(alpha);
    StationarityCertificate cert;
    cert.method = CertificateMethod::LeakyInclusion;
    cert.tau = tau;
    cert.profile = deviation_profile(data, act, weights, tau);
    if (cert.profile.max_deviation <= tau)
        throw ZeroDeviationError("max deviation " + std::to_string(cert.profile.max_deviation) +
                                 " is within tau = " + std::to_string(tau) +
                                 "; the unit interpolates the targets");

    const std::vector<std::size_t>& pos = cert.profile.pos_idx;
    const std::vector<std::size_t>& neg = cert.profile.neg_idx;
    if (neg.size() > kSegmentCap)
        throw CapExceededError("negative near-maximal set has " + std::to_string(neg.size()) +
                               " points, above the enumeration cap of " +
                               std::to_string(kSegmentCap));
    std::size_t budget = pos.size() * (std::size_t{2} << neg.size());
    if (!neg.empty())
        budget += neg.size() * (std::size_t{1} << (neg.size() - 1));
    if (budget > kEnumerationBudget)
        throw CapExceededError("subdifferential enumeration needs " + std::to_string(budget) +
                               " candidates, above the budget of " +
                               std::to_string(kEnumerationBudget));

    const std::vector<std::vector<double>> upper =
        leaky_superdiff_vertices(data, alpha, weights, neg);

    std::vector<std::vector<double>> candidates;
    candidates.reserve(budget);
    for (std::size_t i : pos) {
        std::vector<std::vector<double>> shifted;
        if (form == SubdifferentialForm::FullSum) {
            std::vector<std::size_t> others;
            for (std::size_t j : neg)
                if (j != i) others.push_back(j);
            shifted = detail::endpoint_sums(data, alpha, weights, others);
        } else {
            shifted = upper;
        }
        const auto seg = detail::hinge_segment(data.points()[i], alpha, weights);
        for (const auto* endpoint : {&seg.first, &seg.second}) {
            for (const auto& base : shifted) {
                std::vector<double> v = base;
                for (std::size_t k = 0; k < v.size(); ++k) v[k] += (*endpoint)[k];
                candidates.push_back(std::move(v));
            }
        }
    }
    for (std::size_t dropped : neg) {
        std::vector<std::size_t> others;
        for (std::size_t j : neg)
            if (j != dropped) others.push_back(j);
        for (auto& v : detail::endpoint_sums(data, alpha, weights, others))
            candidates.push_back(std::move(v));
    }

    for (std::uint64_t mask = 0; mask < upper.size(); ++mask) {
        const HullMembership member = point_in_hull(upper[mask], candidates);
        if (!member.inside) {
            cert.verdict = StationarityVerdict::NotStationary;
            cert.failing_vertex = upper[mask];
            cert.failing_mask = mask;
            return cert;
        }
    }
    cert.verdict = StationarityVerdict::Stationary;
    return cert;
}

inline StationarityCertificate leaky_certificate(const Dataset& data, double alpha,
                                                 const WeightVector& weights) {
    const Activation act = Activation::leaky_relu(alpha);
    return leaky_certificate(data, alpha, weights,
                             default_tau(objective(data, act, weights)));
}

}  // namespace chebstack
