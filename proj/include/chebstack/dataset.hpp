#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "chebstack/errors.hpp"

namespace chebstack {

struct DataPoint {
    std::vector<double> features;
    double target = 0.0;
};

/// Weights of a single unit: w0 + w . x with the bias kept separate.
struct WeightVector {
    double bias = 0.0;
    std::vector<double> weights;

    static WeightVector zeros(std::size_t dim) {
        WeightVector w;
        w.weights.assign(dim, 0.0);
        return w;
    }

    std::size_t dimension() const { return weights.size(); }

    double preactivation(const std::vector<double>& features) const {
        double acc = bias;
        for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * features[i];
        return acc;
    }
};

/// A finite sample with consistent feature dimension and finite entries.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(std::vector<DataPoint> points) : points_(std::move(points)) {
        if (points_.empty()) throw DimensionError("dataset must contain at least one point");
        dim_ = points_.front().features.size();
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const DataPoint& p = points_[i];
            if (p.features.size() != dim_)
                throw DimensionError("point " + std::to_string(i) + " has " +
                                     std::to_string(p.features.size()) +
                                     " features, expected " + std::to_string(dim_));
            if (!std::isfinite(p.target))
                throw DimensionError("point " + std::to_string(i) + " has non-finite target");
            for (double v : p.features)
                if (!std::isfinite(v))
                    throw DimensionError("point " + std::to_string(i) +
                                         " has non-finite feature");
        }
    }

    std::size_t size() const { return points_.size(); }
    std::size_t dimension() const { return dim_; }

    const DataPoint& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<DataPoint>& points() const { return points_; }

    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

    std::vector<double> targets() const {
        std::vector<double> t;
        t.reserve(points_.size());
        for (const DataPoint& p : points_) t.push_back(p.target);
        return t;
    }

    /// Same features, new targets. Used to form residual problems.
    Dataset with_targets(const std::vector<double>& targets) const {
        if (targets.size() != points_.size())
            throw DimensionError("target count " + std::to_string(targets.size()) +
                                 " does not match dataset size " +
                                 std::to_string(points_.size()));
        std::vector<DataPoint> pts = points_;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!std::isfinite(targets[i]))
                throw DimensionError("replacement target " + std::to_string(i) +
                                     " is non-finite");
            pts[i].target = targets[i];
        }
        return Dataset(std::move(pts));
    }

private:
    std::vector<DataPoint> points_;
    std::size_t dim_ = 0;
};

} // namespace chebstack
