#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chebstack/errors.hpp"
#include "chebstack/simplex.hpp"

namespace chebstack {

inline constexpr double kFeasibilitySlackTol = -1e-9;

/// Rows c . z constrained to [lower, upper]; either side may be infinite.
/// A row with both sides infinite is permitted and inert.
class TwoSidedSystem {
public:
    struct Row {
        std::vector<double> coefficients;
        double lower;
        double upper;
    };

    explicit TwoSidedSystem(std::size_t variable_count) : vars_(variable_count) {}

    void add_row(std::vector<double> coefficients, double lower, double upper) {
        if (coefficients.size() != vars_)
            throw MalformedSystemError("row has " + std::to_string(coefficients.size()) +
                                       " coefficients, expected " + std::to_string(vars_));
        for (double c : coefficients)
            if (!std::isfinite(c))
                throw MalformedSystemError("row coefficients must be finite");
        if (std::isnan(lower) || std::isnan(upper))
            throw MalformedSystemError("row bounds must not be NaN");
        if (!(lower <= upper))
            throw MalformedSystemError("row bounds out of order: lower " +
                                       std::to_string(lower) + " > upper " +
                                       std::to_string(upper));
        rows_.push_back(Row{std::move(coefficients), lower, upper});
    }

    std::size_t variable_count() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }

private:
    std::size_t vars_;
    std::vector<Row> rows_;
};

enum class SlackStatus { Optimal, UnboundedSlack };

struct FeasibilityResult {
    double slack = 0.0;
    std::vector<double> witness;
    SlackStatus status = SlackStatus::Optimal;

    bool feasible() const { return slack >= kFeasibilitySlackTol; }
};

/// Maximize t such that lower_i + t <= c_i . z <= upper_i - t on finite sides.
/// Always has a feasible (z, t); the optimum is unbounded iff no pair of
/// finite sides opposes the growth of t. An unbounded result still carries a
/// usable witness, obtained by re-solving with t capped at 1.
inline FeasibilityResult max_slack(const TwoSidedSystem& sys) {
    const std::size_t nv = sys.variable_count();

    std::size_t sides = 0;
    for (const auto& row : sys.rows()) {
        if (std::isfinite(row.lower)) ++sides;
        if (std::isfinite(row.upper)) ++sides;
    }
    if (sides == 0) {
        FeasibilityResult r;
        r.slack = std::numeric_limits<double>::infinity();
        r.witness.assign(nv, 0.0);
        r.status = SlackStatus::UnboundedSlack;
        return r;
    }

    // Columns: z+ | z- | t+ | t- | one slack per finite side (plus one for
    // the optional t cap).
    const std::size_t tp = 2 * nv;
    const std::size_t tm = 2 * nv + 1;
    auto build = [&](bool cap_t) {
        detail::StandardForm lp;
        lp.rows = sides + (cap_t ? 1 : 0);
        lp.cols = 2 * nv + 2 + lp.rows;
        lp.entries.assign(lp.rows * lp.cols, 0.0);
        lp.rhs.assign(lp.rows, 0.0);
        lp.cost.assign(lp.cols, 0.0);
        lp.cost[tp] = -1.0; // maximize t
        lp.cost[tm] = 1.0;

        std::size_t r = 0;
        auto emit = [&](const TwoSidedSystem::Row& row, double bound, double t_sign,
                        double slack_sign) {
            // c.z + t_sign*t + slack_sign*s = bound, with s >= 0
            double flip = bound < 0.0 ? -1.0 : 1.0;
            for (std::size_t k = 0; k < nv; ++k) {
                lp.at(r, k) = flip * row.coefficients[k];
                lp.at(r, nv + k) = -flip * row.coefficients[k];
            }
            lp.at(r, tp) = flip * t_sign;
            lp.at(r, tm) = -flip * t_sign;
            lp.at(r, 2 * nv + 2 + r) = flip * slack_sign;
            lp.rhs[r] = flip * bound;
            ++r;
        };
        for (const auto& row : sys.rows()) {
            if (std::isfinite(row.lower)) emit(row, row.lower, -1.0, -1.0);
            if (std::isfinite(row.upper)) emit(row, row.upper, 1.0, 1.0);
        }
        if (cap_t) {
            // t + s = 1
            lp.at(r, tp) = 1.0;
            lp.at(r, tm) = -1.0;
            lp.at(r, 2 * nv + 2 + r) = 1.0;
            lp.rhs[r] = 1.0;
        }
        return lp;
    };

    detail::StandardForm lp = build(false);
    detail::SimplexSolution sol =
        detail::solve_standard_form(lp, 50 * (lp.rows + lp.cols));

    FeasibilityResult out;
    if (sol.unbounded) {
        // Re-solve with the cap so the witness actually satisfies the rows.
        lp = build(true);
        sol = detail::solve_standard_form(lp, 50 * (lp.rows + lp.cols));
        out.slack = std::numeric_limits<double>::infinity();
        out.status = SlackStatus::UnboundedSlack;
    } else {
        out.slack = sol.x[tp] - sol.x[tm];
        out.status = SlackStatus::Optimal;
    }
    out.witness.resize(nv);
    for (std::size_t k = 0; k < nv; ++k) out.witness[k] = sol.x[k] - sol.x[nv + k];
    return out;
}

struct HullSeparator {
    std::vector<double> normal; // normal . p <= offset - margin on P, >= offset + margin on Q
    double offset = 0.0;
    double margin = 0.0;
};

struct HullIntersection {
    bool intersects = false;
    std::vector<double> p_coefficients;
    std::vector<double> q_coefficients;
    std::vector<double> common_point;
    std::optional<HullSeparator> separator;
};

namespace detail {

inline std::size_t checked_dimension(const std::vector<std::vector<double>>& pts,
                                     const char* label) {
    if (pts.empty()) throw DimensionError(std::string(label) + " must be nonempty");
    const std::size_t d = pts.front().size();
    for (const auto& p : pts)
        if (p.size() != d)
            throw DimensionError(std::string(label) + " has points of mixed dimension");
    return d;
}

inline void clip_negatives(std::vector<double>& v) {
    for (double& x : v)
        if (x < 0.0) x = 0.0;
}

// Power of two with the cloud's largest coordinate magnitude in [1, 2) after
// division. Exact to divide by, so convex coefficients transfer verbatim
// between the scaled and original points; keeps the hull LPs conditioned
// when callers hand in clouds of extreme magnitude.
inline double coordinate_scale(
    std::initializer_list<const std::vector<std::vector<double>>*> clouds) {
    double maxabs = 0.0;
    for (const auto* pts : clouds)
        for (const auto& p : *pts)
            for (double v : p) maxabs = std::max(maxabs, std::abs(v));
    if (!(maxabs > 0.0) || !std::isfinite(maxabs)) return 1.0;
    int exp = 0;
    std::frexp(maxabs, &exp);
    return std::ldexp(1.0, exp - 1);
}

inline std::vector<std::vector<double>> scaled_points(
    const std::vector<std::vector<double>>& pts, double scale) {
    std::vector<std::vector<double>> out(pts);
    if (scale != 1.0)
        for (auto& p : out)
            for (double& v : p) v /= scale;
    return out;
}

inline HullSeparator separating_hyperplane(const std::vector<std::vector<double>>& P,
                                           const std::vector<std::vector<double>>& Q,
                                           std::size_t d) {
    // Variables (g, c): maximize the common margin of g.p <= c on P and
    // g.q >= c on Q, with the box |g_k| <= 1 keeping it bounded. Solved on
    // unit-scale copies of the clouds; offset and margin scale back linearly.
    const double scale = coordinate_scale({&P, &Q});
    TwoSidedSystem sys(d + 1);
    const double inf = std::numeric_limits<double>::infinity();
    for (auto& p : scaled_points(P, scale)) {
        p.push_back(-1.0);
        sys.add_row(std::move(p), -inf, 0.0);
    }
    for (auto& q : scaled_points(Q, scale)) {
        q.push_back(-1.0);
        sys.add_row(std::move(q), 0.0, inf);
    }
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> coeffs(d + 1, 0.0);
        coeffs[k] = 1.0;
        sys.add_row(std::move(coeffs), -1.0, 1.0);
    }

    const FeasibilityResult r = max_slack(sys);
    HullSeparator sep;
    sep.normal.assign(r.witness.begin(), r.witness.begin() + d);
    sep.offset = r.witness[d] * scale;
    sep.margin = r.slack * scale;
    double norm = 0.0;
    for (double g : sep.normal) norm = std::max(norm, std::abs(g));
    if (norm > 0.0) {
        for (double& g : sep.normal) g /= norm;
        sep.offset /= norm;
        sep.margin /= norm;
    }
    return sep;
}

} // namespace detail

/// Whether conv(P) and conv(Q) meet, via the convex-combination system
/// sum(lambda_i p_i) - sum(mu_j q_j) = 0, sum(lambda) = 1, sum(mu) = 1.
/// On intersection reports the coefficients and a common point; otherwise a
/// separating hyperplane with sup-norm-normalized normal.
inline HullIntersection hulls_intersect(const std::vector<std::vector<double>>& P,
                                        const std::vector<std::vector<double>>& Q) {
    const std::size_t d = detail::checked_dimension(P, "P");
    const std::size_t dq = detail::checked_dimension(Q, "Q");
    if (d != dq)
        throw DimensionError("P has dimension " + std::to_string(d) + ", Q has " +
                             std::to_string(dq));

    const std::size_t np = P.size();
    const std::size_t nq = Q.size();
    const double inf = std::numeric_limits<double>::infinity();

    // The convex-combination rows carry the coordinates; solving them at
    // unit scale keeps them commensurate with the sum-to-one rows. Exact
    // scaling means the coefficients found apply to the original points.
    const double scale = detail::coordinate_scale({&P, &Q});
    const auto Ps = detail::scaled_points(P, scale);
    const auto Qs = detail::scaled_points(Q, scale);

    TwoSidedSystem sys(np + nq);
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> coeffs(np + nq, 0.0);
        for (std::size_t i = 0; i < np; ++i) coeffs[i] = Ps[i][k];
        for (std::size_t j = 0; j < nq; ++j) coeffs[np + j] = -Qs[j][k];
        sys.add_row(std::move(coeffs), 0.0, 0.0);
    }
    {
        std::vector<double> coeffs(np + nq, 0.0);
        for (std::size_t i = 0; i < np; ++i) coeffs[i] = 1.0;
        sys.add_row(std::move(coeffs), 1.0, 1.0);
    }
    {
        std::vector<double> coeffs(np + nq, 0.0);
        for (std::size_t j = 0; j < nq; ++j) coeffs[np + j] = 1.0;
        sys.add_row(std::move(coeffs), 1.0, 1.0);
    }
    for (std::size_t v = 0; v < np + nq; ++v) {
        std::vector<double> coeffs(np + nq, 0.0);
        coeffs[v] = 1.0;
        sys.add_row(std::move(coeffs), 0.0, inf);
    }

    const FeasibilityResult r = max_slack(sys);

    HullIntersection out;
    // The slack lives at the solved scale; the tolerance is original-units.
    out.intersects = r.slack * scale >= kFeasibilitySlackTol;
    if (out.intersects) {
        out.p_coefficients.assign(r.witness.begin(), r.witness.begin() + np);
        out.q_coefficients.assign(r.witness.begin() + np, r.witness.end());
        detail::clip_negatives(out.p_coefficients);
        detail::clip_negatives(out.q_coefficients);
        out.common_point.assign(d, 0.0);
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t k = 0; k < d; ++k)
                out.common_point[k] += out.p_coefficients[i] * P[i][k];
    } else {
        out.separator = detail::separating_hyperplane(P, Q, d);
    }
    return out;
}

struct HullMembership {
    bool inside = false;
    std::vector<double> coefficients;
};

/// Whether x lies in conv(V) within tol, measured as the smallest achievable
/// maximum violation across the convex-combination constraints.
inline HullMembership point_in_hull(const std::vector<double>& x,
                                    const std::vector<std::vector<double>>& V,
                                    double tol = 1e-7) {
    const std::size_t d = detail::checked_dimension(V, "V");
    if (x.size() != d)
        throw DimensionError("point has dimension " + std::to_string(x.size()) +
                             ", hull points have " + std::to_string(d));

    const std::size_t n = V.size();
    const double inf = std::numeric_limits<double>::infinity();

    const std::vector<std::vector<double>> xs{x};
    const double scale = detail::coordinate_scale({&V, &xs});
    const auto Vs = detail::scaled_points(V, scale);

    TwoSidedSystem sys(n);
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> coeffs(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) coeffs[i] = Vs[i][k];
        sys.add_row(std::move(coeffs), x[k] / scale, x[k] / scale);
    }
    {
        std::vector<double> coeffs(n, 1.0);
        sys.add_row(std::move(coeffs), 1.0, 1.0);
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<double> coeffs(n, 0.0);
        coeffs[v] = 1.0;
        sys.add_row(std::move(coeffs), 0.0, inf);
    }

    const FeasibilityResult r = max_slack(sys);

    HullMembership out;
    out.inside = r.slack * scale >= -tol;
    if (out.inside) {
        out.coefficients = r.witness;
        detail::clip_negatives(out.coefficients);
    }
    return out;
}

} // namespace chebstack
