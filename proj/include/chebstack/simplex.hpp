#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "chebstack/errors.hpp"

namespace chebstack::detail {

/// Equality-standard-form LP: minimize cost . x subject to A x = rhs, x >= 0.
/// The builder must arrange rhs >= 0 (negate a row to flip its sign).
struct StandardForm {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> entries; // row-major rows x cols
    std::vector<double> rhs;
    std::vector<double> cost;

    double& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

struct SimplexSolution {
    bool unbounded = false;
    std::vector<double> x; // basic solution; when unbounded, the last feasible point
    double objective = 0.0;
};

/// Full-tableau two-phase primal simplex with Bland's rule.
///
/// Artificial columns live at indices [cols, cols+rows); only structural
/// columns may enter, so after phase 1 drives artificials out they never
/// return. Kept dense: every system in this project is small.
class DenseSimplex {
public:
    DenseSimplex(const StandardForm& lp, std::size_t iteration_cap)
        : m_(lp.rows), n_(lp.cols), total_(lp.cols + lp.rows), cap_(iteration_cap) {
        tab_.assign(m_ * total_, 0.0);
        rhs_ = lp.rhs;
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) tab(i, j) = lp.at(i, j);
            tab(i, n_ + i) = 1.0;
            basis_[i] = n_ + i;
        }
    }

    SimplexSolution run(const std::vector<double>& cost) {
        phase_one();
        return phase_two(cost);
    }

private:
    static constexpr double kReducedCostTol = 1e-11;
    static constexpr double kPivotTol = 1e-9;
    static constexpr double kUnboundedTol = 1e-7;

    double& tab(std::size_t i, std::size_t j) { return tab_[i * total_ + j]; }
    double tab(std::size_t i, std::size_t j) const { return tab_[i * total_ + j]; }

    void phase_one() {
        // Minimize the sum of artificials; bounded below by 0 by construction.
        std::vector<double> full(total_, 0.0);
        for (std::size_t j = n_; j < total_; ++j) full[j] = 1.0;
        run_with_refresh(full, false);

        double residual = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= n_) residual += rhs_[i];
        double scale = 1.0;
        for (double v : rhs_) scale = std::max(scale, std::abs(v));
        if (residual > 1e-8 * scale)
            throw NumericError("simplex phase 1 ended with residual " +
                               std::to_string(residual));

        drive_out_artificials();
    }

    SimplexSolution phase_two(const std::vector<double>& cost) {
        std::vector<double> full(cost);
        full.resize(total_, 0.0);

        SimplexSolution out;
        out.unbounded = !run_with_refresh(full, true);
        out.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) out.x[basis_[i]] = rhs_[i];
        for (std::size_t j = 0; j < n_; ++j) out.objective += cost[j] * out.x[j];
        return out;
    }

    // Reduced costs derived from the current tableau rather than carried
    // incrementally, so accumulated pivot roundoff cannot fake optimality.
    std::vector<double> reduced_costs(const std::vector<double>& full_cost) const {
        std::vector<double> red(total_);
        for (std::size_t j = 0; j < total_; ++j) {
            double acc = full_cost[j];
            for (std::size_t i = 0; i < m_; ++i) {
                const double c = full_cost[basis_[i]];
                if (c != 0.0) acc -= c * tab(i, j);
            }
            red[j] = acc;
        }
        return red;
    }

    // Restarts the Bland loop with freshly derived reduced costs until a
    // restart finds nothing left to pivot. Returns false when unbounded.
    bool run_with_refresh(const std::vector<double>& full_cost, bool allow_unbounded) {
        for (int round = 0; round < 8; ++round) {
            std::vector<double> red = reduced_costs(full_cost);
            const std::size_t before = pivots_;
            if (!bland_loop(red, allow_unbounded)) return false;
            if (pivots_ == before) break;
        }
        return true;
    }

    // Returns false when the objective is unbounded below. Candidate entering
    // columns are tried in Bland order; one whose tableau entries are all
    // nonpositive signals a descent ray, which is genuine only when its
    // reduced cost is decisively negative and we are past phase 1 (the
    // artificial objective is bounded, so there such a column is noise).
    bool bland_loop(std::vector<double>& red, bool allow_unbounded) {
        while (true) {
            bool pivoted = false;
            for (std::size_t j = 0; j < n_; ++j) {
                if (red[j] >= -kReducedCostTol) continue;

                std::size_t leave = m_;
                double best_ratio = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < m_; ++i) {
                    const double a = tab(i, j);
                    if (a <= kPivotTol) continue;
                    const double ratio = rhs_[i] / a;
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio <= best_ratio + 1e-12 &&
                         (leave == m_ || basis_[i] < basis_[leave]))) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
                if (leave == m_) {
                    if (allow_unbounded && red[j] < -kUnboundedTol) return false;
                    continue;
                }

                pivot(leave, j, red);
                pivoted = true;
                break;
            }
            if (!pivoted) return true;
            if (++pivots_ > cap_)
                throw NumericError("simplex exceeded its iteration cap of " +
                                   std::to_string(cap_));
        }
    }

    void pivot(std::size_t row, std::size_t col, std::vector<double>& red) {
        const double p = tab(row, col);
        for (std::size_t j = 0; j < total_; ++j) tab(row, j) /= p;
        rhs_[row] /= p;
        tab(row, col) = 1.0;

        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = tab(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < total_; ++j) tab(i, j) -= f * tab(row, j);
            tab(i, col) = 0.0;
            rhs_[i] -= f * rhs_[row];
            if (rhs_[i] < 0.0 && rhs_[i] > -1e-11) rhs_[i] = 0.0;
        }

        const double f = red[col];
        if (f != 0.0) {
            for (std::size_t j = 0; j < total_; ++j) red[j] -= f * tab(row, j);
            red[col] = 0.0;
        }
        basis_[row] = col;
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_;) {
            if (basis_[i] < n_) {
                ++i;
                continue;
            }
            std::size_t col = n_;
            for (std::size_t j = 0; j < n_; ++j)
                if (std::abs(tab(i, j)) > kPivotTol) {
                    col = j;
                    break;
                }
            if (col < n_) {
                std::vector<double> dummy(total_, 0.0);
                pivot(i, col, dummy);
                ++i;
            } else {
                remove_row(i); // dependent constraint, already satisfied
            }
        }
    }

    void remove_row(std::size_t row) {
        const std::size_t last = m_ - 1;
        if (row != last) {
            for (std::size_t j = 0; j < total_; ++j) tab(row, j) = tab(last, j);
            rhs_[row] = rhs_[last];
            basis_[row] = basis_[last];
        }
        --m_;
        tab_.resize(m_ * total_);
        rhs_.resize(m_);
        basis_.resize(m_);
    }

    std::size_t m_;
    std::size_t n_;
    std::size_t total_;
    std::size_t cap_;
    std::size_t pivots_ = 0;  // spans phases and refresh rounds
    std::vector<double> tab_;
    std::vector<double> rhs_;
    std::vector<std::size_t> basis_;
};

inline SimplexSolution solve_standard_form(const StandardForm& lp,
                                           std::size_t iteration_cap) {
    return DenseSimplex(lp, iteration_cap).run(lp.cost);
}

} // namespace chebstack::detail
