#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace orthobox {

/// Outcome of deciding whether {x >= 0 : A x = b} is nonempty.
///
/// Feasible: `point` satisfies the system exactly.
/// Infeasible: `farkas` is a vector y with y^T A <= 0 columnwise and y^T b > 0.
template <class Scalar>
struct LinearFeasibility {
    bool feasible = false;
    std::vector<Scalar> point;
    std::vector<Scalar> farkas;
};

/// Phase-one simplex over an exact field, Bland's rule (no cycling).
///
/// Dense tableau with one artificial column per row; the artificial columns
/// are kept so that the phase-one duals can be read off at the end.
template <class Scalar>
LinearFeasibility<Scalar> solve_feasibility(const std::vector<std::vector<Scalar>>& a, const std::vector<Scalar>& b) {
    const std::size_t rows = b.size();
    if (a.size() != rows) throw PreconditionError("constraint matrix and right-hand side disagree in size");
    const std::size_t cols = rows == 0 ? 0 : a.front().size();
    for (const auto& row : a) {
        if (row.size() != cols) throw PreconditionError("ragged constraint matrix");
    }

    const std::size_t width = cols + rows;  // structural + artificial
    std::vector<std::vector<Scalar>> t(rows, std::vector<Scalar>(width + 1, Scalar(0)));
    std::vector<int> sign(rows, 1);
    for (std::size_t i = 0; i < rows; ++i) {
        sign[i] = b[i] < 0 ? -1 : 1;
        for (std::size_t j = 0; j < cols; ++j) t[i][j] = sign[i] < 0 ? Scalar(-a[i][j]) : a[i][j];
        t[i][cols + i] = Scalar(1);
        t[i][width] = sign[i] < 0 ? Scalar(-b[i]) : b[i];
    }
    std::vector<std::size_t> basis(rows);
    for (std::size_t i = 0; i < rows; ++i) basis[i] = cols + i;

    // Reduced costs for min sum(artificials); last entry is minus the objective.
    std::vector<Scalar> cost(width + 1, Scalar(0));
    for (std::size_t j = 0; j <= width; ++j) {
        if (j >= cols && j < width) continue;
        for (std::size_t i = 0; i < rows; ++i) cost[j] -= t[i][j];
    }

    for (;;) {
        std::optional<std::size_t> entering;
        for (std::size_t j = 0; j < width; ++j) {
            if (cost[j] < 0) {
                entering = j;
                break;
            }
        }
        if (!entering) break;
        const std::size_t e = *entering;

        std::optional<std::size_t> leaving;
        Scalar best_ratio(0);
        for (std::size_t i = 0; i < rows; ++i) {
            if (t[i][e] <= 0) continue;
            Scalar ratio = t[i][width] / t[i][e];
            if (!leaving || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[*leaving])) {
                leaving = i;
                best_ratio = ratio;
            }
        }
        // Phase one is bounded below by zero, so an entering column always has a pivot.
        if (!leaving) throw PreconditionError("phase-one simplex unbounded (internal error)");
        const std::size_t r = *leaving;

        const Scalar pivot = t[r][e];
        for (auto& v : t[r]) v /= pivot;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || t[i][e] == 0) continue;
            const Scalar f = t[i][e];
            for (std::size_t j = 0; j <= width; ++j) t[i][j] -= f * t[r][j];
        }
        if (cost[e] != 0) {
            const Scalar f = cost[e];
            for (std::size_t j = 0; j <= width; ++j) cost[j] -= f * t[r][j];
        }
        basis[r] = e;
    }

    LinearFeasibility<Scalar> out;
    const Scalar objective = -cost[width];
    if (objective == 0) {
        out.feasible = true;
        out.point.assign(cols, Scalar(0));
        for (std::size_t i = 0; i < rows; ++i) {
            if (basis[i] < cols) out.point[basis[i]] = t[i][width];
        }
    } else {
        out.feasible = false;
        out.farkas.resize(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            Scalar dual = Scalar(1) - cost[cols + i];
            out.farkas[i] = sign[i] < 0 ? Scalar(-dual) : dual;
        }
    }
    return out;
}

}  // namespace orthobox
