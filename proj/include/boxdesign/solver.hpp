#pragma once

#include "boxdesign/matrix.hpp"
#include "boxdesign/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace boxdesign {

/// Choose k of the m rows of `cost` so that sum_j weights[j] * min over chosen
/// rows of cost(i, j) is as small as possible. Non-owning: the matrix and the
/// weights must outlive the problem.
template <typename Real = double>
struct SelectionProblem {
    const Matrix<Real>*   cost = nullptr;
    std::span<const Real> weights;
    std::size_t           k = 1;

    SelectionProblem(const Matrix<Real>& cost_matrix, std::span<const Real> column_weights, std::size_t rows_to_pick)
      : cost(&cost_matrix), weights(column_weights), k(rows_to_pick) {
        validate();
    }

    [[nodiscard]] std::size_t rows() const noexcept { return cost->rows(); }
    [[nodiscard]] std::size_t cols() const noexcept { return cost->cols(); }

    void validate() const {
        if (cost->rows() == 0 || cost->cols() == 0) throw ValidationError("selection problem: empty cost matrix");
        if (weights.size() != cost->cols()) {
            throw ValidationError("selection problem: " + std::to_string(weights.size()) + " weights for " +
                                  std::to_string(cost->cols()) + " columns");
        }
        for (Real w : weights) {
            if (!std::isfinite(w) || w < Real{0}) throw ValidationError("selection problem: weights must be finite and >= 0");
        }
        if (k < 1 || k > cost->rows()) {
            throw ValidationError("selection problem: k=" + std::to_string(k) + " outside [1, " +
                                  std::to_string(cost->rows()) + "]");
        }
    }
};

template <typename Real = double>
struct Selection {
    std::vector<std::size_t> rows;        // greedy keeps pick order
    Real                     objective{};
    std::vector<std::size_t> assignment;  // column -> selected row attaining its minimum
    std::vector<Real>        history;     // objective after each greedy step / EM iteration (EM: index 0 = start)
    std::size_t              iterations = 0;
};

template <typename Real>
Real objective(const SelectionProblem<Real>& problem, std::span<const std::size_t> rows) {
    if (rows.empty()) throw ValidationError("objective: empty row set");
    for (auto r : rows) {
        if (r >= problem.rows()) throw ValidationError("objective: row index " + std::to_string(r) + " out of range");
    }
    const auto& cost  = *problem.cost;
    Real        total = 0;
    for (std::size_t j = 0; j < problem.cols(); ++j) {
        Real best = cost(rows[0], j);
        for (std::size_t r = 1; r < rows.size(); ++r) best = std::min(best, cost(rows[r], j));
        total += problem.weights[j] * best;
    }
    return total;
}

namespace detail {

// Per column, the selected row with the smallest cost; ties go to the smaller row index.
template <typename Real>
std::vector<std::size_t> assign_columns(const SelectionProblem<Real>& problem, std::span<const std::size_t> rows) {
    std::vector<std::size_t> sorted(rows.begin(), rows.end());
    std::sort(sorted.begin(), sorted.end());
    const auto&              cost = *problem.cost;
    std::vector<std::size_t> assignment(problem.cols());
    for (std::size_t j = 0; j < problem.cols(); ++j) {
        std::size_t best = sorted[0];
        for (std::size_t r = 1; r < sorted.size(); ++r) {
            if (cost(sorted[r], j) < cost(best, j)) best = sorted[r];
        }
        assignment[j] = best;
    }
    return assignment;
}

template <typename Real>
Selection<Real> finish(const SelectionProblem<Real>& problem, std::vector<std::size_t> rows) {
    Selection<Real> selection;
    selection.objective  = objective(problem, std::span<const std::size_t>(rows));
    selection.assignment = assign_columns(problem, std::span<const std::size_t>(rows));
    selection.rows       = std::move(rows);
    return selection;
}

}  // namespace detail

/// Greedy forward selection. Each step adds the unselected row whose inclusion
/// gives the smallest weighted sum of running column minima; ties go to the
/// smallest row index. history[l] is the objective after l + 1 picks.
///
/// A row's improvement over the running minima can only shrink as rows are
/// added, so an old improvement bounds the current key from below. After the
/// first two full scans, rows are re-scored in order of that bound and the scan
/// stops once no remaining bound (widened by a rounding allowance) can reach
/// the best key. Keys are always summed exactly as a full scan would, so the
/// picks and the history are identical to the plain algorithm.
template <typename Real>
Selection<Real> solve_greedy(const SelectionProblem<Real>& problem) {
    problem.validate();
    const std::size_t m    = problem.rows();
    const std::size_t n    = problem.cols();
    const auto&       cost = *problem.cost;
    constexpr Real    inf  = std::numeric_limits<Real>::infinity();

    // Running minimum of w_j * c_ij over selected rows.
    std::vector<Real>        running(n, inf);
    std::vector<bool>        taken(m, false);
    std::vector<std::size_t> rows;
    std::vector<Real>        history;

    auto key_of = [&](std::size_t i) {
        const auto row = cost.row(i);
        Real       sum = 0;
        for (std::size_t j = 0; j < n; ++j) sum += std::min(running[j], problem.weights[j] * row[j]);
        return sum;
    };
    auto pick = [&](std::size_t best_row, Real best_sum) {
        taken[best_row] = true;
        rows.push_back(best_row);
        const auto row = cost.row(best_row);
        for (std::size_t j = 0; j < n; ++j) running[j] = std::min(running[j], problem.weights[j] * row[j]);
        history.push_back(best_sum);
    };

    // Step 1: full scan, also collecting each row's absolute weighted mass for the rounding allowance.
    Real max_abs = 0;
    {
        std::size_t best_row = m;
        Real        best_sum = inf;
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = cost.row(i);
            Real       sum = 0, abs_sum = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const Real term = problem.weights[j] * row[j];
                sum += term;
                abs_sum += std::abs(term);
            }
            max_abs = std::max(max_abs, abs_sum);
            if (best_row == m || sum < best_sum) {
                best_row = i;
                best_sum = sum;
            }
        }
        pick(best_row, best_sum);
    }
    if (problem.k == 1) {
        auto selection       = detail::finish(problem, std::move(rows));
        selection.history    = std::move(history);
        selection.iterations = 1;
        return selection;
    }

    // Every term of every key, and every running minimum, is bounded by max_abs + |running after step 1|.
    Real running_abs = 0;
    for (Real r : running) running_abs += std::abs(r);
    const Real allowance =
        Real{8} * static_cast<Real>(n + 2) * std::numeric_limits<Real>::epsilon() * (Real{2} * max_abs + running_abs);

    std::vector<Real> gain(m, inf);  // stale improvement over the running minima; +inf = never scored
    std::vector<std::pair<Real, std::size_t>> order;
    order.reserve(m);
    for (std::size_t step = 1; step < problem.k; ++step) {
        Real total = 0;
        for (Real r : running) total += r;
        order.clear();
        for (std::size_t i = 0; i < m; ++i) {
            if (!taken[i]) order.emplace_back(total - gain[i], i);
        }
        std::sort(order.begin(), order.end());

        std::size_t best_row = m;
        Real        best_sum = inf;
        for (const auto& [bound, i] : order) {
            if (best_row != m && bound > best_sum + allowance) break;
            const Real sum = key_of(i);
            gain[i]        = total - sum;
            if (best_row == m || sum < best_sum || (sum == best_sum && i < best_row)) {
                best_row = i;
                best_sum = sum;
            }
        }
        pick(best_row, best_sum);
    }

    auto selection       = detail::finish(problem, std::move(rows));
    selection.history    = std::move(history);
    selection.iterations = problem.k;
    return selection;
}

/// Alternating k-medoids. Starting from `init` (or k rows sampled with `seed`):
/// assign each column to its cheapest selected row, then within each cluster
/// move the medoid to the row (not selected elsewhere) with the lowest weighted
/// cost over the cluster's columns. A medoid only moves on strict improvement.
/// Stops when nothing moves or after `max_iter` iterations.
template <typename Real>
Selection<Real> solve_em(const SelectionProblem<Real>&     problem,
                         std::optional<std::vector<std::size_t>> init,
                         std::size_t                        max_iter,
                         std::uint64_t                      seed) {
    problem.validate();
    if (max_iter < 1) throw ValidationError("solve_em: max_iter must be >= 1");
    const std::size_t m    = problem.rows();
    const std::size_t n    = problem.cols();
    const auto&       cost = *problem.cost;

    std::vector<std::size_t> medoids;
    if (init) {
        medoids = *init;
        if (medoids.size() != problem.k) throw ValidationError("solve_em: init must hold exactly k rows");
        std::vector<bool> used(m, false);
        for (auto r : medoids) {
            if (r >= m) throw ValidationError("solve_em: init row out of range");
            if (used[r]) throw ValidationError("solve_em: init rows must be distinct");
            used[r] = true;
        }
    } else {
        // Partial Fisher-Yates driven by the raw engine so the draw is portable.
        std::mt19937_64          engine(seed);
        std::vector<std::size_t> pool(m);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t s = 0; s < problem.k; ++s) {
            const std::size_t pick = s + static_cast<std::size_t>(engine() % (m - s));
            std::swap(pool[s], pool[pick]);
        }
        medoids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(problem.k));
    }

    std::vector<Real> history{objective(problem, std::span<const std::size_t>(medoids))};
    std::vector<bool> selected(m, false);
    for (auto r : medoids) selected[r] = true;

    std::size_t iterations = 0;
    std::vector<Real> cluster_cost(problem.k);
    while (iterations < max_iter) {
        ++iterations;
        // E: label each column by the position of its medoid in `medoids`.
        const auto                 owner = detail::assign_columns(problem, std::span<const std::size_t>(medoids));
        std::vector<std::size_t>   label(n);
        for (std::size_t j = 0; j < n; ++j) {
            label[j] = static_cast<std::size_t>(std::find(medoids.begin(), medoids.end(), owner[j]) - medoids.begin());
        }

        // M: one pass over the matrix accumulates every row's cost for every cluster.
        bool moved = false;
        Matrix<Real> per_cluster(m, problem.k, Real{0});
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = cost.row(i);
            auto       acc = per_cluster.row(i);
            for (std::size_t j = 0; j < n; ++j) acc[label[j]] += problem.weights[j] * row[j];
        }
        for (std::size_t c = 0; c < problem.k; ++c) {
            std::size_t best      = medoids[c];
            Real        best_cost = per_cluster(best, c);
            for (std::size_t i = 0; i < m; ++i) {
                if (selected[i]) continue;
                if (per_cluster(i, c) < best_cost) {
                    best      = i;
                    best_cost = per_cluster(i, c);
                }
            }
            if (best != medoids[c]) {
                selected[medoids[c]] = false;
                selected[best]       = true;
                medoids[c]           = best;
                moved                = true;
            }
        }
        history.push_back(objective(problem, std::span<const std::size_t>(medoids)));
        if (!moved) break;
    }

    auto selection       = detail::finish(problem, std::move(medoids));
    selection.history    = std::move(history);
    selection.iterations = iterations;
    return selection;
}

inline constexpr std::uint64_t kDefaultExhaustiveBudget = 2'000'000;

// C(m, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t m, std::uint64_t k) {
    if (k > m) return 0;
    k = std::min(k, m - k);
    long double value = 1;
    for (std::uint64_t t = 1; t <= k; ++t) value = value * static_cast<long double>(m - k + t) / static_cast<long double>(t);
    if (value >= static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(std::llround(value));
}

class BudgetExceededError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Global optimum by enumerating all C(m, k) row sets in lexicographic order;
/// the first minimum wins. Refuses when C(m, k) exceeds `budget`.
template <typename Real>
Selection<Real> solve_exhaustive(const SelectionProblem<Real>& problem,
                                 std::uint64_t                 budget = kDefaultExhaustiveBudget) {
    problem.validate();
    const std::size_t   m     = problem.rows();
    const std::size_t   k     = problem.k;
    const std::uint64_t count = binomial(m, k);
    if (count > budget) {
        throw BudgetExceededError("solve_exhaustive: C(" + std::to_string(m) + ", " + std::to_string(k) +
                                  ") = " + std::to_string(count) + " subsets exceeds budget " +
                                  std::to_string(budget));
    }

    std::vector<std::size_t> combo(k);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    std::vector<std::size_t> best = combo;
    Real                     best_value = objective(problem, std::span<const std::size_t>(combo));
    while (true) {
        std::size_t pos = k;
        while (pos > 0 && combo[pos - 1] == m - k + pos - 1) --pos;
        if (pos == 0) break;
        ++combo[pos - 1];
        for (std::size_t t = pos; t < k; ++t) combo[t] = combo[t - 1] + 1;
        const Real value = objective(problem, std::span<const std::size_t>(combo));
        if (value < best_value) {
            best_value = value;
            best       = combo;
        }
    }
    return detail::finish(problem, std::move(best));
}

}  // namespace boxdesign
