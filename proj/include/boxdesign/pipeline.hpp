#pragma once

#include "boxdesign/analytics.hpp"
#include "boxdesign/model.hpp"
#include "boxdesign/packer.hpp"
#include "boxdesign/solver.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace boxdesign {

struct SplitSpec {
    double        train_fraction      = 0.6;
    double        validation_fraction = 0.2;
    double        test_fraction       = 0.2;
    std::uint64_t seed                = 0;

    void validate() const {
        for (double f : {train_fraction, validation_fraction, test_fraction}) {
            if (!(f > 0.0 && f < 1.0)) throw ValidationError("split fractions must each lie in (0, 1)");
        }
        if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-12) {
            throw ValidationError("split fractions must sum to 1");
        }
    }
};

struct CorpusSplit {
    std::vector<Order> train;
    std::vector<Order> validation;
    std::vector<Order> test;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Uniform value in [0, 1) determined by the order id and the seed alone.
inline double split_key(std::string_view order_id, std::uint64_t seed) {
    const std::uint64_t mixed = detail::splitmix64(detail::fnv1a(order_id) ^ detail::splitmix64(seed));
    return static_cast<double>(mixed >> 11) * 0x1.0p-53;
}

/// Assigns each order to train / validation / test by hashing its id with the
/// seed, so the split does not depend on the order of the corpus.
inline CorpusSplit split_corpus(std::span<const Order> orders, const SplitSpec& spec) {
    spec.validate();
    if (orders.size() < 3) throw ValidationError("split_corpus: need at least 3 orders");
    CorpusSplit split;
    const double train_cut = spec.train_fraction;
    const double valid_cut = spec.train_fraction + spec.validation_fraction;
    for (const auto& order : orders) {
        const double key = split_key(order.order_id(), spec.seed);
        if (key < train_cut) {
            split.train.push_back(order);
        } else if (key < valid_cut) {
            split.validation.push_back(order);
        } else {
            split.test.push_back(order);
        }
    }
    return split;
}

struct AssortmentReport {
    std::vector<std::string> assortment;
    std::string              corpus_label;
    std::size_t              orders           = 0;
    std::size_t              total_boxes_used = 0;
    double                   packed_volume    = 0.0;
    double                   box_volume       = 0.0;
    double                   utilization      = 0.0;  // packed_volume / box_volume, 0 when nothing was packed
    std::size_t              unpacked_items   = 0;
};

inline AssortmentReport summarize(std::span<const PackingResult> results, std::span<const BoxType> assortment,
                                  std::string corpus_label) {
    AssortmentReport report;
    for (const auto& box : assortment) report.assortment.push_back(box.id());
    report.corpus_label = std::move(corpus_label);
    report.orders       = results.size();
    for (const auto& result : results) {
        report.total_boxes_used += result.boxes.size();
        report.packed_volume += result.packed_volume();
        report.box_volume += result.box_volume();
        report.unpacked_items += result.unpacked.size();
    }
    report.utilization = report.box_volume > 0.0 ? report.packed_volume / report.box_volume : 0.0;
    return report;
}

/// Packs every order with `assortment` and aggregates box count, corpus-level
/// utilization and unpacked items.
inline AssortmentReport evaluate_assortment(std::span<const BoxType> assortment, std::span<const Order> orders,
                                            std::string corpus_label = "corpus", std::size_t threads = 1) {
    if (assortment.empty()) throw ValidationError("evaluate_assortment: empty assortment");
    if (orders.empty()) throw ValidationError("evaluate_assortment: empty order corpus");
    const auto results = pack_corpus(orders, assortment, threads);
    return summarize(results, assortment, std::move(corpus_label));
}

struct Comparison {
    double box_reduction_pct           = 0.0;
    double utilization_improvement_pct = 0.0;
};

/// Percent fewer boxes and relative percent gain in utilization of `candidate` over `baseline`.
inline Comparison compare(const AssortmentReport& candidate, const AssortmentReport& baseline) {
    if (candidate.corpus_label != baseline.corpus_label) {
        throw ValidationError("compare: reports are for different corpora ('" + candidate.corpus_label + "' vs '" +
                              baseline.corpus_label + "')");
    }
    if (baseline.total_boxes_used == 0) throw UndefinedMetricError("compare: baseline used no boxes");
    if (!(baseline.utilization > 0.0)) throw UndefinedMetricError("compare: baseline utilization is zero");
    const auto base_boxes = static_cast<double>(baseline.total_boxes_used);
    const auto cand_boxes = static_cast<double>(candidate.total_boxes_used);
    return {100.0 * (base_boxes - cand_boxes) / base_boxes,
            100.0 * (candidate.utilization - baseline.utilization) / baseline.utilization};
}

struct GridResult {
    TuningParams              params;
    double                    box_reduction_pct           = 0.0;
    double                    utilization_improvement_pct = 0.0;
    Selection<double>         selection;
    std::vector<std::string>  box_ids;  // selected pool boxes, in pick order
    AssortmentReport          report;   // selected assortment on the validation corpus
};

// rho x delta x alpha, rho outermost.
inline std::vector<TuningParams> make_grid(std::span<const double> rhos, std::span<const double> deltas,
                                           std::span<const double> alphas) {
    std::vector<TuningParams> grid;
    for (double rho : rhos) {
        for (double delta : deltas) {
            for (double alpha : alphas) grid.push_back({rho, delta, alpha});
        }
    }
    return grid;
}

// rho in {0.25, 0.5, 0.75, 1}, delta and alpha in {0, ..., 4}: 100 settings.
inline std::vector<TuningParams> default_grid() {
    static constexpr double rhos[]   = {0.25, 0.5, 0.75, 1.0};
    static constexpr double deltas[] = {0, 1, 2, 3, 4};
    static constexpr double alphas[] = {0, 1, 2, 3, 4};
    return make_grid(rhos, deltas, alphas);
}

// Boxes chosen by a selection, in pick order.
inline std::vector<BoxType> selected_boxes(const CandidatePool& pool, const Selection<double>& selection) {
    std::vector<BoxType> boxes;
    for (auto row : selection.rows) boxes.push_back(pool[row]);
    return boxes;
}

/// Weights from effective volumes, costs from (delta, alpha), then greedy selection of k boxes.
inline Selection<double> design_assortment(const CandidatePool& pool, std::span<const double> ev,
                                           const TuningParams& params, std::size_t k, WeightVector* weights_out = nullptr) {
    params.validate();
    auto       weights = compute_weights(std::vector<double>(ev.begin(), ev.end()), pool, params.rho);
    const auto cost    = build_cost_matrix(pool, params.delta, params.alpha);
    const SelectionProblem<double> problem(cost, weights.w, k);
    auto selection = solve_greedy(problem);
    if (weights_out) *weights_out = std::move(weights);
    return selection;
}

struct GridOptions {
    std::size_t threads        = 1;
    bool        cache_ev       = true;  // effective volumes depend only on (train, pool)
};

/// Runs every grid setting: weights and costs from the training corpus, greedy
/// selection of k boxes, evaluation on the validation corpus against the baseline.
/// Results follow the grid order.
inline std::vector<GridResult> grid_search(std::span<const Order> train, std::span<const Order> validation,
                                           const CandidatePool& pool, std::span<const BoxType> baseline, std::size_t k,
                                           std::span<const TuningParams> grid, const GridOptions& options = {}) {
    if (grid.empty()) throw ValidationError("grid_search: empty grid");
    if (k < 1 || k > pool.size()) throw ValidationError("grid_search: k must lie in [1, pool size]");
    for (const auto& params : grid) params.validate();

    const auto baseline_report = evaluate_assortment(baseline, validation, "validation", options.threads);

    std::optional<std::vector<double>> cached_ev;
    if (options.cache_ev) cached_ev = estimate_effective_volumes(train, pool, options.threads);

    std::vector<GridResult> results(grid.size());
    auto run = [&](std::size_t g, std::size_t pack_threads) {
        const auto& params = grid[g];
        const auto  ev     = cached_ev ? *cached_ev : estimate_effective_volumes(train, pool, pack_threads);
        GridResult  result;
        result.params    = params;
        result.selection = design_assortment(pool, ev, params, k);
        const auto boxes = selected_boxes(pool, result.selection);
        for (const auto& box : boxes) result.box_ids.push_back(box.id());
        result.report = evaluate_assortment(boxes, validation, "validation", pack_threads);
        const auto cmp = compare(result.report, baseline_report);
        result.box_reduction_pct           = cmp.box_reduction_pct;
        result.utilization_improvement_pct = cmp.utilization_improvement_pct;
        results[g] = std::move(result);
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, grid.size()));
    if (threads == 1) {
        for (std::size_t g = 0; g < grid.size(); ++g) run(g, 1);
        return results;
    }
    std::vector<std::thread>        workers;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (std::size_t g = t; g < grid.size(); g += threads) run(g, 1);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& worker : workers) worker.join();
    for (auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }
    return results;
}

// Only the fields model selection looks at.
struct GridScore {
    TuningParams params;
    double       box_reduction_pct           = 0.0;
    double       utilization_improvement_pct = 0.0;
};

struct ModelChoice {
    std::size_t  index = 0;
    TuningParams params;
    bool         sacrifices_boxes = false;  // no setting kept the box count; best utilization taken anyway
};

/// Largest utilization improvement among settings that do not use more boxes
/// than the baseline; ties go to the larger box reduction, then grid order.
inline ModelChoice select_model(std::span<const GridScore> scores) {
    if (scores.empty()) throw ValidationError("select_model: no results");
    auto pick = [&](bool require_no_sacrifice) -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (std::size_t r = 0; r < scores.size(); ++r) {
            const auto& s = scores[r];
            if (require_no_sacrifice && s.box_reduction_pct < 0.0) continue;
            if (!best) {
                best = r;
                continue;
            }
            const auto& b = scores[*best];
            if (s.utilization_improvement_pct > b.utilization_improvement_pct ||
                (s.utilization_improvement_pct == b.utilization_improvement_pct &&
                 s.box_reduction_pct > b.box_reduction_pct)) {
                best = r;
            }
        }
        return best;
    };
    if (auto best = pick(true)) return {*best, scores[*best].params, false};
    const auto best = *pick(false);
    return {best, scores[best].params, true};
}

inline ModelChoice select_model(std::span<const GridResult> results) {
    std::vector<GridScore> scores;
    scores.reserve(results.size());
    for (const auto& r : results) scores.push_back({r.params, r.box_reduction_pct, r.utilization_improvement_pct});
    return select_model(std::span<const GridScore>(scores));
}

struct FinalModel {
    WeightVector      weights;
    Selection<double> selection;
};

/// Re-estimates effective volumes on the merged corpus and solves for k boxes
/// with the chosen parameters.
inline FinalModel finalize(std::span<const Order> merged, const CandidatePool& pool, const TuningParams& params,
                           std::size_t k, std::size_t threads = 1) {
    FinalModel model;
    const auto ev   = estimate_effective_volumes(merged, pool, threads);
    model.selection = design_assortment(pool, ev, params, k, &model.weights);
    return model;
}

}  // namespace boxdesign
