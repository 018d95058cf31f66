#pragma once

#include "boxdesign/matrix.hpp"
#include "boxdesign/model.hpp"
#include "boxdesign/packer.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace boxdesign {

// rho discounts large boxes in the weights; delta and alpha shape the substitution costs.
struct TuningParams {
    double rho   = 0.5;
    double delta = 0.0;
    double alpha = 0.0;

    void validate() const {
        if (!(rho > 0.0) || !std::isfinite(rho)) throw ValidationError("rho must be a finite value > 0");
        if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be a finite value >= 0");
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be a finite value >= 0");
    }

    friend bool operator==(const TuningParams&, const TuningParams&) = default;
};

struct WeightVector {
    std::vector<double> ev;  // effective volume per box type
    std::vector<double> w;   // ev / volume^rho
};

// Rows are substitutes i, columns are the substituted boxes j.
using CostMatrix = Matrix<double>;

/// Effective volume per pool box from already packed results: the item volume
/// held by every instance of box j. Results must come from packing with
/// `pool.boxes()` as the assortment.
inline std::vector<double> effective_volumes_from(std::span<const PackingResult> results, const CandidatePool& pool) {
    std::vector<double> ev(pool.size(), 0.0);
    for (const auto& result : results) {
        for (const auto& instance : result.boxes) ev[instance.box_index] += instance.packed_volume(result.items);
    }
    return ev;
}

/// Packs every order with the whole pool available and sums, per box type,
/// the volume of the items that ended up in it. Unpacked items count nowhere.
inline std::vector<double> estimate_effective_volumes(std::span<const Order> orders,
                                                      const CandidatePool&   pool,
                                                      std::size_t            threads = 1) {
    if (orders.empty()) throw ValidationError("estimate_effective_volumes: empty order corpus");
    const auto results = pack_corpus(orders, pool.boxes(), threads);
    return effective_volumes_from(results, pool);
}

inline WeightVector compute_weights(std::vector<double> ev, const CandidatePool& pool, double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ValidationError("compute_weights: rho must be > 0");
    if (ev.size() != pool.size()) throw ValidationError("compute_weights: ev length does not match pool size");
    WeightVector weights{std::move(ev), std::vector<double>(pool.size())};
    for (std::size_t j = 0; j < pool.size(); ++j) {
        if (weights.ev[j] < 0.0) throw ValidationError("compute_weights: negative effective volume");
        weights.w[j] = weights.ev[j] / std::pow(pool[j].volume(), rho);
    }
    return weights;
}

// i in D_j: box i is at least as large as box j along every canonical axis.
inline bool dominates(const BoxType& i, const BoxType& j) {
    return i.length() >= j.length() && i.depth() >= j.depth() && i.height() >= j.height();
}

// i in S_j: every canonical axis of i lies within delta of j's.
inline bool within_delta(const BoxType& i, const BoxType& j, double delta) {
    auto near = [delta](double a, double b) { return a >= b - delta && a <= b + delta; };
    return near(i.length(), j.length()) && near(i.depth(), j.depth()) && near(i.height(), j.height());
}

// i in T_j: box i is strictly smaller than box j along every canonical axis.
inline bool strictly_smaller(const BoxType& i, const BoxType& j) {
    return i.length() < j.length() && i.depth() < j.depth() && i.height() < j.height();
}

namespace detail {

template <typename Pred>
std::vector<std::size_t> collect(const CandidatePool& pool, Pred pred) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pred(pool[i])) out.push_back(i);
    }
    return out;
}

}  // namespace detail

inline std::vector<std::size_t> dominating_set(std::size_t j, const CandidatePool& pool) {
    const BoxType& target = pool.at(j);
    return detail::collect(pool, [&](const BoxType& box) { return dominates(box, target); });
}

inline std::vector<std::size_t> neighbor_set(std::size_t j, const CandidatePool& pool, double delta) {
    const BoxType& target = pool.at(j);
    return detail::collect(pool, [&](const BoxType& box) { return within_delta(box, target, delta); });
}

inline std::vector<std::size_t> strictly_smaller_set(std::size_t j, const CandidatePool& pool) {
    const BoxType& target = pool.at(j);
    return detail::collect(pool, [&](const BoxType& box) { return strictly_smaller(box, target); });
}

/// Cost of substituting box j by box i. Cases are checked in order:
///   i in D_j          -> -vol_j / vol_i
///   i in S_j \ T_j    -> -r / (ceil(r) + alpha), r = vol_j / vol_i
///   otherwise         -> 0
/// Every value lies in [-1, 0] and the diagonal is exactly -1.
inline double substitution_cost(const BoxType& i, const BoxType& j, double delta, double alpha) {
    const double ratio = j.volume() / i.volume();
    if (dominates(i, j)) return -ratio;
    if (within_delta(i, j, delta) && !strictly_smaller(i, j)) return -ratio / (std::ceil(ratio) + alpha);
    return 0.0;
}

inline double substitution_cost(std::size_t i, std::size_t j, const CandidatePool& pool, double delta, double alpha) {
    return substitution_cost(pool.at(i), pool.at(j), delta, alpha);
}

inline CostMatrix build_cost_matrix(const CandidatePool& pool, double delta, double alpha) {
    if (!(delta >= 0.0) || !(alpha >= 0.0)) throw ValidationError("build_cost_matrix: delta and alpha must be >= 0");
    const std::size_t n = pool.size();
    CostMatrix        cost(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const BoxType& substitute = pool[i];
        auto           row        = cost.row(i);
        for (std::size_t j = 0; j < n; ++j) row[j] = substitution_cost(substitute, pool[j], delta, alpha);
    }
    return cost;
}

}  // namespace boxdesign
