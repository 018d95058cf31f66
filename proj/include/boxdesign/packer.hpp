#pragma once

#include "boxdesign/model.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace boxdesign {

using Vec3 = std::array<double, 3>;

// The six axis-aligned permutations of (length, depth, height), in a fixed order.
inline constexpr std::array<std::array<int, 3>, 6> kOrientations{{
    {0, 1, 2},
    {0, 2, 1},
    {1, 0, 2},
    {1, 2, 0},
    {2, 0, 1},
    {2, 1, 0},
}};

inline Vec3 orient(const Dims& dims, std::size_t orientation) {
    const auto extents = dims.as_array();
    const auto& perm   = kOrientations[orientation];
    return {extents[perm[0]], extents[perm[1]], extents[perm[2]]};
}

// An item positioned inside one box instance. Coordinates are relative to the box corner,
// with x along the box length, y along its depth and z along its height.
struct Placement {
    std::size_t item_index   = 0;  // index into PackingResult::items
    std::size_t box_instance = 0;
    Vec3        origin{};
    Vec3        oriented_dims{};
};

// An axis-aligned empty region inside a box.
struct FreeSpace {
    Vec3 origin{};
    Vec3 dims{};

    [[nodiscard]] double volume() const noexcept { return dims[0] * dims[1] * dims[2]; }
};

enum class UnpackedReason { DimExceeded, WeightExceeded };

inline const char* to_string(UnpackedReason reason) {
    return reason == UnpackedReason::DimExceeded ? "DIM_EXCEEDED" : "WEIGHT_EXCEEDED";
}

struct UnpackedItem {
    std::size_t    item_index = 0;
    UnpackedReason reason     = UnpackedReason::DimExceeded;
};

struct BoxInstance {
    std::size_t            box_index = 0;  // position in the assortment passed to pack_order
    BoxType                box;
    std::vector<Placement> placements;

    [[nodiscard]] double packed_volume(std::span<const Item> items) const {
        double volume = 0.0;
        for (const auto& p : placements) volume += items[p.item_index].volume();
        return volume;
    }
    [[nodiscard]] double packed_weight(std::span<const Item> items) const {
        double weight = 0.0;
        for (const auto& p : placements) weight += items[p.item_index].weight();
        return weight;
    }
};

struct PackingResult {
    std::string               order_id;
    std::vector<Item>         items;  // the order's units, quantities unrolled
    std::vector<BoxInstance>  boxes;
    std::vector<UnpackedItem> unpacked;

    [[nodiscard]] double packed_volume() const {
        double volume = 0.0;
        for (const auto& instance : boxes) volume += instance.packed_volume(items);
        return volume;
    }
    [[nodiscard]] double box_volume() const {
        double volume = 0.0;
        for (const auto& instance : boxes) volume += instance.box.volume();
        return volume;
    }
};

namespace detail {

inline constexpr double kGeomEps = 1e-9;

inline bool fits_within(const Vec3& inner, const Vec3& outer) {
    return inner[0] <= outer[0] + kGeomEps && inner[1] <= outer[1] + kGeomEps && inner[2] <= outer[2] + kGeomEps;
}

// Both Dims are sorted descending, so componentwise comparison covers every rotation.
inline bool fits_some_orientation(const Dims& item, const Dims& box) {
    return item.length <= box.length + kGeomEps && item.depth <= box.depth + kGeomEps &&
           item.height <= box.height + kGeomEps;
}

inline bool overlaps(const Vec3& a_origin, const Vec3& a_dims, const Vec3& b_origin, const Vec3& b_dims) {
    for (int axis = 0; axis < 3; ++axis) {
        if (a_origin[axis] + a_dims[axis] <= b_origin[axis] + kGeomEps) return false;
        if (b_origin[axis] + b_dims[axis] <= a_origin[axis] + kGeomEps) return false;
    }
    return true;
}

inline bool contains(const FreeSpace& outer, const FreeSpace& inner) {
    for (int axis = 0; axis < 3; ++axis) {
        if (inner.origin[axis] < outer.origin[axis] - kGeomEps) return false;
        if (inner.origin[axis] + inner.dims[axis] > outer.origin[axis] + outer.dims[axis] + kGeomEps) return false;
    }
    return true;
}

// Replaces every free space that intersects the placed cuboid by its maximal
// sub-spaces outside the cuboid, then drops degenerate and dominated spaces.
inline void carve(std::vector<FreeSpace>& spaces, const Vec3& origin, const Vec3& dims) {
    std::vector<FreeSpace> next;
    next.reserve(spaces.size() + 6);
    for (const auto& space : spaces) {
        if (!overlaps(space.origin, space.dims, origin, dims)) {
            next.push_back(space);
            continue;
        }
        for (int axis = 0; axis < 3; ++axis) {
            const double space_lo = space.origin[axis];
            const double space_hi = space.origin[axis] + space.dims[axis];
            const double item_lo  = origin[axis];
            const double item_hi  = origin[axis] + dims[axis];
            if (item_lo > space_lo + kGeomEps) {
                FreeSpace below = space;
                below.dims[axis] = item_lo - space_lo;
                next.push_back(below);
            }
            if (item_hi < space_hi - kGeomEps) {
                FreeSpace beyond = space;
                beyond.origin[axis] = item_hi;
                beyond.dims[axis]   = space_hi - item_hi;
                next.push_back(beyond);
            }
        }
    }

    std::vector<bool> dropped(next.size(), false);
    for (std::size_t a = 0; a < next.size(); ++a) {
        if (next[a].dims[0] <= kGeomEps || next[a].dims[1] <= kGeomEps || next[a].dims[2] <= kGeomEps) {
            dropped[a] = true;
        }
    }
    for (std::size_t a = 0; a < next.size(); ++a) {
        if (dropped[a]) continue;
        for (std::size_t b = 0; b < next.size(); ++b) {
            if (a == b || dropped[b]) continue;
            // Of two identical spaces keep the first.
            if (contains(next[b], next[a]) && (!contains(next[a], next[b]) || b < a)) {
                dropped[a] = true;
                break;
            }
        }
    }
    spaces.clear();
    for (std::size_t a = 0; a < next.size(); ++a) {
        if (!dropped[a]) spaces.push_back(next[a]);
    }
}

// Order in which items enter a box: volume descending, then input position.
inline std::vector<std::size_t> by_volume_desc(std::span<const Item> items, std::span<const std::size_t> subset) {
    std::vector<std::size_t> order(subset.begin(), subset.end());
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return items[a].volume() > items[b].volume();
    });
    return order;
}

struct Candidate {
    std::size_t space       = 0;
    std::size_t orientation = 0;
    double      residual    = 0.0;
    Vec3        origin{};
};

inline bool better(const Candidate& lhs, const Candidate& rhs) {
    if (lhs.residual != rhs.residual) return lhs.residual < rhs.residual;
    if (lhs.origin != rhs.origin) return lhs.origin < rhs.origin;
    return lhs.orientation < rhs.orientation;
}

// Best-fit placement of `subset` (indices into items) into an empty box.
// Returns placements in the order the items were inserted, or nullopt.
inline std::optional<std::vector<Placement>> place_subset(std::span<const Item>        items,
                                                          std::span<const std::size_t> subset,
                                                          const BoxType&               box) {
    double total_weight = 0.0;
    double total_volume = 0.0;
    for (auto idx : subset) {
        total_weight += items[idx].weight();
        total_volume += items[idx].volume();
        if (!fits_some_orientation(items[idx].dims(), box.dims())) return std::nullopt;
    }
    if (total_weight > box.max_weight()) return std::nullopt;
    if (total_volume > box.volume() * (1.0 + kGeomEps)) return std::nullopt;

    std::vector<FreeSpace> spaces{FreeSpace{{0.0, 0.0, 0.0}, box.dims().as_array()}};
    std::vector<Placement> placements;
    placements.reserve(subset.size());

    for (auto idx : by_volume_desc(items, subset)) {
        const Item&              item = items[idx];
        std::optional<Candidate> best;
        for (std::size_t s = 0; s < spaces.size(); ++s) {
            for (std::size_t o = 0; o < kOrientations.size(); ++o) {
                const Vec3 oriented = orient(item.dims(), o);
                if (!fits_within(oriented, spaces[s].dims)) continue;
                Candidate candidate{s, o, spaces[s].volume() - item.volume(), spaces[s].origin};
                if (!best || better(candidate, *best)) best = candidate;
            }
        }
        if (!best) return std::nullopt;
        const Vec3 oriented = orient(item.dims(), best->orientation);
        placements.push_back(Placement{idx, 0, best->origin, oriented});
        carve(spaces, best->origin, oriented);
    }
    return placements;
}

}  // namespace detail

/// Tries to put every item into one box of the given type.
///
/// Items go in by decreasing volume; each lands at the corner of the free
/// space that leaves the least residual volume, over all six rotations.
/// Exact for a single item. For several items it can miss a feasible layout.
/// Placements carry item indices into `items` and box instance 0.
inline std::optional<std::vector<Placement>> fit_single_box(std::span<const Item> items, const BoxType& box) {
    std::vector<std::size_t> all(items.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return detail::place_subset(items, all, box);
}

/// Packs one order into box instances drawn from `assortment`.
///
/// Boxes are tried by ascending volume and the first one that holds all
/// remaining items wins. When none does, every box greedily admits items
/// (largest first); the box holding the most item volume (ties: smaller box,
/// then lower index) is closed and the rest of the order is packed the same way.
/// Items that fit no box on their own end up in `unpacked`.
inline PackingResult pack_order(const Order& order, std::span<const BoxType> assortment) {
    if (assortment.empty()) throw ValidationError("pack_order: assortment is empty");

    PackingResult result;
    result.order_id = order.order_id();
    result.items    = order.expanded_items();
    const auto& items = result.items;

    std::vector<std::size_t> box_order(assortment.size());
    std::iota(box_order.begin(), box_order.end(), std::size_t{0});
    std::stable_sort(box_order.begin(), box_order.end(), [&](std::size_t a, std::size_t b) {
        return assortment[a].volume() < assortment[b].volume();
    });

    std::vector<std::size_t> remaining;
    for (std::size_t idx = 0; idx < items.size(); ++idx) {
        bool fits_dims = false;
        bool fits_any  = false;
        for (const auto& box : assortment) {
            if (!detail::fits_some_orientation(items[idx].dims(), box.dims())) continue;
            fits_dims = true;
            if (items[idx].weight() <= box.max_weight()) {
                fits_any = true;
                break;
            }
        }
        if (fits_any) {
            remaining.push_back(idx);
        } else {
            result.unpacked.push_back(
                {idx, fits_dims ? UnpackedReason::WeightExceeded : UnpackedReason::DimExceeded});
        }
    }

    auto open_instance = [&](std::size_t box_index, std::vector<Placement> placements) {
        const std::size_t instance = result.boxes.size();
        for (auto& p : placements) p.box_instance = instance;
        result.boxes.push_back(BoxInstance{box_index, assortment[box_index], std::move(placements)});
    };

    while (!remaining.empty()) {
        bool closed = false;
        for (auto b : box_order) {
            if (auto placements = detail::place_subset(items, remaining, assortment[b])) {
                open_instance(b, std::move(*placements));
                remaining.clear();
                closed = true;
                break;
            }
        }
        if (closed) break;

        // Order split: find the box that swallows the largest share of what is left.
        const auto               ranked = detail::by_volume_desc(items, remaining);
        std::size_t              best_box = assortment.size();
        double                   best_volume = -1.0;
        std::vector<std::size_t> best_admitted;
        std::vector<Placement>   best_placements;
        for (auto b : box_order) {
            std::vector<std::size_t> admitted;
            std::vector<Placement>   placements;
            double                   admitted_volume = 0.0;
            for (auto idx : ranked) {
                admitted.push_back(idx);
                if (auto trial = detail::place_subset(items, admitted, assortment[b])) {
                    placements = std::move(*trial);
                    admitted_volume += items[idx].volume();
                } else {
                    admitted.pop_back();
                }
            }
            // box_order is ascending by volume, so strict > keeps the smaller box on ties.
            if (!admitted.empty() && admitted_volume > best_volume) {
                best_box        = b;
                best_volume     = admitted_volume;
                best_admitted   = std::move(admitted);
                best_placements = std::move(placements);
            }
        }
        // Every remaining item fits some box alone, so some box admits at least one.
        open_instance(best_box, std::move(best_placements));
        std::vector<std::size_t> rest;
        for (auto idx : remaining) {
            if (std::find(best_admitted.begin(), best_admitted.end(), idx) == best_admitted.end()) rest.push_back(idx);
        }
        remaining = std::move(rest);
    }
    return result;
}

/// Packed item volume over used box volume for one order.
inline double utilization(const PackingResult& result) {
    const double box_volume = result.box_volume();
    if (result.boxes.empty() || box_volume <= 0.0) {
        throw UndefinedMetricError("utilization: order '" + result.order_id + "' uses no boxes");
    }
    return result.packed_volume() / box_volume;
}

/// Packs a corpus, one result per order in input order. Orders are spread over
/// `threads` workers; the output does not depend on the thread count.
inline std::vector<PackingResult> pack_corpus(std::span<const Order>   orders,
                                              std::span<const BoxType> assortment,
                                              std::size_t              threads = 1) {
    std::vector<PackingResult> results(orders.size());
    threads = std::max<std::size_t>(1, std::min(threads, orders.size()));
    if (threads == 1) {
        for (std::size_t o = 0; o < orders.size(); ++o) results[o] = pack_order(orders[o], assortment);
        return results;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (std::size_t o = t; o < orders.size(); o += threads) results[o] = pack_order(orders[o], assortment);
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

/// Checks the geometric and bookkeeping invariants of a packing and returns one
/// message per violation: overlap, containment, weight, conservation.
inline std::vector<std::string> verify_packing(const PackingResult& result, const Order& order) {
    std::vector<std::string> problems;
    const auto expected = order.expanded_items();
    if (expected != result.items) problems.push_back("item list differs from the order");

    std::vector<int> seen(result.items.size(), 0);
    for (std::size_t b = 0; b < result.boxes.size(); ++b) {
        const auto& instance = result.boxes[b];
        const Vec3  box_dims = instance.box.dims().as_array();
        double      weight   = 0.0;
        for (std::size_t p = 0; p < instance.placements.size(); ++p) {
            const auto& placement = instance.placements[p];
            if (placement.item_index >= result.items.size()) {
                problems.push_back("placement references unknown item");
                continue;
            }
            ++seen[placement.item_index];
            const Item& item = result.items[placement.item_index];
            weight += item.weight();
            if (placement.box_instance != b) problems.push_back("placement carries wrong box instance index");

            auto sorted = placement.oriented_dims;
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            if (sorted != item.dims().as_array()) problems.push_back("oriented dims are not a rotation of the item");

            for (int axis = 0; axis < 3; ++axis) {
                if (placement.origin[axis] < -detail::kGeomEps ||
                    placement.origin[axis] + placement.oriented_dims[axis] > box_dims[axis] + detail::kGeomEps) {
                    problems.push_back("item " + std::to_string(placement.item_index) + " sticks out of box instance " +
                                       std::to_string(b));
                    break;
                }
            }
            for (std::size_t q = p + 1; q < instance.placements.size(); ++q) {
                const auto& other = instance.placements[q];
                if (detail::overlaps(placement.origin, placement.oriented_dims, other.origin, other.oriented_dims)) {
                    problems.push_back("items " + std::to_string(placement.item_index) + " and " +
                                       std::to_string(other.item_index) + " overlap in box instance " +
                                       std::to_string(b));
                }
            }
        }
        if (weight > instance.box.max_weight()) {
            problems.push_back("box instance " + std::to_string(b) + " exceeds its weight limit");
        }
    }
    for (const auto& unpacked : result.unpacked) {
        if (unpacked.item_index < seen.size()) ++seen[unpacked.item_index];
    }
    for (std::size_t idx = 0; idx < seen.size(); ++idx) {
        if (seen[idx] != 1) {
            problems.push_back("item " + std::to_string(idx) + " accounted " + std::to_string(seen[idx]) + " times");
        }
    }
    return problems;
}

}  // namespace boxdesign
