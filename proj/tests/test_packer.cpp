#include "boxdesign/packer.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace boxdesign {
namespace {

using testing_support::random_order;
using testing_support::random_assortment;

// Exhaustive search over integer origins and all distinct rotations: can these
// integer-sized items be laid out in the box without overlap? Equal items are
// placed in increasing origin order to skip symmetric branches.
bool exhaustive_fits(const std::vector<std::array<int, 3>>& items, std::array<int, 3> box,
                     std::vector<std::array<int, 6>>& placed, std::size_t next = 0) {
    if (next == items.size()) return true;
    std::set<std::array<int, 3>> tried;
    for (const auto& perm : kOrientations) {
        const std::array<int, 3> d{items[next][perm[0]], items[next][perm[1]], items[next][perm[2]]};
        if (!tried.insert(d).second) continue;
        for (int x = 0; x + d[0] <= box[0]; ++x)
            for (int y = 0; y + d[1] <= box[1]; ++y)
                for (int z = 0; z + d[2] <= box[2]; ++z) {
                    if (next > 0 && items[next] == items[next - 1]) {
                        const auto& prev = placed.back();
                        if (std::array{x, y, z} <= std::array{prev[0], prev[1], prev[2]}) continue;
                    }
                    bool clash = false;
                    for (const auto& p : placed) {
                        if (x < p[0] + p[3] && p[0] < x + d[0] && y < p[1] + p[4] && p[1] < y + d[1] &&
                            z < p[2] + p[5] && p[2] < z + d[2]) {
                            clash = true;
                            break;
                        }
                    }
                    if (clash) continue;
                    placed.push_back({x, y, z, d[0], d[1], d[2]});
                    if (exhaustive_fits(items, box, placed, next + 1)) return true;
                    placed.pop_back();
                }
    }
    return false;
}

bool exhaustive_fits(const std::vector<std::array<int, 3>>& items, std::array<int, 3> box) {
    std::vector<std::array<int, 6>> placed;
    return exhaustive_fits(items, box, placed);
}

TEST(FitSingleBox, SingleItemAtOrigin) {
    const std::vector<Item> items{Item("a", {3, 2, 1}, 1.0)};
    const auto placements = fit_single_box(items, BoxType("b", {3, 2, 1}, std::numeric_limits<double>::infinity()));
    ASSERT_TRUE(placements);
    ASSERT_EQ(placements->size(), 1u);
    EXPECT_EQ((*placements)[0].origin, (Vec3{0, 0, 0}));
    EXPECT_EQ((*placements)[0].oriented_dims, (Vec3{3, 2, 1}));
}

TEST(FitSingleBox, RespectsWeight) {
    const std::vector<Item> items{Item("a", {1, 1, 1}, 3.0), Item("b", {1, 1, 1}, 3.0)};
    EXPECT_FALSE(fit_single_box(items, BoxType("b", {2, 2, 2}, 5.0)));
    EXPECT_TRUE(fit_single_box(items, BoxType("b", {2, 2, 2}, 6.0)));
}

TEST(FitSingleBox, FourTilesInAFlatBox) {
    ASSERT_TRUE(exhaustive_fits({{2, 2, 1}, {2, 2, 1}, {2, 2, 1}, {2, 2, 1}}, {4, 4, 1}));
    const std::vector<Item> items(4, Item("t", {2, 2, 1}, 1.0));
    const auto placements = fit_single_box(items, BoxType("flat", {4, 4, 1}, std::numeric_limits<double>::infinity()));
    ASSERT_TRUE(placements);
    std::set<std::pair<double, double>> corners;
    for (const auto& p : *placements) corners.insert({p.origin[0], p.origin[1]});
    EXPECT_EQ(corners, (std::set<std::pair<double, double>>{{0, 0}, {0, 2}, {2, 0}, {2, 2}}));
}

TEST(FitSingleBox, NeverClaimsAnInfeasibleLayout) {
    // Whenever the heuristic says yes, the exhaustive search must agree.
    std::mt19937_64                 rng(11);
    std::uniform_int_distribution<> side(1, 3);
    std::uniform_int_distribution<> count(2, 4);
    int                             agreed = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::array<int, 3>> raw;
        std::vector<Item>               items;
        const int                       n = count(rng);
        for (int i = 0; i < n; ++i) {
            std::array<int, 3> d{side(rng), side(rng), side(rng)};
            raw.push_back(d);
            items.emplace_back("i", std::array<double, 3>{double(d[0]), double(d[1]), double(d[2])}, 1.0);
        }
        const std::array<int, 3> box{side(rng) + 1, side(rng) + 1, side(rng)};
        const auto heuristic = fit_single_box(items, BoxType("b", {double(box[0]), double(box[1]), double(box[2])}, 100));
        if (heuristic) {
            EXPECT_TRUE(exhaustive_fits(raw, box));
            ++agreed;
        }
    }
    EXPECT_GT(agreed, 0);
}

TEST(PackOrder, ExactFit) {
    const Order                order("o1", {OrderLine{Item("s", {10, 8, 6}, 2.0), 1}});
    const std::vector<BoxType> assortment{BoxType("b", {10, 8, 6}, 5.0)};
    const auto                 result = pack_order(order, assortment);
    ASSERT_EQ(result.boxes.size(), 1u);
    EXPECT_TRUE(result.unpacked.empty());
    EXPECT_DOUBLE_EQ(utilization(result), 1.0);
    EXPECT_TRUE(verify_packing(result, order).empty());
}

TEST(PackOrder, ReportsOversizedItem) {
    const Order                order("o1", {OrderLine{Item("rod", {12, 1, 1}, 1.0), 1}});
    const std::vector<BoxType> assortment{BoxType("b", {10, 10, 10}, 100.0)};
    const auto                 result = pack_order(order, assortment);
    EXPECT_TRUE(result.boxes.empty());
    ASSERT_EQ(result.unpacked.size(), 1u);
    EXPECT_EQ(result.unpacked[0].reason, UnpackedReason::DimExceeded);
    EXPECT_STREQ(to_string(result.unpacked[0].reason), "DIM_EXCEEDED");
    EXPECT_THROW(utilization(result), UndefinedMetricError);
}

TEST(PackOrder, ReportsOverweightItem) {
    const Order                order("o1", {OrderLine{Item("anvil", {1, 1, 1}, 50.0), 1}, OrderLine{Item("s", {1, 1, 1}, 1.0), 1}});
    const std::vector<BoxType> assortment{BoxType("b", {2, 2, 2}, 10.0)};
    const auto                 result = pack_order(order, assortment);
    ASSERT_EQ(result.unpacked.size(), 1u);
    EXPECT_EQ(result.unpacked[0].reason, UnpackedReason::WeightExceeded);
    EXPECT_EQ(result.unpacked[0].item_index, 0u);
    EXPECT_EQ(result.boxes.size(), 1u);
    EXPECT_TRUE(verify_packing(result, order).empty());
}

TEST(PackOrder, SplitsNineCubesOverTwoBoxes) {
    // Volume caps one box at 8 cubes and 8 do fit, so the minimum over all
    // distributions of 9 cubes is 2 boxes.
    std::vector<std::array<int, 3>> eight(8, {1, 1, 1});
    ASSERT_TRUE(exhaustive_fits(eight, {2, 2, 2}));

    const Order                order("cubes", {OrderLine{Item("u", {1, 1, 1}, 1.0), 9}});
    const std::vector<BoxType> assortment{BoxType("b", {2, 2, 2}, 100.0)};
    const auto                 result = pack_order(order, assortment);
    ASSERT_EQ(result.boxes.size(), 2u);
    EXPECT_EQ(result.boxes[0].placements.size(), 8u);
    EXPECT_EQ(result.boxes[1].placements.size(), 1u);
    EXPECT_DOUBLE_EQ(utilization(result), 0.5625);
    EXPECT_TRUE(verify_packing(result, order).empty());
}

TEST(PackOrder, WeightForcesSplit) {
    const Order                order("heavy", {OrderLine{Item("u", {1, 1, 1}, 4.0), 4}});
    const std::vector<BoxType> assortment{BoxType("b", {2, 2, 2}, 10.0)};
    const auto                 result = pack_order(order, assortment);
    EXPECT_EQ(result.boxes.size(), 2u);
    EXPECT_TRUE(verify_packing(result, order).empty());
}

TEST(PackOrder, PrefersSmallestBoxThatHoldsEverything) {
    const Order                order("o", {OrderLine{Item("s", {2, 2, 1}, 1.0), 2}});
    const std::vector<BoxType> assortment{BoxType("big", {10, 10, 10}, 100), BoxType("snug", {2, 2, 2}, 100),
                                          BoxType("tiny", {2, 2, 1}, 100)};
    const auto result = pack_order(order, assortment);
    ASSERT_EQ(result.boxes.size(), 1u);
    EXPECT_EQ(result.boxes[0].box.id(), "snug");
    EXPECT_EQ(result.boxes[0].box_index, 1u);
}

TEST(PackOrder, UtilizationRatio) {
    const Order                order("o", {OrderLine{Item("s", {2, 2, 1}, 1.0), 1}});
    const std::vector<BoxType> assortment{BoxType("b", {5, 2, 1}, 10.0)};
    EXPECT_DOUBLE_EQ(utilization(pack_order(order, assortment)), 0.4);
}

TEST(PackOrder, RejectsEmptyAssortment) {
    const Order order("o", {OrderLine{Item("s", {1, 1, 1}, 1.0), 1}});
    EXPECT_THROW(pack_order(order, std::vector<BoxType>{}), ValidationError);
}

TEST(PackOrder, FeasibilityAndDeterminismOnRandomOrders) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const auto order      = random_order(rng, "o" + std::to_string(trial), 1, 8);
        const auto assortment = random_assortment(rng, 6);
        const auto result     = pack_order(order, assortment);
        const auto problems   = verify_packing(result, order);
        EXPECT_TRUE(problems.empty()) << problems.front();
        const auto again = pack_order(order, assortment);
        ASSERT_EQ(again.boxes.size(), result.boxes.size());
        for (std::size_t b = 0; b < result.boxes.size(); ++b) {
            EXPECT_EQ(again.boxes[b].box_index, result.boxes[b].box_index);
            ASSERT_EQ(again.boxes[b].placements.size(), result.boxes[b].placements.size());
            for (std::size_t p = 0; p < result.boxes[b].placements.size(); ++p) {
                EXPECT_EQ(again.boxes[b].placements[p].origin, result.boxes[b].placements[p].origin);
                EXPECT_EQ(again.boxes[b].placements[p].oriented_dims, result.boxes[b].placements[p].oriented_dims);
            }
        }
    }
}

TEST(PackOrder, UnpackedOnlyWhenNoBoxHoldsTheItemAlone) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto order      = random_order(rng, "o", 1, 6);
        const auto assortment = random_assortment(rng, 3);
        const auto result     = pack_order(order, assortment);
        for (const auto& u : result.unpacked) {
            const std::vector<Item> alone{result.items[u.item_index]};
            for (const auto& box : assortment) EXPECT_FALSE(fit_single_box(alone, box));
        }
    }
}

TEST(PackOrder, SingleItemUsesMinimumVolumeFeasibleBox) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const auto order      = random_order(rng, "o", 1, 1);
        const auto assortment = random_assortment(rng, 8);
        const auto result     = pack_order(order, assortment);
        const Item& item      = result.items[0];
        double      best      = std::numeric_limits<double>::infinity();
        for (const auto& box : assortment) {
            bool fits = false;
            for (std::size_t o = 0; o < 6; ++o) {
                const auto d = orient(item.dims(), o);
                fits = fits || (d[0] <= box.length() && d[1] <= box.depth() && d[2] <= box.height());
            }
            if (fits && item.weight() <= box.max_weight()) best = std::min(best, box.volume());
        }
        if (std::isinf(best)) {
            EXPECT_TRUE(result.boxes.empty());
        } else {
            ASSERT_EQ(result.boxes.size(), 1u);
            EXPECT_EQ(result.boxes[0].box.volume(), best);
        }
    }
}

TEST(PackOrder, AddingABoxTypeRarelyIncreasesBoxCount) {
    // The heuristic does not guarantee monotonicity; track it statistically.
    std::mt19937_64 rng(31);
    int             trials = 0, monotone = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto order = random_order(rng, "o", 2, 10);
        auto       base  = random_assortment(rng, 4);
        const auto extra = random_assortment(rng, 1)[0];
        const auto before = pack_order(order, base);
        base.push_back(extra);
        const auto after = pack_order(order, base);
        if (!before.unpacked.empty()) continue;
        ++trials;
        if (after.boxes.size() <= before.boxes.size()) ++monotone;
    }
    ASSERT_GT(trials, 100);
    EXPECT_GE(static_cast<double>(monotone) / trials, 0.95);
}

TEST(PackCorpus, ThreadCountDoesNotChangeResults) {
    std::mt19937_64    rng(3);
    std::vector<Order> orders;
    for (int o = 0; o < 60; ++o) orders.push_back(random_order(rng, "o" + std::to_string(o), 1, 6));
    const auto assortment = random_assortment(rng, 5);
    const auto serial     = pack_corpus(orders, assortment, 1);
    const auto parallel   = pack_corpus(orders, assortment, 4);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t o = 0; o < serial.size(); ++o) {
        EXPECT_EQ(serial[o].order_id, parallel[o].order_id);
        EXPECT_EQ(serial[o].boxes.size(), parallel[o].boxes.size());
        EXPECT_EQ(serial[o].packed_volume(), parallel[o].packed_volume());
    }
}

TEST(VerifyPacking, FlagsOverlapsAndOverweight) {
    const Order                order("o", {OrderLine{Item("u", {1, 1, 1}, 3.0), 2}});
    const std::vector<BoxType> assortment{BoxType("b", {2, 2, 2}, 10.0)};
    auto                       result = pack_order(order, assortment);
    ASSERT_TRUE(verify_packing(result, order).empty());
    result.boxes[0].placements[1].origin = result.boxes[0].placements[0].origin;
    EXPECT_FALSE(verify_packing(result, order).empty());

    auto heavy = pack_order(order, assortment);
    heavy.boxes[0].box = BoxType("b", {2, 2, 2}, 5.0);
    EXPECT_FALSE(verify_packing(heavy, order).empty());

    auto lost = pack_order(order, assortment);
    lost.boxes[0].placements.pop_back();
    EXPECT_FALSE(verify_packing(lost, order).empty());
}

}  // namespace
}  // namespace boxdesign
