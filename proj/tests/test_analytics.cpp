#include "boxdesign/analytics.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace boxdesign {
namespace {

using testing_support::random_order;
using testing_support::random_pool;

CandidatePool pool_of(std::vector<std::array<double, 3>> dims) {
    std::vector<BoxType> boxes;
    for (std::size_t b = 0; b < dims.size(); ++b) boxes.emplace_back("b" + std::to_string(b), dims[b], 100.0);
    return CandidatePool(std::move(boxes));
}

bool contains(const std::vector<std::size_t>& set, std::size_t i) {
    return std::find(set.begin(), set.end(), i) != set.end();
}

TEST(EffectiveVolume, SingleExactFit) {
    const auto               pool = pool_of({{10, 10, 10}, {3, 2, 1}, {4, 4, 4}});
    const std::vector<Order> orders{Order("o", {OrderLine{Item("s", {1, 2, 3}, 1.0), 1}})};
    const auto               ev = estimate_effective_volumes(orders, pool);
    EXPECT_EQ(ev, (std::vector<double>{0, 6, 0}));
}

TEST(EffectiveVolume, AttributesItemVolumeNotBoxVolume) {
    const auto               pool = pool_of({{8, 1, 1}, {10, 10, 10}});
    const std::vector<Order> orders{Order("a", {OrderLine{Item("s3", {3, 1, 1}, 1.0), 1}}),
                                    Order("b", {OrderLine{Item("s5", {5, 1, 1}, 1.0), 1}})};
    const auto ev = estimate_effective_volumes(orders, pool);
    EXPECT_EQ(ev, (std::vector<double>{8, 0}));
}

TEST(EffectiveVolume, EmptyCorpusIsAnError) {
    EXPECT_THROW(estimate_effective_volumes({}, pool_of({{1, 1, 1}})), ValidationError);
}

TEST(EffectiveVolume, ConservesPackedVolume) {
    std::mt19937_64 rng(17);
    for (int corpus = 0; corpus < 20; ++corpus) {
        const auto         pool = random_pool(rng, 30, 20);
        std::vector<Order> orders;
        for (int o = 0; o < 40; ++o) orders.push_back(random_order(rng, "o" + std::to_string(o), 1, 5));
        const auto results = pack_corpus(orders, pool.boxes());
        const auto ev      = effective_volumes_from(results, pool);
        double     packed  = 0.0;
        for (const auto& r : results) {
            for (const auto& instance : r.boxes)
                for (const auto& p : instance.placements) packed += r.items[p.item_index].volume();
        }
        double total = 0.0;
        for (double v : ev) total += v;
        EXPECT_NEAR(total, packed, 1e-9 * std::max(1.0, packed));
        EXPECT_EQ(ev, estimate_effective_volumes(orders, pool, 3));
    }
}

TEST(ComputeWeights, Examples) {
    const auto pool = pool_of({{4, 2, 2}, {3, 1, 1}});
    auto       w    = compute_weights({16, 3}, pool, 0.5);
    EXPECT_DOUBLE_EQ(w.w[0], 4.0);
    w = compute_weights({16, 3}, pool, 1.0);
    EXPECT_DOUBLE_EQ(w.w[0], 1.0);
    EXPECT_DOUBLE_EQ(w.w[1], 1.0);
    w = compute_weights({0, 0}, pool, 0.73);
    EXPECT_EQ(w.w, (std::vector<double>{0, 0}));
}

TEST(ComputeWeights, Validation) {
    const auto pool = pool_of({{1, 1, 1}});
    EXPECT_THROW(compute_weights({1}, pool, 0.0), ValidationError);
    EXPECT_THROW(compute_weights({1}, pool, -1.0), ValidationError);
    EXPECT_THROW(compute_weights({1, 2}, pool, 1.0), ValidationError);
}

TEST(ComputeWeights, LinearInEffectiveVolume) {
    std::mt19937_64                        rng(8);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    const auto                             pool = random_pool(rng, 25);
    std::vector<double>                    ev(pool.size()), scaled(pool.size());
    for (std::size_t j = 0; j < ev.size(); ++j) {
        ev[j]     = u(rng);
        scaled[j] = 4.0 * ev[j];
    }
    const auto a = compute_weights(ev, pool, 0.5);
    const auto b = compute_weights(scaled, pool, 0.5);
    for (std::size_t j = 0; j < ev.size(); ++j) EXPECT_DOUBLE_EQ(b.w[j], 4.0 * a.w[j]);
}

TEST(Sets, Membership) {
    const auto pool = pool_of({{4, 2, 2}, {2, 2, 2}, {4, 1, 1}, {3, 3, 3}, {4, 4, 4}, {4, 4, 3}});
    // j itself belongs to D_j and S_j, never to T_j.
    for (std::size_t j = 0; j < pool.size(); ++j) {
        EXPECT_TRUE(contains(dominating_set(j, pool), j));
        EXPECT_TRUE(contains(neighbor_set(j, pool, 0.0), j));
        EXPECT_FALSE(contains(strictly_smaller_set(j, pool), j));
    }
    EXPECT_TRUE(contains(dominating_set(1, pool), 0));
    EXPECT_FALSE(contains(dominating_set(1, pool), 2));
    EXPECT_TRUE(contains(neighbor_set(4, pool, 1.0), 3));
    EXPECT_TRUE(contains(strictly_smaller_set(4, pool), 3));
    EXPECT_EQ(neighbor_set(1, pool, 0.0), (std::vector<std::size_t>{1}));
}

TEST(SubstitutionCost, Examples) {
    const auto pool = pool_of({{4, 2, 2}, {2, 2, 2}, {3, 3, 3}, {4, 4, 4}, {4, 4, 3}});
    EXPECT_EQ(substitution_cost(1, 1, pool, 0, 0), -1.0);
    EXPECT_EQ(substitution_cost(0, 1, pool, 0, 0), -0.5);
    // (3,3,3) for (4,4,4): neighbour but strictly smaller, not dominating.
    EXPECT_EQ(substitution_cost(2, 3, pool, 1, 2), 0.0);
    // (4,4,3) for (4,4,4): r = 64/48, -(4/3) / (2 + 2) = -1/3.
    EXPECT_DOUBLE_EQ(substitution_cost(4, 3, pool, 1, 2), -1.0 / 3.0);
}

TEST(BuildCostMatrix, SmallPools) {
    const auto single = build_cost_matrix(pool_of({{3, 2, 1}}), 0, 0);
    EXPECT_EQ(single, CostMatrix(1, 1, -1.0));

    const auto nested = build_cost_matrix(pool_of({{1, 1, 1}, {2, 2, 2}}), 0, 0);
    EXPECT_EQ(nested(1, 0), -0.125);
    EXPECT_EQ(nested(0, 1), 0.0);
    EXPECT_EQ(nested(0, 0), -1.0);
    EXPECT_EQ(nested(1, 1), -1.0);
}

TEST(BuildCostMatrix, AlgebraicProperties) {
    std::mt19937_64                        rng(41);
    std::uniform_int_distribution<int>     size(1, 40);
    std::uniform_real_distribution<double> param(0.0, 4.0);
    for (int trial = 0; trial < 60; ++trial) {
        const auto   pool  = random_pool(rng, static_cast<std::size_t>(size(rng)), 8);
        const double delta = std::floor(param(rng));
        const double alpha = param(rng);
        const auto   cost  = build_cost_matrix(pool, delta, alpha);
        const auto   more  = build_cost_matrix(pool, delta, alpha + 1.0);
        for (std::size_t j = 0; j < pool.size(); ++j) {
            EXPECT_EQ(cost(j, j), -1.0);
            const auto s_narrow = neighbor_set(j, pool, delta);
            const auto s_wide   = neighbor_set(j, pool, delta + 1.0);
            for (auto i : s_narrow) EXPECT_TRUE(contains(s_wide, i));
            for (std::size_t i = 0; i < pool.size(); ++i) {
                EXPECT_LE(cost(i, j), 0.0);
                EXPECT_GE(cost(i, j), -1.0);
                if (dominates(pool[i], pool[j])) {
                    EXPECT_EQ(cost(i, j), -(pool[j].volume() / pool[i].volume()));
                } else if (cost(i, j) != 0.0) {
                    EXPECT_GE(std::abs(cost(i, j)), std::abs(more(i, j)));
                }
            }
        }
    }
}

}  // namespace
}  // namespace boxdesign
