#include "boxdesign/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

namespace boxdesign {
namespace {

TEST(Canonicalize, SortsDescending) {
    EXPECT_EQ(canonicalize({2, 5, 3}), (Dims{5, 3, 2}));
    EXPECT_EQ(canonicalize({4, 4, 4}), (Dims{4, 4, 4}));
}

TEST(Canonicalize, RejectsNonPositiveAndNonFinite) {
    try {
        canonicalize({0, 1, 2});
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("non-positive dimension"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("length"), std::string::npos);
    }
    EXPECT_THROW(canonicalize({1, -2, 3}), ValidationError);
    EXPECT_THROW(canonicalize({1, 2, std::numeric_limits<double>::quiet_NaN()}), ValidationError);
    EXPECT_THROW(canonicalize({1, 2, std::numeric_limits<double>::infinity()}), ValidationError);
}

TEST(Canonicalize, IsAProjection) {
    std::mt19937_64                        rng(7);
    std::uniform_real_distribution<double> dist(0.1, 50.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::array<double, 3> raw{dist(rng), dist(rng), dist(rng)};
        const Dims once = canonicalize(raw);
        EXPECT_EQ(canonicalize(once.as_array()), once);

        auto shuffled = raw;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(BoxType("a", raw, 1.0), BoxType("a", shuffled, 1.0));
        EXPECT_EQ(Item("s", raw, 1.0), Item("s", shuffled, 1.0));
    }
}

TEST(BoxType, ValidatesWeight) {
    EXPECT_THROW(BoxType("b", {1, 1, 1}, 0.0), ValidationError);
    EXPECT_THROW(BoxType("b", {1, 1, 1}, -1.0), ValidationError);
    EXPECT_NO_THROW(BoxType("b", {1, 1, 1}, std::numeric_limits<double>::infinity()));
    const BoxType box("b", {2, 3, 4}, 5.0);
    EXPECT_DOUBLE_EQ(box.volume(), 24.0);
    EXPECT_EQ(box.length(), 4.0);
    EXPECT_EQ(box.height(), 2.0);
}

TEST(Item, RejectsBadWeight) {
    EXPECT_THROW(Item("s", {1, 1, 1}, 0.0), ValidationError);
    EXPECT_THROW(Item("s", {1, 1, 1}, std::numeric_limits<double>::infinity()), ValidationError);
}

TEST(Order, RequiresLinesAndPositiveQuantities) {
    const Item item("s", {1, 1, 1}, 1.0);
    EXPECT_THROW(Order("o", {}), ValidationError);
    EXPECT_THROW(Order("o", {OrderLine{item, 0}}), ValidationError);
    const Order order("o", {OrderLine{item, 3}, OrderLine{Item("t", {2, 1, 1}, 1.0), 1}});
    EXPECT_EQ(order.item_count(), 4u);
    EXPECT_EQ(order.expanded_items().size(), 4u);
    EXPECT_DOUBLE_EQ(order.total_volume(), 5.0);
}

TEST(CandidatePool, RejectsEmptyAndDuplicates) {
    EXPECT_THROW(CandidatePool({}), ValidationError);
    EXPECT_THROW(CandidatePool({BoxType("a", {1, 2, 3}, 1.0), BoxType("b", {3, 2, 1}, 1.0)}), ValidationError);
    // Same size, different weight limit: distinct boxes.
    EXPECT_NO_THROW(CandidatePool({BoxType("a", {1, 2, 3}, 1.0), BoxType("b", {3, 2, 1}, 2.0)}));
}

TEST(GenerateCandidatePool, SmallGrids) {
    const auto pool = generate_candidate_pool(1, 2, 1, 10);
    ASSERT_EQ(pool.size(), 4u);
    std::set<Dims> dims;
    for (const auto& box : pool) dims.insert(box.dims());
    EXPECT_EQ(dims, (std::set<Dims>{{1, 1, 1}, {2, 1, 1}, {2, 2, 1}, {2, 2, 2}}));
    EXPECT_EQ(generate_candidate_pool(1, 3, 1, 10).size(), 10u);
}

// Brute force over ordered triples, keeping the sorted ones.
std::size_t count_sorted_triples(std::size_t grid) {
    std::size_t count = 0;
    for (std::size_t a = 0; a < grid; ++a)
        for (std::size_t b = 0; b < grid; ++b)
            for (std::size_t c = 0; c < grid; ++c)
                if (a >= b && b >= c) ++count;
    return count;
}

TEST(GenerateCandidatePool, CountMatchesMultisetFormula) {
    EXPECT_EQ(count_sorted_triples(19), 1330u);
    const auto pool = generate_candidate_pool(1, 19, 1, 10);
    EXPECT_EQ(pool.size(), 1330u);
    for (std::size_t g = 1; g <= 8; ++g) {
        const auto sized = generate_candidate_pool(2.0, 2.0 + 0.5 * static_cast<double>(g - 1), 0.5, 1.0);
        EXPECT_EQ(sized.size(), count_sorted_triples(g));
        EXPECT_EQ(sized.size(), (g + 2) * (g + 1) * g / 6);
    }
}

TEST(GenerateCandidatePool, RejectsBadGrids) {
    EXPECT_THROW(generate_candidate_pool(0, 2, 1, 1), ValidationError);
    EXPECT_THROW(generate_candidate_pool(3, 2, 1, 1), ValidationError);
    EXPECT_THROW(generate_candidate_pool(1, 2, 0, 1), ValidationError);
    EXPECT_THROW(generate_candidate_pool(1, 2, 1, 0), ValidationError);
}

}  // namespace
}  // namespace boxdesign
