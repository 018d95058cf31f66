// Library walk-through: pack a few orders, score the candidate pool, and pick a small assortment.
//
//   ./build/demo/quickstart

#include "boxdesign/boxdesign.hpp"

#include <cstdio>
#include <string>
#include <vector>

using namespace boxdesign;

int main() {
    // Three products, each ordered on its own a number of times, plus one mixed order.
    const Item book("book", {24, 16, 4}, 0.6);
    const Item mug("mug", {12, 8, 8}, 0.4);
    const Item lamp("lamp", {36, 20, 20}, 2.5);

    std::vector<Order> orders;
    for (int o = 0; o < 30; ++o) orders.emplace_back("book-" + std::to_string(o), std::vector<OrderLine>{{book, 1}});
    for (int o = 0; o < 20; ++o) orders.emplace_back("mug-" + std::to_string(o), std::vector<OrderLine>{{mug, 2}});
    for (int o = 0; o < 10; ++o) orders.emplace_back("lamp-" + std::to_string(o), std::vector<OrderLine>{{lamp, 1}});
    orders.emplace_back("mixed", std::vector<OrderLine>{{book, 2}, {mug, 1}});

    // Every box on a 4..40 grid is a candidate.
    const auto pool = generate_candidate_pool(4, 40, 4, 20.0);
    std::printf("candidate pool: %zu boxes\n", pool.size());

    // Effective volume: how much product each candidate would carry if every size were stocked.
    const auto         ev     = estimate_effective_volumes(orders, pool);
    const TuningParams params{0.5, 2, 1};
    WeightVector       weights;
    const auto         selection = design_assortment(pool, ev, params, 3, &weights);

    std::printf("chosen boxes (greedy order):\n");
    for (std::size_t step = 0; step < selection.rows.size(); ++step) {
        const auto& box = pool[selection.rows[step]];
        std::printf("  %-10s  w=%-9.3f objective after pick %.3f\n", box.id().c_str(), weights.w[selection.rows[step]],
                    selection.history[step]);
    }

    // Compare against a one-size-fits-all assortment on the same orders.
    const auto                 chosen = selected_boxes(pool, selection);
    const std::vector<BoxType> baseline{BoxType("cube-40", {40, 40, 40}, 20.0), BoxType("cube-24", {24, 24, 24}, 20.0),
                                        BoxType("cube-16", {16, 16, 16}, 20.0)};
    const auto designed = evaluate_assortment(chosen, orders);
    const auto base     = evaluate_assortment(baseline, orders);
    const auto cmp      = compare(designed, base);
    std::printf("utilization: designed %.3f, baseline %.3f (%+.1f%% relative)\n", designed.utilization,
                base.utilization, cmp.utilization_improvement_pct);
    std::printf("boxes used:  designed %zu, baseline %zu (%.1f%% fewer)\n", designed.total_boxes_used,
                base.total_boxes_used, cmp.box_reduction_pct);
    return 0;
}
