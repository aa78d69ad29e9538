#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlvis/walker.hpp"

using namespace nlvis;

namespace {

Grid row_of_cells(int n) {
    std::vector<Cell> cells(n);
    for (int i = 0; i < n; ++i) {
        cells[i].ix = i;
        cells[i].center = {i + 0.5, 0.5};
        cells[i].measure = 1.0;
    }
    return grid_from_cells(cells, 1.0);
}

struct Dumbbell {
    explicit Dumbbell(DumbbellVariant v, double R = 8.0)
        : domain(make_dumbbell(v)),
          grid(build_grid(domain, domain.dumbbell->anchor, R, 0.5, 1)),
          chain(build_chain(grid, visibility_pairs(grid), KernelSpec::power(0.5, 2.0))) {}
    DomainSpec domain;
    Grid grid;
    ChainModel chain;
};

}  // namespace

TEST(Chain, TwoCellsAlternate) {
    Grid g = row_of_cells(2);
    auto c = build_chain(g, PairSet::all_visible(2), KernelSpec::constant());
    EXPECT_DOUBLE_EQ(c.probability(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(c.probability(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(c.probability(0, 0), 0.0);
    EXPECT_EQ(c.step(0, 0.999), 1u);
}

TEST(Chain, ProbabilitiesFollowKernelWeights) {
    Grid g = row_of_cells(3);
    auto k = KernelSpec::power(0.5, 2.0);
    auto c = build_chain(g, PairSet::all_visible(3), k);
    double w1 = eval_kernel(k, 1.0), w2 = eval_kernel(k, 2.0);
    EXPECT_NEAR(c.probability(0, 1), w1 / (w1 + w2), 1e-15);
    EXPECT_NEAR(c.probability(0, 2), w2 / (w1 + w2), 1e-15);
    EXPECT_NEAR(c.probability(1, 0), 0.5, 1e-15);
}

TEST(Chain, HiddenPairsAreNeverJumped) {
    Grid g = row_of_cells(3);
    PairSet p = PairSet::all_visible(3);
    p.set_visible(0, 2, false);
    auto c = build_chain(g, p, KernelSpec::constant());
    EXPECT_EQ(c.probability(0, 2), 0.0);
    EXPECT_EQ(c.probability(2, 0), 0.0);
    EXPECT_DOUBLE_EQ(c.probability(0, 1), 1.0);
}

TEST(Chain, CurvedDumbbellHasNoDirectJumps) {
    Dumbbell d(DumbbellVariant::Curved);
    const auto& cells = d.grid.cells;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = 0; j < cells.size(); ++j) {
            bool cross = (cells[i].tag == RegionTag::Minus && cells[j].tag == RegionTag::Plus) ||
                         (cells[i].tag == RegionTag::Plus && cells[j].tag == RegionTag::Minus);
            if (!cross) continue;
            ASSERT_EQ(d.chain.probability(i, j), 0.0) << i << ' ' << j;
            ++checked;
        }
    EXPECT_GT(checked, 0u);
}

TEST(Chain, ConvexBoxRowsArePositive) {
    Grid g = build_grid(make_box({0, 0}, {1, 1}), 0.125, 1);
    auto c = build_chain(g, visibility_pairs(g), KernelSpec::power(0.5, 2.0));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (i != j) ASSERT_GT(c.probability(i, j), 0.0);
}

TEST(Chain, DetailedBalanceAndRowSums) {
    Dumbbell d(DumbbellVariant::Straight);
    auto m = d.grid.measures();
    EXPECT_LE(d.chain.detailed_balance_error(m), 1e-12);
    EXPECT_LE(d.chain.max_row_sum_error(), 1e-12);
    Grid g = build_grid(make_annulus(1.0 / 3.0, 1.0), 1.0 / 8.0, 4);
    auto c = build_chain(g, visibility_pairs(g), KernelSpec::power(0.5, 2.0));
    EXPECT_LE(c.detailed_balance_error(g.measures()), 1e-12);
    EXPECT_LE(c.max_row_sum_error(), 1e-12);
}

TEST(Crossing, GeometricMean) {
    auto c = ChainModel::from_rows({{0.5, 0.5}, {0.0, 1.0}});
    std::vector<double> src{1.0, 0.0};
    std::vector<char> tgt{0, 1};
    auto st = mean_crossing_time(c, src, tgt, 20000, 1000, 11);
    EXPECT_EQ(st.censored, 0u);
    EXPECT_NEAR(st.mean, 2.0, 3 * st.ci95);
    EXPECT_NEAR(st.mean, 2.0, 0.05);
}

TEST(Crossing, BirthDeathExactMean) {
    // Hitting state 2 from 0: h1 = 1 + h0 / 2, h0 = 1 + h1, so h0 = 4.
    auto c = ChainModel::from_rows({{0.0, 1.0, 0.0}, {0.5, 0.0, 0.5}, {0.0, 0.0, 1.0}});
    std::vector<double> src{1.0, 0.0, 0.0};
    std::vector<char> tgt{0, 0, 1};
    auto st = mean_crossing_time(c, src, tgt, 20000, 10000, 12);
    EXPECT_NEAR(st.mean, 4.0, std::max(3 * st.ci95, 0.01));
    for (const auto& r : st.paths) EXPECT_EQ(r.steps % 2, 0u);
}

TEST(Crossing, StartInsideTarget) {
    auto c = ChainModel::from_rows({{0.5, 0.5}, {0.5, 0.5}});
    std::vector<double> src{0.0, 1.0};
    std::vector<char> tgt{0, 1};
    auto st = mean_crossing_time(c, src, tgt, 10, 10, 1);
    EXPECT_EQ(st.mean, 0.0);
    EXPECT_EQ(st.completed, 10u);
}

TEST(Crossing, SeedDeterminism) {
    Dumbbell d(DumbbellVariant::Straight);
    auto a = dumbbell_crossing_time(d.grid, d.chain, 200, 1000000, 7);
    auto b = dumbbell_crossing_time(d.grid, d.chain, 200, 1000000, 7);
    auto c = dumbbell_crossing_time(d.grid, d.chain, 200, 1000000, 8);
    ASSERT_EQ(a.paths.size(), b.paths.size());
    bool differs = false;
    for (std::size_t p = 0; p < a.paths.size(); ++p) {
        EXPECT_EQ(a.paths[p].steps, b.paths[p].steps);
        differs = differs || a.paths[p].steps != c.paths[p].steps;
    }
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_TRUE(differs);
}

TEST(Crossing, CurvedSlowerThanStraight) {
    Dumbbell c(DumbbellVariant::Curved), s(DumbbellVariant::Straight);
    auto tc = dumbbell_crossing_time(c.grid, c.chain, 300, 1000000, 3);
    auto ts = dumbbell_crossing_time(s.grid, s.chain, 300, 1000000, 3);
    EXPECT_EQ(tc.direct_transitions, 0u);
    EXPECT_GT(ts.direct_transitions, 0u);
    EXPECT_GT(tc.mean - tc.ci95, ts.mean + ts.ci95);
}

TEST(Crossing, Errors) {
    auto trap = ChainModel::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    std::vector<double> src{1.0, 0.0};
    std::vector<char> tgt{0, 1};
    EXPECT_THROW(mean_crossing_time(trap, src, tgt, 10, 50, 1), std::runtime_error);
    // Half the paths stall, which is above the 5% censoring limit.
    auto slow = ChainModel::from_rows({{0.999, 0.001}, {0.0, 1.0}});
    EXPECT_THROW(mean_crossing_time(slow, src, tgt, 100, 700, 1), std::runtime_error);
    EXPECT_THROW(mean_crossing_time(trap, src, tgt, 0, 50, 1), std::invalid_argument);
    std::vector<char> none{0, 0};
    EXPECT_THROW(mean_crossing_time(trap, src, none, 10, 50, 1), std::invalid_argument);
    EXPECT_THROW(crossing_scaling(DumbbellVariant::Straight, KernelSpec::power(0.5, 2.0), {8.0}, 10, 1),
                 std::invalid_argument);
}

TEST(Crossing, PathsCsv) {
    auto c = ChainModel::from_rows({{0.5, 0.5}, {0.0, 1.0}});
    std::vector<double> src{1.0, 0.0};
    std::vector<char> tgt{0, 1};
    auto st = mean_crossing_time(c, src, tgt, 3, 100, 2);
    std::ostringstream os;
    write_paths_csv(os, st);
    std::string s = os.str();
    EXPECT_EQ(s.rfind("path,steps,censored\n", 0), 0u);
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}
