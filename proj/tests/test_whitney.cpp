#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nlvis/random.hpp"
#include "nlvis/whitney.hpp"

using namespace nlvis;

namespace {

std::size_t nearest_cube(const WhitneyDecomposition& dec, Vec2 x) {
    std::size_t best = 0;
    double bd = INFINITY;
    for (std::size_t k = 0; k < dec.cubes.size(); ++k) {
        double d = norm(dec.cubes[k].center(dec.dim) - x);
        if (d < bd) {
            bd = d;
            best = k;
        }
    }
    return best;
}

// Dyadic cube of the given level with lower corner index (ix, iy).
WhitneyCube cube(int level, std::int64_t ix, std::int64_t iy) {
    WhitneyCube q;
    q.level = level;
    q.ix = ix;
    q.iy = iy;
    q.side = std::ldexp(1.0, -level);
    q.lo = {static_cast<double>(ix) * q.side, static_cast<double>(iy) * q.side};
    return q;
}

}  // namespace

TEST(Decompose, UnitIntervalByHand) {
    auto dec = whitney_decompose(interval_region(0.0, 1.0), 6);
    auto has = [&](double lo, double side) {
        return std::any_of(dec.cubes.begin(), dec.cubes.end(),
                           [&](const WhitneyCube& q) { return q.lo.x == lo && q.side == side; });
    };
    EXPECT_TRUE(has(0.25, 0.25));
    EXPECT_TRUE(has(0.5, 0.25));
    auto inv = check_whitney_invariants(dec, interval_region(0.0, 1.0));
    EXPECT_EQ(inv.sandwich_violations, 0u);
    EXPECT_EQ(inv.overlap_violations, 0u);
}

TEST(Decompose, SquareInvariantsExhaustive) {
    WhitneyRegion r = whitney_region(make_box({0, 0}, {1, 1}));
    auto dec = whitney_decompose(r, 7);
    auto inv = check_whitney_invariants(dec, r);
    EXPECT_EQ(inv.sandwich_violations, 0u);
    EXPECT_EQ(inv.overlap_violations, 0u);
    for (std::size_t k = 0; k < dec.cubes.size(); ++k) {
        const auto& q = dec.cubes[k];
        // Exact distance from a square cube to the unit square boundary.
        double dist = std::min({q.lo.x, q.lo.y, 1.0 - q.lo.x - q.side, 1.0 - q.lo.y - q.side});
        ASSERT_GE(dist, q.diam(2) * (1 - 1e-12));
        ASSERT_LE(dist, 4 * q.diam(2) * (1 + 1e-12));
    }
}

TEST(Decompose, AnnulusResidual) {
    WhitneyRegion r = whitney_region(make_annulus(1.0 / 3.0, 1.0));
    auto dec = whitney_decompose(r, 8);
    EXPECT_LT(dec.residual_fraction(), 0.02);
    EXPECT_TRUE(check_whitney_invariants(dec, r).pass(0.02));
}

TEST(Decompose, CubesAreDisjoint) {
    auto dec = whitney_decompose(make_annulus(1.0 / 3.0, 1.0), 6);
    const auto& c = dec.cubes;
    for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = a + 1; b < c.size(); ++b) {
            double ox = std::min(c[a].lo.x + c[a].side, c[b].lo.x + c[b].side) - std::max(c[a].lo.x, c[b].lo.x);
            double oy = std::min(c[a].lo.y + c[a].side, c[b].lo.y + c[b].side) - std::max(c[a].lo.y, c[b].lo.y);
            ASSERT_FALSE(ox > 0 && oy > 0) << a << ' ' << b;
        }
}

TEST(LongDistance, Examples) {
    WhitneyCube q = cube(0, 0, 0);
    EXPECT_DOUBLE_EQ(long_distance(q, q), 2.0);
    EXPECT_DOUBLE_EQ(long_distance(cube(1, 0, 0), cube(1, 1, 0)), 1.0);
    EXPECT_DOUBLE_EQ(long_distance(cube(0, 0, 0), cube(0, 4, 0)), 5.0);
    EXPECT_DOUBLE_EQ(long_distance(cube(0, 0, 0), cube(0, 4, 0)), long_distance(cube(0, 4, 0), cube(0, 0, 0)));
    // Mixed levels: [0,1]^2 against [3,3.5]x[4,4.5], gaps 2 and 3.
    EXPECT_DOUBLE_EQ(long_distance(cube(0, 0, 0), cube(1, 6, 8)), 1.5 + std::hypot(2.0, 3.0));
}

TEST(Chains, TouchingPair) {
    auto dec = whitney_decompose(make_box({0, 0}, {1, 1}), 6);
    auto adj = cube_adjacency(dec);
    std::size_t q = 0;
    while (adj[q].empty()) ++q;
    std::size_t s = adj[q].front();
    for (double eps : {0.5, 0.25, 0.05}) {
        auto res = find_admissible_chain(dec, adj, q, s, eps);
        ASSERT_TRUE(res.chain.has_value());
        EXPECT_TRUE(validate_chain(dec, *res.chain));
        if (dec.cubes[q].side == dec.cubes[s].side) EXPECT_EQ(res.chain->cubes.size(), 2u);
    }
}

TEST(Chains, AnnulusOppositeCubes) {
    auto dec = whitney_decompose(make_annulus(1.0 / 3.0, 1.0), 7);
    auto adj = cube_adjacency(dec);
    std::size_t q = nearest_cube(dec, {2.0 / 3.0, 0.0}), s = nearest_cube(dec, {-2.0 / 3.0, 0.0});
    auto res = find_admissible_chain(dec, adj, q, s, 0.05);
    ASSERT_TRUE(res.chain.has_value());
    EXPECT_TRUE(validate_chain(dec, *res.chain));
}

TEST(Chains, RandomPairsRevalidateAndReverse) {
    auto dec = whitney_decompose(make_annulus(1.0 / 3.0, 1.0), 6);
    auto adj = cube_adjacency(dec);
    SplitMix64 rng(5);
    for (int k = 0; k < 30; ++k) {
        std::size_t q = rng.next() % dec.cubes.size(), s = rng.next() % dec.cubes.size();
        auto res = find_admissible_chain(dec, adj, q, s, 0.05);
        ASSERT_TRUE(res.chain.has_value()) << q << ' ' << s;
        ASSERT_TRUE(validate_chain(dec, *res.chain));
        Chain r = reversed(*res.chain);
        EXPECT_EQ(r.cubes.front(), s);
        EXPECT_EQ(r.central, res.chain->cubes.size() - 1 - res.chain->central);
        EXPECT_TRUE(validate_chain(dec, r));
    }
}

TEST(Chains, ThinNeckFails) {
    const double eta = 0.005;
    DomainSpec d;
    d.name = "kissing-balls";
    d.primitives = {Ball{{-(1.0 - eta), 0.0}, 1.0}, Ball{{1.0 - eta, 0.0}, 1.0}};
    auto dec = whitney_decompose(d, 8);
    auto adj = cube_adjacency(dec);
    std::size_t q = nearest_cube(dec, {-1.0, 0.0}), s = nearest_cube(dec, {1.0, 0.0});
    auto res = find_admissible_chain(dec, adj, q, s, 0.2);
    EXPECT_FALSE(res.chain.has_value());
}

TEST(WhitneySum, SquareStable) {
    auto st = whitney_sum_stability(whitney_region(make_box({0, 0}, {1, 1})), 5, 2.0, 3.0);
    EXPECT_TRUE(st.stable);
    EXPECT_TRUE(std::isfinite(st.coarse));
}

TEST(WhitneySum, IntervalStable) {
    auto st = whitney_sum_stability(interval_region(0.0, 1.0), 8, 1.0, 2.0);
    EXPECT_TRUE(st.stable);
}

TEST(WhitneySum, Preconditions) {
    auto dec = whitney_decompose(make_box({0, 0}, {1, 1}), 4);
    EXPECT_THROW(verify_whitney_sum(dec, 2.0, 2.0), std::invalid_argument);
    EXPECT_THROW(verify_whitney_sum(dec, 0.5, 3.0), std::invalid_argument);
}

TEST(ConditionB, Annulus) {
    auto rep = check_condition_B(make_annulus(1.0 / 3.0, 1.0), ConditionBOptions{});
    EXPECT_FALSE(rep.vacuous);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.max_length, 8u);
}

TEST(ConditionB, ConvexBoxIsVacuous) {
    ConditionBOptions opts;
    opts.max_draws = 2000;
    auto rep = check_condition_B(make_box({0, 0}, {1, 1}), opts);
    EXPECT_TRUE(rep.vacuous);
    EXPECT_TRUE(rep.pass);
}

TEST(ConditionB, ClippedStraightDumbbell) {
    ConditionBOptions opts;
    opts.max_comparison = 32.0;
    opts.window = 4.0;
    auto rep = check_condition_B(clip_ball(make_dumbbell(DumbbellVariant::Straight), {0, 0}, 8.0), opts);
    EXPECT_FALSE(rep.vacuous);
    EXPECT_TRUE(rep.pass);
}
