#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlvis/geometry.hpp"
#include "nlvis/random.hpp"

using namespace nlvis;

namespace {

const DomainSpec kAnnulus = make_annulus(1.0 / 3.0, 1.0);

Vec2 sample_in(const DomainSpec& d, SplitMix64& rng, Box b) {
    for (;;) {
        Vec2 x{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
        if (contains(d, x)) return x;
    }
}

}  // namespace

TEST(Contains, Examples) {
    EXPECT_TRUE(contains(make_box({0, 0}, {1, 1}), {0.5, 0.5}));
    EXPECT_FALSE(contains(kAnnulus, {0, 0}));
    EXPECT_TRUE(contains(make_dumbbell(DumbbellVariant::Straight), {0, 0.5}));
}

TEST(Contains, OpenSets) {
    EXPECT_FALSE(contains(make_box({0, 0}, {1, 1}), {1.0, 0.5}));
    EXPECT_FALSE(contains(make_ball({0, 0}, 1.0), {1.0, 0.0}));
    EXPECT_FALSE(contains(kAnnulus, {1.0 / 3.0, 0.0}));
}

TEST(SegmentInside, AnnulusExamples) {
    EXPECT_TRUE(segment_inside(kAnnulus, {0.6, 0}, {0, 0.6}));
    EXPECT_FALSE(segment_inside(kAnnulus, {0.6, 0}, {-0.6, 0}));
}

TEST(SegmentInside, Dumbbells) {
    EXPECT_TRUE(segment_inside(make_dumbbell(DumbbellVariant::Straight), {-2, 0}, {2, 0}));
    EXPECT_FALSE(segment_inside(make_dumbbell(DumbbellVariant::Curved), {-2, 0}, {2, 0}));
}

TEST(SegmentInside, EndpointOutsideIsError) {
    EXPECT_THROW(segment_inside(kAnnulus, {0, 0}, {0.6, 0}), std::invalid_argument);
}

TEST(SegmentInside, SymmetryOnSamples) {
    SplitMix64 rng(11);
    const DomainSpec doms[] = {kAnnulus, clip_ball(make_dumbbell(DumbbellVariant::Curved), {0, 0}, 6),
                               clip_ball(make_dumbbell(DumbbellVariant::Straight), {0, 0}, 6)};
    for (const auto& d : doms) {
        Box b = d.bounds();
        for (int k = 0; k < 2000; ++k) {
            Vec2 x = sample_in(d, rng, b), y = sample_in(d, rng, b);
            ASSERT_EQ(segment_inside(d, x, y), segment_inside(d, y, x));
        }
    }
}

TEST(SegmentInside, ConvexSinglePrimitive) {
    SplitMix64 rng(12);
    const DomainSpec doms[] = {make_box({-1, -2}, {3, 1}), make_ball({1, 1}, 2.0)};
    for (const auto& d : doms) {
        Box b = d.bounds();
        for (int k = 0; k < 2000; ++k) ASSERT_TRUE(segment_inside(d, sample_in(d, rng, b), sample_in(d, rng, b)));
    }
}

TEST(SegmentInside, MonotoneInPrimitiveSet) {
    DomainSpec a;
    a.primitives = {Box{{0, 0}, {2, 1}}};
    DomainSpec b = a;
    b.primitives.push_back(Box{{0, 0}, {1, 3}});
    SplitMix64 rng(13);
    for (int k = 0; k < 2000; ++k) {
        Vec2 x = sample_in(a, rng, a.bounds()), y = sample_in(a, rng, a.bounds());
        if (segment_inside(a, x, y)) ASSERT_TRUE(segment_inside(b, x, y));
    }
}

TEST(SegmentInside, CurvedSeparation) {
    DomainSpec d = make_dumbbell(DumbbellVariant::Curved);
    SplitMix64 rng(14);
    for (int k = 0; k < 5000; ++k) {
        Vec2 x{rng.uniform(-20.0, -1.0 - 1e-6), rng.uniform(-20.0, 20.0)};
        Vec2 y{rng.uniform(1.0 + 1e-6, 20.0), rng.uniform(-20.0, 20.0)};
        ASSERT_FALSE(segment_inside(d, x, y)) << x.x << ' ' << x.y << " -> " << y.x << ' ' << y.y;
    }
}

TEST(SegmentIntervals, TubeMatchesSampling) {
    ParabolicTube tube{2.0, 1.0};
    SplitMix64 rng(15);
    for (int k = 0; k < 300; ++k) {
        Vec2 a{rng.uniform(-2, 2), rng.uniform(-3, 3)}, b{rng.uniform(-2, 2), rng.uniform(-3, 3)};
        IntervalSet iv = segment_intervals(tube, a, b);
        for (int j = 0; j <= 200; ++j) {
            double t = j / 200.0;
            bool in_iv = false;
            for (int c = 0; c < iv.count; ++c) in_iv = in_iv || (t >= iv.items[c][0] && t <= iv.items[c][1]);
            Vec2 x = a + (b - a) * t;
            double g = std::abs(x.y - 2.0 * (x.x * x.x - 1.0));
            if (g < 1.0 - 1e-7) ASSERT_TRUE(in_iv) << "t=" << t;
            if (g > 1.0 + 1e-7) ASSERT_FALSE(in_iv) << "t=" << t;
        }
    }
}

TEST(BoundaryDistance, Examples) {
    EXPECT_DOUBLE_EQ(boundary_distance(make_box({0, 0}, {1, 1}), {0.5, 0.5}), 0.5);
    EXPECT_DOUBLE_EQ(boundary_distance(make_ball({0, 0}, 1.0), {0.25, 0}), 0.75);
    EXPECT_DOUBLE_EQ(boundary_distance(make_dumbbell(DumbbellVariant::Straight), {0, 0}), 1.0);
    EXPECT_NEAR(boundary_distance(kAnnulus, {0.5, 0}), 1.0 / 6.0, 1e-15);
}

TEST(BoundaryDistance, OutsideIsError) {
    EXPECT_THROW(boundary_distance(kAnnulus, {0, 0}), std::invalid_argument);
}

TEST(BoundaryDistance, InscribedBallInside) {
    const double tau = kGeomTol;
    SplitMix64 rng(16);
    const DomainSpec doms[] = {kAnnulus, clip_ball(make_dumbbell(DumbbellVariant::Curved), {0, 0}, 5),
                               make_box({0, 0}, {2, 1})};
    for (const auto& d : doms) {
        Box b = d.bounds();
        for (int k = 0; k < 20; ++k) {
            Vec2 x = sample_in(d, rng, b);
            double r = boundary_distance(d, x) * (1.0 - tau);
            for (int j = 0; j < 1000; ++j) {
                double rr = r * std::sqrt(rng.uniform()), th = rng.uniform(0.0, 2.0 * std::numbers::pi);
                ASSERT_TRUE(contains(d, x + Vec2{rr * std::cos(th), rr * std::sin(th)}));
            }
        }
    }
}

TEST(ParabolaDistance, AgainstBruteForce) {
    ParabolicTube tube{2.0, 1.0};
    SplitMix64 rng(17);
    for (int k = 0; k < 200; ++k) {
        Vec2 x{rng.uniform(-1.5, 1.5), 0.0};
        x.y = 2.0 * (x.x * x.x - 1.0) + rng.uniform(-0.99, 0.99);
        double best = INFINITY;
        for (int j = 0; j <= 400000; ++j) {
            double t = -3.0 + 6.0 * j / 400000.0;
            double fy = 2.0 * (t * t - 1.0);
            best = std::min({best, std::hypot(x.x - t, x.y - fy - 1.0), std::hypot(x.x - t, x.y - fy + 1.0)});
        }
        ASSERT_NEAR(signed_distance(tube, x), best, 1e-4);
    }
}

TEST(Dumbbell, Metadata) {
    DomainSpec s = make_dumbbell(DumbbellVariant::Straight);
    ASSERT_TRUE(s.dumbbell);
    EXPECT_TRUE(contains(s, {-5, 0}));
    EXPECT_TRUE(s.dumbbell->gamma_tilde.has_value());
    EXPECT_EQ(s.dumbbell->anchor, (Vec2{0, 0}));
    EXPECT_DOUBLE_EQ(s.dumbbell->gamma_star.lo.x, -1.0);
    EXPECT_DOUBLE_EQ(s.dumbbell->gamma_star.hi.x, 1.0);
    EXPECT_DOUBLE_EQ(s.dumbbell->gamma_star.lo.y, -3.0);
    EXPECT_DOUBLE_EQ(s.dumbbell->gamma_star.hi.y, 1.0);
    DomainSpec c = make_dumbbell(DumbbellVariant::Curved);
    EXPECT_FALSE(c.dumbbell->gamma_tilde.has_value());
}

TEST(ClipBall, Examples) {
    DomainSpec half;
    half.primitives = {make_halfspace({-1, 0}, -1.0)};  // x1 > 1
    DomainSpec d = clip_ball(half, {0, 0}, 4.0);
    EXPECT_TRUE(contains(d, {2, 0}));
    EXPECT_FALSE(contains(d, {5, 0}));
}

TEST(ClipBall, StraightDumbbellArea) {
    const double R = 16.0;
    DomainSpec d = clip_ball(make_dumbbell(DumbbellVariant::Straight), {0, 0}, R);
    SplitMix64 rng(derive_seed(1, "geometry-MC", 0));
    const int n = 400000;
    int hits = 0;
    for (int k = 0; k < n; ++k) hits += contains(d, {rng.uniform(-R, R), rng.uniform(-R, R)});
    double mc = 4.0 * R * R * hits / n;
    // Ball minus the slab |x1| <= 1, plus the 2 x 2 corridor.
    double slab = 2.0 * (R * R * std::asin(1.0 / R) + std::sqrt(R * R - 1.0));
    double exact = std::numbers::pi * R * R - slab + 4.0;
    EXPECT_NEAR(mc, exact, 0.01 * exact);
}

TEST(DomainNames, ParseAndErrors) {
    EXPECT_EQ(domain_from_name("annulus:0.25,1").holes.size(), 1u);
    EXPECT_TRUE(contains(domain_from_name("box:0,2"), {1.5, 1.5}));
    EXPECT_THROW(domain_from_name("annulus:1"), std::invalid_argument);
    EXPECT_THROW(domain_from_name("hexagon"), std::invalid_argument);
}

TEST(DomainText, RoundTrip) {
    for (const char* name : {"straight-dumbbell", "curved-dumbbell", "annulus:0.3333333333333333,1", "box:0,1"}) {
        DomainSpec d = domain_from_name(name);
        std::string text = serialize_domain(d);
        DomainSpec e = parse_domain(text);
        EXPECT_EQ(serialize_domain(e), text);
        SplitMix64 rng(18);
        for (int k = 0; k < 500; ++k) {
            Vec2 x{rng.uniform(-4, 4), rng.uniform(-4, 4)};
            ASSERT_EQ(contains(d, x), contains(e, x));
        }
    }
    EXPECT_THROW(parse_domain("domain x\nprimitive cone 1 2\n"), std::invalid_argument);
}

TEST(ConditionA, StraightPasses) {
    auto rep = check_condition_A(make_dumbbell(DumbbellVariant::Straight), {8, 16, 32}, 20000, 3);
    EXPECT_TRUE(rep.pass);
    EXPECT_TRUE(rep.gamma_tilde_present);
    EXPECT_TRUE(rep.gamma_tilde_stable);
    for (const auto& row : rep.rows) {
        EXPECT_GE(row.minus_ratio, rep.band_lo);
        EXPECT_LE(row.minus_ratio, rep.band_hi);
    }
}

TEST(ConditionA, CurvedPassesWithoutSubCorridor) {
    auto rep = check_condition_A(make_dumbbell(DumbbellVariant::Curved), {8, 16, 32}, 20000, 3);
    EXPECT_TRUE(rep.pass);
    EXPECT_FALSE(rep.gamma_tilde_present);
}

TEST(ConditionA, MissingMetadataIsError) {
    DomainSpec d;
    d.primitives = {make_halfspace({1, 0}, -1.0), make_halfspace({-1, 0}, -1.0)};
    EXPECT_THROW(check_condition_A(d, {8, 16}, 1000, 1), std::invalid_argument);
}
