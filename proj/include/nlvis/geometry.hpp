#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nlvis {

inline constexpr int kDim = 2;
inline constexpr double kGeomTol = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Primitives are open sets.

// {x : normal . x < offset}, normal of unit length.
struct HalfSpace {
    Vec2 normal;
    double offset = 0.0;
};

struct Ball {
    Vec2 center;
    double radius = 1.0;
};

struct Box {
    Vec2 lo;
    Vec2 hi;
};

// {x : |x2 - amplitude (x1^2 - 1)| < radius}. amplitude 0 is the straight tube.
struct ParabolicTube {
    double amplitude = 2.0;
    double radius = 1.0;
};

using Primitive = std::variant<HalfSpace, Ball, Box, ParabolicTube>;

HalfSpace make_halfspace(Vec2 normal, double offset);

// Up to two disjoint closed parameter intervals.
struct IntervalSet {
    std::array<std::array<double, 2>, 2> items{};
    int count = 0;

    void add(double lo, double hi) { items[count++] = {lo, hi}; }
};

bool inside(const Primitive& k, Vec2 x);
// Positive inside, negative outside; magnitude is the distance to the boundary.
double signed_distance(const Primitive& k, Vec2 x);
// {t in [0,1] : a + t (b - a) in closure(k)}.
IntervalSet segment_intervals(const Primitive& k, Vec2 a, Vec2 b);
// Axis-aligned bounds; infinite components for unbounded primitives.
Box primitive_bounds(const Primitive& k);

enum class DumbbellVariant { Straight, Curved };

struct DumbbellMeta {
    int minus = -1;     // primitive index of D-
    int corridor = -1;  // primitive index of the tube
    int plus = -1;      // primitive index of D+
    Box gamma_star;     // bounding box of the corridor remainder
    std::optional<Primitive> gamma_tilde;
    Vec2 anchor;
    double tube_radius = 1.0;
};

// Union of primitives, minus closed-ball holes, intersected with open clip balls.
struct DomainSpec {
    std::string name;
    std::vector<Primitive> primitives;
    std::vector<Ball> holes;
    std::vector<Ball> clips;
    std::optional<DumbbellMeta> dumbbell;

    Box bounds() const;  // throws for unbounded domains
};

bool contains(const DomainSpec& d, Vec2 x);
// Visibility test; throws if an endpoint lies outside the domain.
bool segment_inside(const DomainSpec& d, Vec2 x, Vec2 y);
// Same test without the endpoint check, for callers that already know.
bool segment_inside_unchecked(const DomainSpec& d, Vec2 x, Vec2 y);
// Distance to the boundary. For overlapping primitives this is the largest
// primitive depth, a lower bound that is exact away from primitive seams.
double boundary_distance(const DomainSpec& d, Vec2 x);

DomainSpec make_dumbbell(DumbbellVariant variant, double tube_radius = 1.0);
DomainSpec make_box(Vec2 lo, Vec2 hi);
DomainSpec make_ball(Vec2 center, double radius);
DomainSpec make_annulus(double r_in, double r_out);
DomainSpec clip_ball(const DomainSpec& d, Vec2 x0, double R);

// Named constructors: straight-dumbbell, curved-dumbbell, annulus:<rin>,<rout>,
// box:<a>,<b>, ball:<r>.
DomainSpec domain_from_name(std::string_view name);

std::string serialize_domain(const DomainSpec& d);
DomainSpec parse_domain(std::string_view text);

struct ConditionARow {
    double R = 0.0;
    double minus_ratio = 0.0;  // |D- cap B(x0,R)| / R^d
    double plus_ratio = 0.0;
    double tilde_minus_ratio = 0.0;  // |Gamma~ cap D_R^-| / R
    double tilde_plus_ratio = 0.0;
};

struct ConditionAReport {
    std::vector<ConditionARow> rows;
    double band_lo = 0.5;
    double band_hi = 2.0;
    bool volume_ok = false;
    bool gamma_star_bounded = false;
    bool overlap_ok = false;
    bool gamma_tilde_present = false;
    bool gamma_tilde_stable = false;
    std::vector<std::string> violations;
    bool pass = false;
};

ConditionAReport check_condition_A(const DomainSpec& d, const std::vector<double>& R_list,
                                   int n_samples, std::uint64_t seed);

}  // namespace nlvis
