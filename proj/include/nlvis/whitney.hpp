#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nlvis/geometry.hpp"

namespace nlvis {

// What the dyadic construction needs to know about a region, in 1D or 2D.
// In 1D only the x coordinate is used.
struct WhitneyRegion {
    int dim = 2;
    Box bounds;
    std::function<bool(Vec2)> contains;
    std::function<double(Vec2)> distance;        // boundary distance, x inside
    std::function<bool(Vec2, double)> misses;   // ball B(x, r) certainly disjoint from D
};

WhitneyRegion whitney_region(const DomainSpec& d);
WhitneyRegion interval_region(double a, double b);

struct WhitneyCube {
    int level = 0;
    std::int64_t ix = 0;
    std::int64_t iy = 0;
    double side = 0.0;
    Vec2 lo;

    double diam(int dim) const { return dim == 1 ? side : side * std::sqrt(2.0); }
    Vec2 center(int dim) const {
        return dim == 1 ? Vec2{lo.x + 0.5 * side, 0.0} : lo + Vec2{0.5 * side, 0.5 * side};
    }
};

struct WhitneyDecomposition {
    int dim = 2;
    double base = 1.0;  // side of level-0 cubes
    Vec2 origin;
    int max_level = 0;
    std::vector<WhitneyCube> cubes;
    std::vector<double> center_distance;  // boundary distance at each cube center
    double covered_measure = 0.0;
    double residual_measure = 0.0;  // part of D inside unresolved finest-level cubes

    double residual_fraction() const {
        double total = covered_measure + residual_measure;
        return total > 0.0 ? residual_measure / total : 0.0;
    }
};

WhitneyDecomposition whitney_decompose(const WhitneyRegion& region, int max_level);
WhitneyDecomposition whitney_decompose(const DomainSpec& d, int max_level);

struct WhitneyInvariants {
    std::size_t cubes = 0;
    std::size_t sandwich_violations = 0;  // diam <= dist(Q, boundary) <= 4 diam
    std::size_t overlap_violations = 0;   // an accepted cube inside another
    double residual_fraction = 0.0;
    bool pass(double max_residual) const {
        return sandwich_violations == 0 && overlap_violations == 0 && residual_fraction < max_residual;
    }
};

// Recomputes boundary distances from the region and audits every cube.
WhitneyInvariants check_whitney_invariants(const WhitneyDecomposition& dec, const WhitneyRegion& region);

double side_length(const WhitneyCube& q);
double cube_distance(const WhitneyCube& q, const WhitneyCube& s, int dim = 2);
double long_distance(const WhitneyCube& q, const WhitneyCube& s, int dim = 2);
bool cubes_touch(const WhitneyCube& q, const WhitneyCube& s, int max_level);

// Touching cubes for every cube, ascending by index.
std::vector<std::vector<std::uint32_t>> cube_adjacency(const WhitneyDecomposition& dec);

struct Chain {
    std::vector<std::size_t> cubes;
    double epsilon = 0.0;
    std::size_t central = 0;  // 0-based index j0
    double length = 0.0;      // sum of side lengths
};

// Smallest j0 satisfying the two-sided growth condition, if any.
std::optional<std::size_t> central_index(const WhitneyDecomposition& dec,
                                         const std::vector<std::size_t>& cubes, double epsilon);
// Checks touching, total length and the central-cube condition from scratch.
bool validate_chain(const WhitneyDecomposition& dec, const Chain& chain);

struct ChainSearchResult {
    std::optional<Chain> chain;
    std::size_t expansions = 0;
    bool budget_exhausted = false;
    std::string strategy;  // "length" or "hops"
};

// Best-first search on total side length, pruned at D(Q,S)/epsilon. When the
// shortest chain misses the central-cube condition, a second search on hop
// count is tried.
ChainSearchResult find_admissible_chain(const WhitneyDecomposition& dec,
                                        const std::vector<std::vector<std::uint32_t>>& adjacency,
                                        std::size_t q, std::size_t s, double epsilon,
                                        std::size_t max_expansions = 100000);

Chain reversed(const Chain& chain);

// max over Q of l(Q)^{b-a} sum_S l(S)^a / D(Q,S)^b. Requires b > a > d - 1.
double verify_whitney_sum(const WhitneyDecomposition& dec, double a, double b);

struct WhitneySumStability {
    double coarse = 0.0;
    double fine = 0.0;
    bool stable = false;  // ratio of the two sups below 2
};

WhitneySumStability whitney_sum_stability(const WhitneyRegion& region, int level, double a, double b);

struct ConditionBOptions {
    std::size_t pairs = 20;
    std::size_t max_path = 8;
    double max_comparison = 8.0;  // cube sides range down to |x - y| / max_comparison
    double window = 1.0;          // cube centers within window |x - y| of the midpoint
    std::uint64_t seed = 1;
    std::size_t max_expansions = 100000;
    std::size_t max_draws = 20000;
};

struct ConditionBPair {
    Vec2 x;
    Vec2 y;
    bool found = false;
    bool budget_exhausted = false;
    std::size_t length = 0;
    double comparison = 0.0;  // |x - y| / side of the cubes used
    std::size_t expansions = 0;
};

struct ConditionBReport {
    std::vector<ConditionBPair> pairs;
    std::size_t draws = 0;
    bool vacuous = false;
    std::size_t max_length = 0;
    double max_comparison_used = 0.0;
    bool pass = false;
};

// Samples pairs with y not visible from x and searches for short paths of
// comparable, consecutively inter-visible squares.
ConditionBReport check_condition_B(const DomainSpec& d, const ConditionBOptions& opts);
ConditionBReport check_condition_B(const DomainSpec& d,
                                   const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                   const ConditionBOptions& opts);

void write_cubes_csv(std::ostream& os, const WhitneyDecomposition& dec);

}  // namespace nlvis
