#include "nlvis/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <queue>
#include <tuple>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "nlvis/parallel.hpp"
#include "nlvis/random.hpp"

namespace nlvis {

WhitneyRegion whitney_region(const DomainSpec& d) {
    WhitneyRegion r;
    r.dim = 2;
    r.bounds = d.bounds();
    r.contains = [d](Vec2 x) { return contains(d, x); };
    r.distance = [d](Vec2 x) { return boundary_distance(d, x); };
    r.misses = [d](Vec2 x, double rad) {
        for (const auto& c : d.clips)
            if (c.radius - norm(x - c.center) <= -rad) return true;
        for (const auto& h : d.holes)
            if (norm(x - h.center) + rad <= h.radius) return true;
        for (const auto& k : d.primitives)
            if (signed_distance(k, x) > -rad) return false;
        return true;
    };
    return r;
}

WhitneyRegion interval_region(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("interval needs a < b");
    WhitneyRegion r;
    r.dim = 1;
    r.bounds = Box{{a, 0.0}, {b, 0.0}};
    r.contains = [a, b](Vec2 x) { return x.x > a && x.x < b; };
    r.distance = [a, b](Vec2 x) { return std::min(x.x - a, b - x.x); };
    r.misses = [a, b](Vec2 x, double rad) { return x.x + rad <= a || x.x - rad >= b; };
    return r;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

WhitneyCube make_cube(const WhitneyDecomposition& dec, int level, std::int64_t ix, std::int64_t iy) {
    WhitneyCube q;
    q.level = level;
    q.ix = ix;
    q.iy = iy;
    q.side = std::ldexp(dec.base, -level);
    q.lo = dec.origin + Vec2{static_cast<double>(ix) * q.side,
                             dec.dim == 1 ? 0.0 : static_cast<double>(iy) * q.side};
    return q;
}

enum class Verdict : std::uint8_t { Accept, Discard, Split, Residual };

struct CubeKey {
    int level;
    std::int64_t ix, iy;
    bool operator==(const CubeKey&) const = default;
};

struct CubeKeyHash {
    std::size_t operator()(const CubeKey& k) const {
        std::uint64_t h = static_cast<std::uint64_t>(k.level) * 0x9e3779b97f4a7c15ULL;
        h ^= static_cast<std::uint64_t>(k.ix) + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.iy) + 0x85ebca77c2b2ae63ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

WhitneyDecomposition whitney_decompose(const WhitneyRegion& region, int max_level) {
    if (max_level < 0) throw std::invalid_argument("max_level must be nonnegative");
    const int dim = region.dim;
    const Box& b = region.bounds;

    // Largest boundary distance, sampled on a lattice, sets the level-0 size.
    double max_delta = 0.0;
    const int samples = dim == 1 ? 4096 : 64;
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < (dim == 1 ? 1 : samples); ++j) {
            Vec2 x{b.lo.x + (i + 0.5) / samples * (b.hi.x - b.lo.x),
                   dim == 1 ? 0.0 : b.lo.y + (j + 0.5) / samples * (b.hi.y - b.lo.y)};
            if (region.contains(x)) max_delta = std::max(max_delta, region.distance(x));
        }
    }
    if (!(max_delta > 0.0)) throw std::invalid_argument("Whitney decomposition: region looks empty");

    WhitneyDecomposition dec;
    dec.dim = dim;
    dec.max_level = max_level;
    dec.origin = b.lo;
    const double root_d = dim == 1 ? 1.0 : std::sqrt(2.0);
    dec.base = std::exp2(std::ceil(std::log2(max_delta / (1.5 * root_d))));

    const auto nx = static_cast<std::int64_t>(std::ceil((b.hi.x - b.lo.x) / dec.base - 1e-12));
    const auto ny = dim == 1 ? 1 : static_cast<std::int64_t>(std::ceil((b.hi.y - b.lo.y) / dec.base - 1e-12));
    std::vector<std::pair<std::int64_t, std::int64_t>> current;
    for (std::int64_t i = 0; i < std::max<std::int64_t>(nx, 1); ++i)
        for (std::int64_t j = 0; j < std::max<std::int64_t>(ny, 1); ++j) current.emplace_back(i, j);

    for (int level = 0; level <= max_level && !current.empty(); ++level) {
        std::vector<Verdict> verdict(current.size());
        std::vector<double> delta(current.size(), 0.0);
        std::vector<double> residual(current.size(), 0.0);
        parallel_blocks(current.size(), 256, [&](std::size_t, std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                WhitneyCube q = make_cube(dec, level, current[k].first, current[k].second);
                Vec2 c = q.center(dim);
                double diam = q.diam(dim);
                if (region.contains(c)) {
                    double dc = region.distance(c);
                    // dist(Q, boundary) lies in [dc - diam/2, dc].
                    if (dc - 0.5 * diam >= diam && dc <= 4.0 * diam) {
                        verdict[k] = Verdict::Accept;
                        delta[k] = dc;
                        continue;
                    }
                } else if (region.misses(c, 0.5 * diam)) {
                    verdict[k] = Verdict::Discard;
                    continue;
                }
                if (level < max_level) {
                    verdict[k] = Verdict::Split;
                    continue;
                }
                verdict[k] = Verdict::Residual;
                int hits = 0, total = 0;
                for (int a = 0; a < 4; ++a) {
                    for (int bb = 0; bb < 4; ++bb) {
                        Vec2 x = dim == 1 ? Vec2{q.lo.x + (4 * a + bb + 0.5) / 16.0 * q.side, 0.0}
                                          : q.lo + Vec2{(a + 0.5) / 4.0 * q.side, (bb + 0.5) / 4.0 * q.side};
                        hits += region.contains(x);
                        ++total;
                    }
                }
                residual[k] = std::pow(q.side, dim) * hits / total;
            }
        });
        std::vector<std::pair<std::int64_t, std::int64_t>> next;
        for (std::size_t k = 0; k < current.size(); ++k) {
            auto [ix, iy] = current[k];
            switch (verdict[k]) {
                case Verdict::Accept: {
                    WhitneyCube q = make_cube(dec, level, ix, iy);
                    dec.covered_measure += std::pow(q.side, dim);
                    dec.cubes.push_back(q);
                    dec.center_distance.push_back(delta[k]);
                    break;
                }
                case Verdict::Split:
                    if (dim == 1) {
                        next.emplace_back(2 * ix, 0);
                        next.emplace_back(2 * ix + 1, 0);
                    } else {
                        for (int a = 0; a < 2; ++a)
                            for (int bb = 0; bb < 2; ++bb) next.emplace_back(2 * ix + a, 2 * iy + bb);
                    }
                    break;
                case Verdict::Residual: dec.residual_measure += residual[k]; break;
                case Verdict::Discard: break;
            }
        }
        current = std::move(next);
    }
    return dec;
}

WhitneyDecomposition whitney_decompose(const DomainSpec& d, int max_level) {
    return whitney_decompose(whitney_region(d), max_level);
}

WhitneyInvariants check_whitney_invariants(const WhitneyDecomposition& dec, const WhitneyRegion& region) {
    WhitneyInvariants inv;
    inv.cubes = dec.cubes.size();
    inv.residual_fraction = dec.residual_fraction();
    std::unordered_set<CubeKey, CubeKeyHash> accepted;
    for (const auto& q : dec.cubes) accepted.insert({q.level, q.ix, q.iy});
    for (const auto& q : dec.cubes) {
        Vec2 c = q.center(dec.dim);
        double diam = q.diam(dec.dim);
        if (!region.contains(c)) {
            ++inv.sandwich_violations;
        } else {
            double dc = region.distance(c);
            if (!(dc - 0.5 * diam >= diam) || !(dc <= 4.0 * diam)) ++inv.sandwich_violations;
        }
        for (int up = 1; up <= q.level; ++up)
            if (accepted.count({q.level - up, floor_div(q.ix, std::int64_t{1} << up),
                                floor_div(q.iy, std::int64_t{1} << up)}))
                ++inv.overlap_violations;
    }
    return inv;
}

double side_length(const WhitneyCube& q) { return q.side; }

namespace {

// Gap between the closed projections of two cubes on each axis, exact in
// units of the finer cube's side.
std::pair<double, double> axis_gaps(const WhitneyCube& q, const WhitneyCube& s) {
    const int fine = std::max(q.level, s.level);
    auto span = [fine](const WhitneyCube& c, std::int64_t idx) {
        std::int64_t scale = std::int64_t{1} << (fine - c.level);
        return std::pair{idx * scale, (idx + 1) * scale};
    };
    auto gap = [](std::pair<std::int64_t, std::int64_t> a, std::pair<std::int64_t, std::int64_t> b) {
        return std::max<std::int64_t>({0, b.first - a.second, a.first - b.second});
    };
    const double unit = q.level == fine ? q.side : s.side;
    return {static_cast<double>(gap(span(q, q.ix), span(s, s.ix))) * unit,
            static_cast<double>(gap(span(q, q.iy), span(s, s.iy))) * unit};
}

}  // namespace

double cube_distance(const WhitneyCube& q, const WhitneyCube& s, int dim) {
    auto [gx, gy] = axis_gaps(q, s);
    return dim == 1 ? gx : std::hypot(gx, gy);
}

double long_distance(const WhitneyCube& q, const WhitneyCube& s, int dim) {
    return (q.side + s.side) + cube_distance(q, s, dim);
}

bool cubes_touch(const WhitneyCube& q, const WhitneyCube& s, int) {
    auto [gx, gy] = axis_gaps(q, s);
    return gx == 0.0 && gy == 0.0 && !(q.level == s.level && q.ix == s.ix && q.iy == s.iy);
}

std::vector<std::vector<std::uint32_t>> cube_adjacency(const WhitneyDecomposition& dec) {
    std::unordered_map<CubeKey, std::uint32_t, CubeKeyHash> index;
    index.reserve(dec.cubes.size() * 2);
    for (std::size_t k = 0; k < dec.cubes.size(); ++k)
        index.emplace(CubeKey{dec.cubes[k].level, dec.cubes[k].ix, dec.cubes[k].iy},
                      static_cast<std::uint32_t>(k));

    std::vector<std::vector<std::uint32_t>> adj(dec.cubes.size());
    parallel_blocks(dec.cubes.size(), 256, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            const WhitneyCube& q = dec.cubes[k];
            for (int lv = std::max(0, q.level - 4); lv <= std::min(dec.max_level, q.level + 4); ++lv) {
                const int fine = std::max(lv, q.level);
                const std::int64_t sq = std::int64_t{1} << (fine - q.level);
                const std::int64_t so = std::int64_t{1} << (fine - lv);
                auto range = [&](std::int64_t idx) {
                    std::int64_t a = idx * sq;
                    return std::pair{floor_div(a, so) - 1, floor_div(a + sq, so)};
                };
                auto [x0, x1] = range(q.ix);
                auto [y0, y1] = dec.dim == 1 ? std::pair<std::int64_t, std::int64_t>{0, 0} : range(q.iy);
                for (std::int64_t i = x0; i <= x1; ++i) {
                    for (std::int64_t j = y0; j <= y1; ++j) {
                        auto it = index.find({lv, i, j});
                        if (it == index.end() || it->second == k) continue;
                        if (cubes_touch(q, dec.cubes[it->second], dec.max_level)) adj[k].push_back(it->second);
                    }
                }
            }
            std::sort(adj[k].begin(), adj[k].end());
        }
    });
    return adj;
}

std::optional<std::size_t> central_index(const WhitneyDecomposition& dec,
                                         const std::vector<std::size_t>& cubes, double epsilon) {
    if (cubes.empty()) return std::nullopt;
    const std::size_t k = cubes.size();
    const WhitneyCube& q = dec.cubes[cubes.front()];
    const WhitneyCube& s = dec.cubes[cubes.back()];
    std::vector<char> suffix(k + 1, 1);
    for (std::size_t j = k; j-- > 0;) {
        const WhitneyCube& c = dec.cubes[cubes[j]];
        suffix[j] = suffix[j + 1] && c.side >= epsilon * long_distance(c, s, dec.dim);
    }
    bool prefix = true;
    for (std::size_t j = 0; j < k; ++j) {
        const WhitneyCube& c = dec.cubes[cubes[j]];
        prefix = prefix && c.side >= epsilon * long_distance(q, c, dec.dim);
        if (!prefix) break;
        if (suffix[j]) return j;
    }
    return std::nullopt;
}

bool validate_chain(const WhitneyDecomposition& dec, const Chain& chain) {
    const auto& c = chain.cubes;
    if (c.empty() || chain.central >= c.size() || !(chain.epsilon > 0.0)) return false;
    for (std::size_t j = 0; j + 1 < c.size(); ++j)
        if (!cubes_touch(dec.cubes[c[j]], dec.cubes[c[j + 1]], dec.max_level)) return false;
    const WhitneyCube& q = dec.cubes[c.front()];
    const WhitneyCube& s = dec.cubes[c.back()];
    double length = 0.0;
    for (auto i : c) length += dec.cubes[i].side;
    if (length > long_distance(q, s, dec.dim) / chain.epsilon * (1.0 + 1e-12)) return false;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const WhitneyCube& x = dec.cubes[c[j]];
        if (j <= chain.central && !(x.side >= chain.epsilon * long_distance(q, x, dec.dim))) return false;
        if (j >= chain.central && !(x.side >= chain.epsilon * long_distance(x, s, dec.dim))) return false;
    }
    return true;
}

Chain reversed(const Chain& chain) {
    Chain r = chain;
    std::reverse(r.cubes.begin(), r.cubes.end());
    r.central = chain.cubes.size() - 1 - chain.central;
    return r;
}

namespace {

struct SearchOutcome {
    std::optional<std::vector<std::size_t>> path;
    std::size_t expansions = 0;
    bool exhausted = false;
};

SearchOutcome best_first(const WhitneyDecomposition& dec, const std::vector<std::vector<std::uint32_t>>& adj,
                         std::size_t q, std::size_t s, double limit, bool by_hops, std::size_t budget) {
    struct Key {
        double primary;
        double length;
        std::size_t node;
        bool operator>(const Key& o) const {
            if (primary != o.primary) return primary > o.primary;
            if (length != o.length) return length > o.length;
            return node > o.node;
        }
    };
    std::priority_queue<Key, std::vector<Key>, std::greater<Key>> open;
    std::unordered_map<std::size_t, std::pair<double, double>> best;  // node -> (primary, length)
    std::unordered_map<std::size_t, std::size_t> parent;
    const double l0 = dec.cubes[q].side;
    open.push({by_hops ? 0.0 : l0, l0, q});
    best[q] = {by_hops ? 0.0 : l0, l0};
    SearchOutcome out;
    while (!open.empty()) {
        Key cur = open.top();
        open.pop();
        auto b = best.at(cur.node);
        if (cur.primary != b.first || cur.length != b.second) continue;
        if (++out.expansions > budget) {
            out.exhausted = true;
            return out;
        }
        if (cur.node == s) {
            std::vector<std::size_t> path{s};
            while (path.back() != q) path.push_back(parent.at(path.back()));
            std::reverse(path.begin(), path.end());
            out.path = std::move(path);
            return out;
        }
        for (std::uint32_t nb : adj[cur.node]) {
            double len = cur.length + dec.cubes[nb].side;
            if (len > limit) continue;
            double primary = by_hops ? cur.primary + 1.0 : len;
            auto it = best.find(nb);
            if (it != best.end() &&
                (it->second.first < primary || (it->second.first == primary && it->second.second <= len)))
                continue;
            best[nb] = {primary, len};
            parent[nb] = cur.node;
            open.push({primary, len, nb});
        }
    }
    return out;
}

}  // namespace

ChainSearchResult find_admissible_chain(const WhitneyDecomposition& dec,
                                        const std::vector<std::vector<std::uint32_t>>& adjacency,
                                        std::size_t q, std::size_t s, double epsilon,
                                        std::size_t max_expansions) {
    if (q >= dec.cubes.size() || s >= dec.cubes.size())
        throw std::invalid_argument("chain endpoints are not in the decomposition");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    ChainSearchResult res;
    const double limit = long_distance(dec.cubes[q], dec.cubes[s], dec.dim) / epsilon * (1.0 + 1e-12);
    for (bool by_hops : {false, true}) {
        SearchOutcome o = best_first(dec, adjacency, q, s, limit, by_hops, max_expansions);
        res.expansions += o.expansions;
        res.budget_exhausted = res.budget_exhausted || o.exhausted;
        if (!o.path) continue;
        auto j0 = central_index(dec, *o.path, epsilon);
        if (!j0) continue;
        Chain c;
        c.cubes = std::move(*o.path);
        c.epsilon = epsilon;
        c.central = *j0;
        for (auto i : c.cubes) c.length += dec.cubes[i].side;
        res.strategy = by_hops ? "hops" : "length";
        res.chain = std::move(c);
        return res;
    }
    return res;
}

namespace {

inline double int_pow(double x, double e) {
    if (e == 1.0) return x;
    if (e == 2.0) return x * x;
    if (e == 3.0) return x * x * x;
    if (e == 4.0) return (x * x) * (x * x);
    return std::pow(x, e);
}

}  // namespace

double verify_whitney_sum(const WhitneyDecomposition& dec, double a, double b) {
    const double d = dec.dim;
    if (!(b > a && a > d - 1.0)) throw std::invalid_argument("Whitney sum needs b > a > d - 1");
    const std::size_t n = dec.cubes.size();
    if (n == 0) throw std::invalid_argument("empty decomposition");
    std::vector<double> lo_x(n), lo_y(n), side(n), side_a(n);
    for (std::size_t k = 0; k < n; ++k) {
        lo_x[k] = dec.cubes[k].lo.x;
        lo_y[k] = dec.cubes[k].lo.y;
        side[k] = dec.cubes[k].side;
        side_a[k] = int_pow(side[k], a);
    }
    const std::size_t block = 64;
    std::vector<double> block_max((n + block - 1) / block, 0.0);
    parallel_blocks(n, block, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t q = lo; q < hi; ++q) {
            double sum = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                double gx = std::max({0.0, lo_x[s] - (lo_x[q] + side[q]), lo_x[q] - (lo_x[s] + side[s])});
                double gy = dec.dim == 1 ? 0.0
                                         : std::max({0.0, lo_y[s] - (lo_y[q] + side[q]), lo_y[q] - (lo_y[s] + side[s])});
                double D = (side[q] + side[s]) + std::hypot(gx, gy);
                sum += side_a[s] / int_pow(D, b);
            }
            m = std::max(m, int_pow(side[q], b - a) * sum);
        }
        block_max[bi] = m;
    });
    return *std::max_element(block_max.begin(), block_max.end());
}

WhitneySumStability whitney_sum_stability(const WhitneyRegion& region, int level, double a, double b) {
    WhitneySumStability st;
    st.coarse = verify_whitney_sum(whitney_decompose(region, level), a, b);
    st.fine = verify_whitney_sum(whitney_decompose(region, level + 1), a, b);
    st.stable = std::max(st.coarse, st.fine) < 2.0 * std::min(st.coarse, st.fine);
    return st;
}

namespace {

struct Square {
    Vec2 center;
    std::array<Vec2, 5> pts;  // corners, then center
};

Square make_square(Vec2 c, double side) {
    double h = 0.5 * side;
    return {c, {c + Vec2{-h, -h}, c + Vec2{h, -h}, c + Vec2{h, h}, c + Vec2{-h, h}, c}};
}

bool square_inside(const DomainSpec& d, const Square& q) {
    for (const auto& p : q.pts)
        if (!contains(d, p)) return false;
    for (int e = 0; e < 4; ++e)
        if (!segment_inside_unchecked(d, q.pts[e], q.pts[(e + 1) % 4])) return false;
    return true;
}

bool sees(const DomainSpec& d, Vec2 x, const Square& q) {
    if (!segment_inside_unchecked(d, x, q.center)) return false;
    for (const auto& p : q.pts)
        if (!segment_inside_unchecked(d, x, p)) return false;
    return true;
}

bool inter_visible(const DomainSpec& d, const Square& a, const Square& b) {
    if (!segment_inside_unchecked(d, a.center, b.center)) return false;
    for (const auto& p : a.pts)
        for (const auto& q : b.pts)
            if (!segment_inside_unchecked(d, p, q)) return false;
    return true;
}

void search_pair(const DomainSpec& d, ConditionBPair& pr, const ConditionBOptions& opts) {
    const double L = norm(pr.y - pr.x);
    const Vec2 mid = (pr.x + pr.y) * 0.5;
    for (double c = 2.0; c <= opts.max_comparison * (1.0 + 1e-12); c *= 2.0) {
        const double side = L / c;
        const double reach = opts.window * L;
        const int span = static_cast<int>(std::ceil(reach / side)) + 1;
        struct Cand {
            double dist;
            int i, j;
            Square sq;
        };
        std::vector<Cand> cands;
        for (int i = -span; i <= span; ++i) {
            for (int j = -span; j <= span; ++j) {
                Vec2 center = mid + Vec2{i * side, j * side};
                double dist = norm(center - mid);
                if (dist > reach) continue;
                Square sq = make_square(center, side);
                if (square_inside(d, sq)) cands.push_back({dist, i, j, sq});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            return std::tie(a.dist, a.i, a.j) < std::tie(b.dist, b.i, b.j);
        });
        const std::size_t n = cands.size();
        std::vector<char> from_y(n, 0), visited(n, 0);
        std::vector<std::size_t> frontier;
        for (std::size_t k = 0; k < n; ++k) {
            from_y[k] = sees(d, pr.y, cands[k].sq);
            if (sees(d, pr.x, cands[k].sq)) {
                frontier.push_back(k);
                visited[k] = 1;
            }
        }
        std::size_t depth = 1;
        bool found = false;
        for (auto k : frontier) found = found || from_y[k];
        while (!found && depth < opts.max_path && !frontier.empty() && !pr.budget_exhausted) {
            std::vector<std::size_t> next;
            for (auto f : frontier) {
                if (++pr.expansions > opts.max_expansions) {
                    pr.budget_exhausted = true;
                    break;
                }
                for (std::size_t g = 0; g < n && !found; ++g) {
                    if (visited[g] || !inter_visible(d, cands[f].sq, cands[g].sq)) continue;
                    visited[g] = 1;
                    next.push_back(g);
                    found = from_y[g];
                }
                if (found) break;
            }
            frontier = std::move(next);
            ++depth;
        }
        if (found) {
            pr.found = true;
            pr.length = depth;
            pr.comparison = c;
            return;
        }
        if (pr.budget_exhausted) return;
    }
}

}  // namespace

ConditionBReport check_condition_B(const DomainSpec& d, const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                   const ConditionBOptions& opts) {
    ConditionBReport rep;
    rep.draws = pairs.size();
    for (auto [x, y] : pairs) {
        ConditionBPair pr;
        pr.x = x;
        pr.y = y;
        rep.pairs.push_back(pr);
    }
    parallel_blocks(rep.pairs.size(), 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) search_pair(d, rep.pairs[k], opts);
    });
    rep.vacuous = rep.pairs.empty();
    rep.pass = true;
    for (const auto& pr : rep.pairs) {
        rep.pass = rep.pass && pr.found && pr.length <= opts.max_path;
        rep.max_length = std::max(rep.max_length, pr.length);
        rep.max_comparison_used = std::max(rep.max_comparison_used, pr.comparison);
    }
    return rep;
}

ConditionBReport check_condition_B(const DomainSpec& d, const ConditionBOptions& opts) {
    const Box b = d.bounds();
    SplitMix64 rng(derive_seed(opts.seed, "geometry-MC", 2));
    std::vector<std::pair<Vec2, Vec2>> pairs;
    std::size_t draws = 0;
    while (pairs.size() < opts.pairs && draws < opts.max_draws) {
        ++draws;
        Vec2 x{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
        Vec2 y{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
        if (!contains(d, x) || !contains(d, y)) continue;
        if (!segment_inside_unchecked(d, x, y)) pairs.emplace_back(x, y);
    }
    ConditionBReport rep = check_condition_B(d, pairs, opts);
    rep.draws = draws;
    return rep;
}

void write_cubes_csv(std::ostream& os, const WhitneyDecomposition& dec) {
    os << "level,ix,iy,lox,loy,side,center_distance\n" << std::setprecision(17);
    for (std::size_t k = 0; k < dec.cubes.size(); ++k) {
        const auto& q = dec.cubes[k];
        os << q.level << ',' << q.ix << ',' << q.iy << ',' << q.lo.x << ',' << q.lo.y << ',' << q.side << ','
           << dec.center_distance[k] << '\n';
    }
}

}  // namespace nlvis
