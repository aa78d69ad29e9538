#include "nlvis/mesh.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "nlvis/parallel.hpp"

namespace nlvis {

std::string to_string(RegionTag tag) {
    switch (tag) {
        case RegionTag::Minus: return "minus";
        case RegionTag::Corridor: return "corridor";
        case RegionTag::Plus: return "plus";
        case RegionTag::Other: return "other";
    }
    return "other";
}

double Grid::total_measure() const {
    double s = 0.0;
    for (const auto& c : cells) s += c.measure;
    return s;
}

std::vector<double> Grid::measures() const {
    std::vector<double> m(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) m[i] = cells[i].measure;
    return m;
}

bool Grid::has_tags() const {
    for (const auto& c : cells)
        if (c.tag != RegionTag::Other) return true;
    return false;
}

namespace {

RegionTag tag_of(const DomainSpec& d, Vec2 x) {
    if (!d.dumbbell) return RegionTag::Other;
    if (inside(d.primitives[d.dumbbell->minus], x)) return RegionTag::Minus;
    if (inside(d.primitives[d.dumbbell->plus], x)) return RegionTag::Plus;
    return RegionTag::Corridor;
}

Grid lattice_grid(const DomainSpec& clipped, Vec2 origin, int nx, int ny, double h,
                  int subsamples) {
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    if (subsamples < 1) throw std::invalid_argument("subsamples must be at least 1");
    int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(subsamples))));
    if (k * k != subsamples) throw std::invalid_argument("subsamples must be a perfect square");

    Grid g;
    g.h = h;
    g.origin = origin;
    const double area = h * h;
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            Vec2 c = origin + Vec2{(ix + 0.5) * h, (iy + 0.5) * h};
            if (!contains(clipped, c)) continue;
            double measure = area;
            if (subsamples > 1) {
                int hits = 0;
                for (int a = 0; a < k; ++a)
                    for (int b = 0; b < k; ++b)
                        hits += contains(clipped, origin + Vec2{(ix + (a + 0.5) / k) * h,
                                                                (iy + (b + 0.5) / k) * h});
                measure = area * std::max(hits, 1) / subsamples;
            }
            g.cells.push_back(Cell{ix, iy, c, measure, tag_of(clipped, c)});
        }
    }
    if (g.cells.empty()) throw std::invalid_argument("grid is empty");
    g.domain = clipped;
    return g;
}

int lattice_count(double extent, double h) {
    return static_cast<int>(std::ceil(extent / h - 1e-9));
}

}  // namespace

Grid build_grid(const DomainSpec& domain, Vec2 x0, double R, double h, int subsamples) {
    DomainSpec clipped = clip_ball(domain, x0, R);
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    int n = lattice_count(2.0 * R, h);
    Grid g = lattice_grid(clipped, x0 - Vec2{R, R}, n, n, h, subsamples);
    g.x0 = x0;
    g.R = R;
    return g;
}

Grid build_grid(const DomainSpec& domain, double h, int subsamples) {
    Box b = domain.bounds();
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    return lattice_grid(domain, b.lo, lattice_count(b.hi.x - b.lo.x, h),
                        lattice_count(b.hi.y - b.lo.y, h), h, subsamples);
}

Grid grid_from_cells(std::vector<Cell> cells, double h) {
    if (cells.empty()) throw std::invalid_argument("grid is empty");
    for (const auto& c : cells)
        if (!(c.measure > 0.0)) throw std::invalid_argument("cell measures must be positive");
    Grid g;
    g.h = h;
    g.cells = std::move(cells);
    return g;
}

PairSet::PairSet(std::size_t n) : n_(n), bits_((pair_count() + 63) / 64, 0) {}

PairSet PairSet::all_visible(std::size_t n) {
    PairSet p(n);
    for (auto& w : p.bits_) w = ~std::uint64_t{0};
    std::size_t extra = p.bits_.size() * 64 - p.pair_count();
    if (extra > 0 && !p.bits_.empty()) p.bits_.back() >>= extra;
    return p;
}

std::size_t PairSet::index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (i == j || j >= n_) throw std::out_of_range("pair index out of range");
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

bool PairSet::visible(std::size_t i, std::size_t j) const {
    std::size_t k = index(i, j);
    return (bits_[k >> 6] >> (k & 63)) & 1u;
}

void PairSet::set_visible(std::size_t i, std::size_t j, bool v) {
    std::size_t k = index(i, j);
    std::uint64_t mask = std::uint64_t{1} << (k & 63);
    if (v)
        bits_[k >> 6] |= mask;
    else
        bits_[k >> 6] &= ~mask;
}

std::size_t PairSet::visible_count() const {
    std::size_t c = 0;
    for (auto w : bits_) c += std::popcount(w);
    return c;
}

PairSet visibility_pairs(const Grid& grid) {
    const std::size_t n = grid.size();
    if (n == 0) throw std::invalid_argument("visibility_pairs: empty grid");
    if (!grid.domain) return PairSet::all_visible(n);
    const DomainSpec& d = *grid.domain;

    // Rows are evaluated in parallel into per-row buffers, then packed in order.
    std::vector<std::vector<std::uint8_t>> rows(n);
    parallel_blocks(n, 16, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto& r = rows[i];
            r.resize(n - i - 1);
            for (std::size_t j = i + 1; j < n; ++j)
                r[j - i - 1] = segment_inside_unchecked(d, grid.cells[i].center, grid.cells[j].center);
        }
    });
    PairSet p(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j)
            if (rows[i][j - i - 1]) p.set_visible(i, j, true);
        std::vector<std::uint8_t>().swap(rows[i]);
    }
    return p;
}

double cell_mean(std::span<const double> measures, std::span<const double> u) {
    if (measures.size() != u.size()) throw std::invalid_argument("cell_mean: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num += measures[i] * u[i];
        den += measures[i];
    }
    if (!(den > 0.0)) throw std::invalid_argument("cell_mean: zero total measure");
    return num / den;
}

double cell_mean(const Grid& grid, std::span<const double> u) {
    auto m = grid.measures();
    return cell_mean(m, u);
}

void write_grid_csv(std::ostream& os, const Grid& grid) {
    os << "ix,iy,cx,cy,measure,tag\n";
    os << std::setprecision(17);
    for (const auto& c : grid.cells)
        os << c.ix << ',' << c.iy << ',' << c.center.x << ',' << c.center.y << ',' << c.measure
           << ',' << to_string(c.tag) << '\n';
}

}  // namespace nlvis
