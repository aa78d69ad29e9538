#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nlvis/geometry.hpp"

namespace nlvis {

enum class RegionTag : std::uint8_t { Minus, Corridor, Plus, Other };

std::string to_string(RegionTag tag);

struct Cell {
    int ix = 0;
    int iy = 0;
    Vec2 center;
    double measure = 0.0;
    RegionTag tag = RegionTag::Other;
};

// Cells are ordered by (ix, iy).
struct Grid {
    double h = 0.0;
    Vec2 origin;  // lower-left corner of lattice cell (0, 0)
    std::vector<Cell> cells;
    std::optional<DomainSpec> domain;  // the clipped domain; absent for hand-built grids
    Vec2 x0;
    double R = 0.0;  // 0 when no ball clip was applied

    std::size_t size() const { return cells.size(); }
    double total_measure() const;
    std::vector<double> measures() const;
    bool has_tags() const;
};

// Cells of side h on the lattice anchored at x0 - (R, R) whose centers lie in
// D cap B(x0, R). subsamples must be a perfect square (k x k points per cell).
Grid build_grid(const DomainSpec& domain, Vec2 x0, double R, double h, int subsamples);
// Same for a bounded domain, anchored at the lower corner of its bounds.
Grid build_grid(const DomainSpec& domain, double h, int subsamples);
// Hand-built grid with no domain; used for small exact checks.
Grid grid_from_cells(std::vector<Cell> cells, double h);

// Smallest lattice spacing that keeps four cells across a tube of radius r.
inline double max_corridor_h(double tube_radius) { return tube_radius / 2.0; }

// Unordered pairs i < j with a visibility bit each. Every pair of cells is a
// censored pair, so only visibility needs storage.
class PairSet {
public:
    PairSet() = default;
    explicit PairSet(std::size_t n);
    static PairSet all_visible(std::size_t n);

    std::size_t cells() const { return n_; }
    std::size_t pair_count() const { return n_ < 2 ? 0 : n_ * (n_ - 1) / 2; }
    std::size_t visible_count() const;
    bool visible(std::size_t i, std::size_t j) const;
    bool censored(std::size_t i, std::size_t j) const { return i != j && i < n_ && j < n_; }
    void set_visible(std::size_t i, std::size_t j, bool v);

private:
    std::size_t index(std::size_t i, std::size_t j) const;

    std::size_t n_ = 0;
    std::vector<std::uint64_t> bits_;
};

PairSet visibility_pairs(const Grid& grid);

double cell_mean(std::span<const double> measures, std::span<const double> u);
double cell_mean(const Grid& grid, std::span<const double> u);

void write_grid_csv(std::ostream& os, const Grid& grid);

}  // namespace nlvis
