#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "nlvis/kernels.hpp"
#include "nlvis/mesh.hpp"
#include "nlvis/spectral.hpp"

namespace nlvis {

// Embedded jump chain: from cell i, jump to a visible cell j with probability
// proportional to k(|x_i - x_j|) m_j.
class ChainModel {
public:
    static ChainModel build(const Grid& grid, const PairSet& pairs, const KernelSpec& kernel);
    // Rows of a transition matrix; self-loops allowed. Rates default to 1.
    static ChainModel from_rows(const std::vector<std::vector<double>>& P);

    std::size_t states() const { return row_start_.size() - 1; }
    double probability(std::size_t i, std::size_t j) const;
    double rate(std::size_t i) const { return rate_[i]; }
    bool isolated(std::size_t i) const { return rate_[i] == 0.0; }
    // Next state for a uniform draw in [0, 1).
    std::size_t step(std::size_t i, double uniform) const;
    // Largest violation of m_i rate_i P(i,j) = m_j rate_j P(j,i), relative to the larger side.
    double detailed_balance_error(std::span<const double> measures) const;
    double max_row_sum_error() const;

private:
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> target_;
    std::vector<double> cdf_;  // cumulative probabilities within each row
    std::vector<double> prob_;
    std::vector<double> rate_;
};

ChainModel build_chain(const Grid& grid, const PairSet& pairs, const KernelSpec& kernel);

struct PathRecord {
    std::size_t path = 0;
    std::uint64_t steps = 0;
    bool censored = false;
};

struct CrossingStats {
    double mean = 0.0;
    double ci95 = 0.0;  // half-width
    std::size_t completed = 0;
    std::size_t censored = 0;
    std::uint64_t direct_transitions = 0;  // jumps between source-side and target-side tags
    std::vector<PathRecord> paths;
};

// First-hitting step counts of `target` from starts drawn with weights
// `source_weights`. Paths longer than max_steps are censored; more than 5%
// censored paths is an error. tags (optional) enable direct-jump counting
// between Minus and Plus cells.
CrossingStats mean_crossing_time(const ChainModel& chain, std::span<const double> source_weights,
                                 std::span<const char> target, std::size_t n_paths,
                                 std::uint64_t max_steps, std::uint64_t seed,
                                 std::span<const RegionTag> tags = {});

// Dumbbell convention: start in D- cells with x1 < -R/2 weighted by measure,
// stop on the first D+ cell.
CrossingStats dumbbell_crossing_time(const Grid& grid, const ChainModel& chain, std::size_t n_paths,
                                     std::uint64_t max_steps, std::uint64_t seed);

struct CrossingScaling {
    ScalingReport report;
    std::vector<CrossingStats> stats;
};

CrossingScaling crossing_scaling(DumbbellVariant variant, const KernelSpec& kernel,
                                 const std::vector<double>& R_list, std::size_t n_paths,
                                 std::uint64_t seed, std::uint64_t max_steps = 1000000, double h = 0.5);

void write_paths_csv(std::ostream& os, const CrossingStats& stats);

}  // namespace nlvis
