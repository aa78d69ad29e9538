#include "nlvis/walker.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "nlvis/parallel.hpp"
#include "nlvis/random.hpp"

namespace nlvis {

ChainModel ChainModel::build(const Grid& grid, const PairSet& pairs, const KernelSpec& kernel) {
    const std::size_t n = grid.size();
    if (pairs.cells() != n) throw std::invalid_argument("pair set does not match grid");
    kernel.validate();
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    parallel_blocks(n, 16, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || !pairs.visible(i, j)) continue;
                double r = norm(grid.cells[i].center - grid.cells[j].center);
                double w = eval_kernel(kernel, r) * grid.cells[j].measure;
                if (w > 0.0) rows[i].emplace_back(static_cast<std::uint32_t>(j), w);
            }
        }
    });
    ChainModel c;
    c.row_start_.assign(1, 0);
    c.rate_.assign(n, 0.0);
    std::size_t isolated = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double rate = 0.0;
        for (auto [j, w] : rows[i]) rate += w;
        c.rate_[i] = rate;
        isolated += rows[i].empty();
        double acc = 0.0;
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            auto [j, w] = rows[i][k];
            double p = w / rate;
            acc += p;
            c.target_.push_back(j);
            c.prob_.push_back(p);
            c.cdf_.push_back(k + 1 == rows[i].size() ? 1.0 : acc);
        }
        c.row_start_.push_back(c.target_.size());
        std::vector<std::pair<std::uint32_t, double>>().swap(rows[i]);
    }
    if (isolated == n) throw std::invalid_argument("every state of the chain is isolated");
    return c;
}

ChainModel ChainModel::from_rows(const std::vector<std::vector<double>>& P) {
    const std::size_t n = P.size();
    if (n == 0) throw std::invalid_argument("empty transition matrix");
    ChainModel c;
    c.row_start_.assign(1, 0);
    c.rate_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (P[i].size() != n) throw std::invalid_argument("transition matrix must be square");
        double total = 0.0;
        for (double p : P[i]) {
            if (p < 0.0) throw std::invalid_argument("negative transition probability");
            total += p;
        }
        if (total == 0.0) {
            c.rate_[i] = 0.0;
        } else if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("transition rows must sum to 1");
        }
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (P[i][j] > 0.0) last = j;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(P[i][j] > 0.0)) continue;
            acc += P[i][j];
            c.target_.push_back(static_cast<std::uint32_t>(j));
            c.prob_.push_back(P[i][j]);
            c.cdf_.push_back(j == last ? 1.0 : acc);
        }
        c.row_start_.push_back(c.target_.size());
    }
    return c;
}

double ChainModel::probability(std::size_t i, std::size_t j) const {
    auto b = target_.begin() + row_start_[i];
    auto e = target_.begin() + row_start_[i + 1];
    auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(j));
    return it != e && *it == j ? prob_[it - target_.begin()] : 0.0;
}

std::size_t ChainModel::step(std::size_t i, double uniform) const {
    auto b = cdf_.begin() + row_start_[i];
    auto e = cdf_.begin() + row_start_[i + 1];
    if (b == e) return i;
    auto it = std::upper_bound(b, e, uniform);
    if (it == e) --it;
    return target_[it - cdf_.begin()];
}

double ChainModel::detailed_balance_error(std::span<const double> measures) const {
    if (measures.size() != states()) throw std::invalid_argument("measure vector does not match chain");
    double worst = 0.0;
    for (std::size_t i = 0; i < states(); ++i) {
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
            std::size_t j = target_[k];
            double lhs = measures[i] * rate_[i] * prob_[k];
            double rhs = measures[j] * rate_[j] * probability(j, i);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(lhs, rhs));
        }
    }
    return worst;
}

double ChainModel::max_row_sum_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < states(); ++i) {
        if (row_start_[i] == row_start_[i + 1]) continue;
        double s = 0.0;
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += prob_[k];
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

ChainModel build_chain(const Grid& grid, const PairSet& pairs, const KernelSpec& kernel) {
    return ChainModel::build(grid, pairs, kernel);
}

CrossingStats mean_crossing_time(const ChainModel& chain, std::span<const double> source_weights,
                                 std::span<const char> target, std::size_t n_paths,
                                 std::uint64_t max_steps, std::uint64_t seed,
                                 std::span<const RegionTag> tags) {
    const std::size_t n = chain.states();
    if (source_weights.size() != n || target.size() != n)
        throw std::invalid_argument("crossing time: source/target do not match chain");
    if (!tags.empty() && tags.size() != n) throw std::invalid_argument("crossing time: tags do not match chain");
    if (n_paths == 0) throw std::invalid_argument("crossing time needs at least one path");

    std::vector<std::uint32_t> src;
    std::vector<double> cdf;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (source_weights[i] > 0.0) {
            total += source_weights[i];
            src.push_back(static_cast<std::uint32_t>(i));
            cdf.push_back(total);
        }
    }
    if (src.empty()) throw std::invalid_argument("crossing time: source set is empty");
    if (std::none_of(target.begin(), target.end(), [](char c) { return c != 0; }))
        throw std::invalid_argument("crossing time: target set is empty");

    CrossingStats st;
    st.paths.resize(n_paths);
    std::vector<std::uint64_t> direct(n_paths, 0);
    parallel_blocks(n_paths, 64, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            SplitMix64 rng(derive_seed(seed, "walker", p));
            double u0 = rng.uniform() * total;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u0);
            if (it == cdf.end()) --it;
            std::size_t state = src[it - cdf.begin()];
            PathRecord rec;
            rec.path = p;
            while (!target[state]) {
                if (rec.steps >= max_steps || chain.isolated(state)) {
                    rec.censored = true;
                    break;
                }
                std::size_t nxt = chain.step(state, rng.uniform());
                if (!tags.empty()) {
                    RegionTag a = tags[state], b = tags[nxt];
                    if ((a == RegionTag::Minus && b == RegionTag::Plus) ||
                        (a == RegionTag::Plus && b == RegionTag::Minus))
                        ++direct[p];
                }
                state = nxt;
                ++rec.steps;
            }
            st.paths[p] = rec;
        }
    });

    double sum = 0.0, sum2 = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        st.direct_transitions += direct[p];
        if (st.paths[p].censored) {
            ++st.censored;
            continue;
        }
        ++st.completed;
        double s = static_cast<double>(st.paths[p].steps);
        sum += s;
        sum2 += s * s;
    }
    if (st.completed == 0) throw std::runtime_error("crossing time: no path reached the target");
    if (st.censored > 0.05 * n_paths)
        throw std::runtime_error("crossing time: " + std::to_string(st.censored) + " of " +
                                 std::to_string(n_paths) + " paths censored (above 5%)");
    const double c = static_cast<double>(st.completed);
    st.mean = sum / c;
    double var = c > 1 ? std::max(0.0, (sum2 - c * st.mean * st.mean) / (c - 1.0)) : 0.0;
    st.ci95 = 1.96 * std::sqrt(var / c);
    return st;
}

CrossingStats dumbbell_crossing_time(const Grid& grid, const ChainModel& chain, std::size_t n_paths,
                                     std::uint64_t max_steps, std::uint64_t seed) {
    if (!grid.has_tags()) throw std::invalid_argument("crossing time needs dumbbell region tags");
    std::vector<double> w(grid.size(), 0.0);
    std::vector<char> target(grid.size(), 0);
    std::vector<RegionTag> tags(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Cell& c = grid.cells[i];
        tags[i] = c.tag;
        if (c.tag == RegionTag::Minus && c.center.x < -0.5 * grid.R) w[i] = c.measure;
        target[i] = c.tag == RegionTag::Plus;
    }
    return mean_crossing_time(chain, w, target, n_paths, max_steps, seed, tags);
}

CrossingScaling crossing_scaling(DumbbellVariant variant, const KernelSpec& kernel,
                                 const std::vector<double>& R_list, std::size_t n_paths,
                                 std::uint64_t seed, std::uint64_t max_steps, double h) {
    if (R_list.size() < 3) throw std::invalid_argument("crossing scaling needs at least 3 radii");
    ScalingSetup setup;
    setup.variant = variant;
    setup.kernel = kernel;
    setup.p = kernel.p;
    setup.R = R_list;
    CrossingScaling out;
    out.report.predicted = predicted_exponent(setup).first;
    out.report.tolerance = 0.5;
    out.report.domain = variant == DumbbellVariant::Straight ? "straight-dumbbell" : "curved-dumbbell";
    out.report.kernel = to_string(kernel);
    out.report.method = "walk";
    out.report.p = kernel.p;
    out.report.s = kernel.s;
    const DomainSpec domain = make_dumbbell(variant);
    std::vector<std::pair<double, double>> samples;
    for (double R : R_list) {
        Grid grid = build_grid(domain, domain.dumbbell->anchor, R, h, 1);
        ChainModel chain = build_chain(grid, visibility_pairs(grid), kernel);
        CrossingStats st = dumbbell_crossing_time(grid, chain, n_paths, max_steps, seed);
        out.report.samples.push_back({R, grid.size(), st.mean, 0.0});
        samples.emplace_back(R, st.mean);
        out.stats.push_back(std::move(st));
    }
    out.report.fit = fit_power_law(samples);
    out.report.pass = std::abs(out.report.fit.exponent - out.report.predicted) <= out.report.tolerance;
    return out;
}

void write_paths_csv(std::ostream& os, const CrossingStats& stats) {
    os << "path,steps,censored\n";
    for (const auto& p : stats.paths) os << p.path << ',' << p.steps << ',' << (p.censored ? 1 : 0) << '\n';
}

}  // namespace nlvis
