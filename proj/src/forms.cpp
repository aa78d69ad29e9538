#include "nlvis/forms.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>
#include <unordered_map>

#include "nlvis/parallel.hpp"

namespace nlvis {

std::string to_string(FormMode mode) {
    switch (mode) {
        case FormMode::Visible: return "vis";
        case FormMode::Censored: return "cen";
        case FormMode::Dyda: return "dyda";
        case FormMode::Local: return "local";
    }
    return "";
}

FormMode parse_form_mode(std::string_view text) {
    if (text == "vis") return FormMode::Visible;
    if (text == "cen") return FormMode::Censored;
    if (text == "dyda") return FormMode::Dyda;
    if (text == "local") return FormMode::Local;
    throw std::invalid_argument("unknown form mode '" + std::string(text) + "'");
}

namespace {

constexpr std::size_t kRowBlock = 64;

inline double power_abs(double d, double p) {
    d = std::abs(d);
    if (p == 2.0) return d * d;
    if (p == 1.0) return d;
    return std::pow(d, p);
}

inline double raw_weight(const Grid& g, const KernelSpec& k, std::size_t i, std::size_t j) {
    double r = norm(g.cells[i].center - g.cells[j].center);
    return eval_kernel(k, r) * g.cells[i].measure * g.cells[j].measure;
}

std::vector<double> boundary_distances(const Grid& g) {
    if (!g.domain) throw std::invalid_argument("dyda form needs boundary distances (grid has no domain)");
    std::vector<double> delta(g.size());
    parallel_blocks(g.size(), 256, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) delta[i] = boundary_distance(*g.domain, g.cells[i].center);
    });
    return delta;
}

void check_p(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("energy exponent p must be at least 1");
}

}  // namespace

void FormOperator::build_rows() {
    const std::size_t n = grid_->size();
    row_start_.assign(n + 1, 0);
    for (const auto& e : pairs_) ++row_start_[e.i + 1];
    for (std::size_t i = 0; i < n; ++i) row_start_[i + 1] += row_start_[i];
}

FormOperator FormOperator::assemble(const Grid& grid, const PairSet& pairs,
                                    const KernelSpec& kernel, FormMode mode, double p) {
    if (mode == FormMode::Local) return assemble_local(grid, p);
    check_p(p);
    kernel.validate();
    if (pairs.cells() != grid.size()) throw std::invalid_argument("pair set does not match grid");
    FormOperator f;
    f.grid_ = std::make_shared<const Grid>(grid);
    f.kernel_ = kernel;
    f.mode_ = mode;
    f.p_ = p;
    f.materialized_ = true;
    if (mode == FormMode::Dyda) f.delta_ = boundary_distances(grid);

    const std::size_t n = grid.size();
    std::vector<std::vector<WeightedPair>> rows(n);
    parallel_blocks(n, 16, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            auto& row = rows[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                if (mode != FormMode::Censored && !pairs.visible(i, j)) continue;
                if (mode == FormMode::Dyda) {
                    double r = norm(grid.cells[i].center - grid.cells[j].center);
                    if (!(r < 0.5 * std::max(f.delta_[i], f.delta_[j]))) continue;
                }
                double w = raw_weight(grid, kernel, i, j);
                if (w > 0.0)
                    row.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w});
            }
        }
    });
    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    f.pairs_.reserve(total);
    for (auto& r : rows) {
        f.pairs_.insert(f.pairs_.end(), r.begin(), r.end());
        std::vector<WeightedPair>().swap(r);
    }
    f.build_rows();
    return f;
}

FormOperator FormOperator::assemble_local(const Grid& grid, double p) {
    check_p(p);
    FormOperator f;
    f.grid_ = std::make_shared<const Grid>(grid);
    f.mode_ = FormMode::Local;
    f.p_ = p;
    f.materialized_ = true;
    auto key = [](int ix, int iy) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
               static_cast<std::uint32_t>(iy);
    };
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    index.reserve(grid.size() * 2);
    for (std::size_t i = 0; i < grid.size(); ++i)
        index.emplace(key(grid.cells[i].ix, grid.cells[i].iy), static_cast<std::uint32_t>(i));
    const double h2 = grid.h * grid.h;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Cell& c = grid.cells[i];
        std::vector<WeightedPair> row;
        for (auto [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
            auto it = index.find(key(c.ix + dx, c.iy + dy));
            if (it != index.end())
                row.push_back({static_cast<std::uint32_t>(i), it->second, c.measure / h2});
        }
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.j < b.j; });
        f.pairs_.insert(f.pairs_.end(), row.begin(), row.end());
    }
    f.build_rows();
    return f;
}

FormOperator FormOperator::matrix_free(const Grid& grid, const KernelSpec& kernel, FormMode mode,
                                       double p) {
    if (mode == FormMode::Local) return assemble_local(grid, p);
    check_p(p);
    kernel.validate();
    FormOperator f;
    f.grid_ = std::make_shared<const Grid>(grid);
    f.kernel_ = kernel;
    f.mode_ = mode;
    f.p_ = p;
    f.materialized_ = false;
    if (mode == FormMode::Dyda) f.delta_ = boundary_distances(grid);
    return f;
}

const std::vector<WeightedPair>& FormOperator::pairs() const {
    if (!materialized_) throw std::logic_error("form is matrix-free; no pair list");
    return pairs_;
}

std::span<const WeightedPair> FormOperator::row(std::size_t i) const {
    if (!materialized_) throw std::logic_error("form is matrix-free; no pair list");
    return {pairs_.data() + row_start_[i], pairs_.data() + row_start_[i + 1]};
}

double FormOperator::weight(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    if (materialized_) {
        auto r = row(i);
        auto it = std::lower_bound(r.begin(), r.end(), j,
                                   [](const WeightedPair& e, std::size_t v) { return e.j < v; });
        return it != r.end() && it->j == j ? it->w : 0.0;
    }
    const Grid& g = *grid_;
    if (mode_ == FormMode::Dyda) {
        double r = norm(g.cells[i].center - g.cells[j].center);
        if (!(r < 0.5 * std::max(delta_[i], delta_[j]))) return 0.0;
    }
    if (mode_ != FormMode::Censored && g.domain &&
        !segment_inside_unchecked(*g.domain, g.cells[i].center, g.cells[j].center))
        return 0.0;
    return raw_weight(g, kernel_, i, j) * scale_;
}

bool FormOperator::includes(std::size_t i, std::size_t j) const { return weight(i, j) > 0.0; }

FormOperator FormOperator::scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scale must be positive");
    FormOperator f = *this;
    f.scale_ *= c;
    for (auto& e : f.pairs_) e.w *= c;
    return f;
}

FormOperator FormOperator::without(const std::function<bool(const WeightedPair&)>& drop) const {
    FormOperator f = *this;
    f.pairs_.clear();
    for (const auto& e : pairs()) if (!drop(e)) f.pairs_.push_back(e);
    f.build_rows();
    return f;
}

namespace {

double local_energy(const FormOperator& form, std::span<const double> u, double p) {
    const Grid& g = form.grid();
    const double h2 = g.h * g.h;
    return blocked_sum(g.size(), kRowBlock, [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            double g2 = 0.0;
            for (const auto& pr : form.row(i)) {
                double d = u[pr.j] - u[pr.i];
                g2 += d * d;
            }
            if (g2 == 0.0) continue;
            double m = g.cells[i].measure;
            s += p == 2.0 ? m * (g2 / h2) : m * std::pow(g2 / h2, 0.5 * p);
        }
        return s;
    });
}

// Row sums over j > i. next_j lists, for row i, the candidates in ascending order.
template <class Candidates>
double nonlocal_energy(const FormOperator& form, std::span<const double> u, double p,
                       Candidates&& candidates) {
    const std::size_t n = form.grid().size();
    if (form.materialized()) {
        return blocked_sum(n, kRowBlock, [&](std::size_t b, std::size_t e) {
            double s = 0.0;
            for (std::size_t i = b; i < e; ++i)
                for (const auto& pr : form.row(i))
                    if (candidates.keep(i, pr.j)) s += 2.0 * pr.w * power_abs(u[i] - u[pr.j], p);
            return s;
        });
    }
    return blocked_sum(n, kRowBlock, [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            candidates.for_each(i, [&](std::size_t j) {
                double w = form.weight(i, j);
                if (w > 0.0) s += 2.0 * w * power_abs(u[i] - u[j], p);
            });
        }
        return s;
    });
}

struct AllPairs {
    std::size_t n;
    bool keep(std::size_t, std::size_t) const { return true; }
    template <class F>
    void for_each(std::size_t i, F&& f) const {
        for (std::size_t j = i + 1; j < n; ++j) f(j);
    }
};

struct ClassPairs {
    std::span<const int> cls;
    const std::vector<std::vector<std::uint32_t>>* outside;  // per class: indices not in it
    bool keep(std::size_t i, std::size_t j) const { return cls[i] < 0 || cls[i] != cls[j]; }
    template <class F>
    void for_each(std::size_t i, F&& f) const {
        if (cls[i] < 0 || !outside) {
            for (std::size_t j = i + 1; j < cls.size(); ++j)
                if (keep(i, j)) f(j);
            return;
        }
        const auto& list = (*outside)[cls[i]];
        for (auto it = std::upper_bound(list.begin(), list.end(), static_cast<std::uint32_t>(i));
             it != list.end(); ++it)
            f(*it);
    }
};

}  // namespace

double energy(const FormOperator& form, std::span<const double> u, double p) {
    if (u.size() != form.grid().size()) throw std::invalid_argument("energy: u does not match grid");
    check_p(p);
    if (form.local()) return local_energy(form, u, p);
    return nonlocal_energy(form, u, p, AllPairs{u.size()});
}

double energy(const FormOperator& form, std::span<const double> u) { return energy(form, u, form.p()); }

double energy_classes(const FormOperator& form, std::span<const double> u,
                      std::span<const int> classes, double p) {
    const std::size_t n = form.grid().size();
    if (u.size() != n || classes.size() != n)
        throw std::invalid_argument("energy_classes: size mismatch");
    check_p(p);
    int n_classes = 0;
    for (int c : classes) n_classes = std::max(n_classes, c + 1);
    std::vector<double> value(n_classes, 0.0);
    std::vector<char> seen(n_classes, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int c = classes[i];
        if (c < 0) continue;
        if (!seen[c]) {
            seen[c] = 1;
            value[c] = u[i];
        } else if (u[i] != value[c]) {
            throw std::invalid_argument("energy_classes: u is not constant on class " + std::to_string(c));
        }
    }
    if (form.local()) return local_energy(form, u, p);

    std::vector<std::vector<std::uint32_t>> outside;
    bool use_lists = n_classes > 0 && n_classes <= 16;
    if (use_lists) {
        outside.resize(n_classes);
        for (int c = 0; c < n_classes; ++c)
            for (std::size_t j = 0; j < n; ++j)
                if (classes[j] != c) outside[c].push_back(static_cast<std::uint32_t>(j));
    }
    return nonlocal_energy(form, u, p, ClassPairs{classes, use_lists ? &outside : nullptr});
}

double energy_sparse(const FormOperator& form, std::span<const double> u,
                     std::span<const std::uint32_t> support, double p) {
    const std::size_t n = form.grid().size();
    if (u.size() != n) throw std::invalid_argument("energy_sparse: u does not match grid");
    std::vector<int> cls(n, 0);
    for (auto i : support) {
        if (i >= n) throw std::invalid_argument("energy_sparse: support index out of range");
        cls[i] = -1;
    }
    bool have = false;
    double rest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] < 0) continue;
        if (!have) {
            rest = u[i];
            have = true;
        } else if (u[i] != rest) {
            throw std::invalid_argument("energy_sparse: u is not constant outside the support");
        }
    }
    return energy_classes(form, u, cls, p);
}

std::vector<WeightedPair> quadratic_coefficients(const FormOperator& form) {
    std::vector<WeightedPair> out = form.pairs();
    if (!form.local())
        for (auto& e : out) e.w *= 2.0;
    return out;
}

void write_form_csv(std::ostream& os, const FormOperator& form) {
    os << "i,j,w\n" << std::setprecision(17);
    for (const auto& e : form.pairs()) os << e.i << ',' << e.j << ',' << e.w << '\n';
}

CounterexampleResult counterexample_ratio(int n, int resolution_factor) {
    if (n < 2) throw std::invalid_argument("counterexample needs n >= 2");
    if (resolution_factor < 8)
        throw std::invalid_argument("counterexample needs h <= 1/(8n) (resolution factor >= 8)");
    const double h = 1.0 / (static_cast<double>(resolution_factor) * n);
    Grid grid = build_grid(make_box({0.0, 0.0}, {1.0, 1.0}), h, 1);
    const KernelSpec kernel = KernelSpec::constant();

    std::vector<double> u(grid.size(), 0.0);
    std::vector<std::uint32_t> support;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec2 c = grid.cells[i].center;
        if (c.x + c.y < 1.0 / n) {
            u[i] = 1.0;
            support.push_back(static_cast<std::uint32_t>(i));
        }
    }
    auto dyda = FormOperator::matrix_free(grid, kernel, FormMode::Dyda, 2.0);
    auto cen = FormOperator::matrix_free(grid, kernel, FormMode::Censored, 2.0);

    CounterexampleResult r;
    r.n = n;
    r.resolution_factor = resolution_factor;
    r.cells = grid.size();
    r.support = support.size();
    r.numerator = energy_sparse(dyda, u, support, 2.0);
    r.denominator = energy_sparse(cen, u, support, 2.0);
    r.ratio = r.numerator / r.denominator;
    return r;
}

}  // namespace nlvis
