#include "nlvis/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "nlvis/random.hpp"

namespace nlvis {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

double quadratic_energy(const std::vector<WeightedPair>& edges, const Eigen::VectorXd& y) {
    double s = 0.0;
    for (const auto& e : edges) {
        double d = y[e.i] - y[e.j];
        s += e.w * d * d;
    }
    return s;
}

void check_eigen_form(const FormOperator& form) {
    if (form.mode() == FormMode::Dyda)
        throw std::invalid_argument("Poincare constant is computed for vis, cen or local forms");
    if (form.p() != 2.0) throw std::invalid_argument("Poincare constant needs a p = 2 form");
    if (!form.materialized()) throw std::invalid_argument("Poincare constant needs an assembled form");
}

}  // namespace

PoincareResult poincare_constant_l2(const FormOperator& form, const EigenOptions& opts) {
    check_eigen_form(form);
    const Grid& grid = form.grid();
    const std::size_t n = grid.size();
    if (n < 2) throw std::invalid_argument("Poincare constant needs at least two cells");
    const auto edges = quadratic_coefficients(form);

    PoincareResult res;
    UnionFind uf(n);
    for (const auto& e : edges) uf.unite(e.i, e.j);
    res.components = 0;
    for (std::size_t i = 0; i < n; ++i) res.components += uf.find(i) == i;
    if (res.components > 1) {
        res.disconnected = true;
        res.lambda1 = 0.0;
        res.constant = std::numeric_limits<double>::infinity();
        return res;
    }

    Eigen::VectorXd m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = grid.cells[i].measure;
    const double mass = m.sum();

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    for (const auto& e : edges) {
        diag[e.i] += e.w;
        diag[e.j] += e.w;
    }
    // Small shift relative to the operator scale keeps L + sigma M definite.
    const double sigma = 1e-6 * (diag.array() / m.array()).mean();

    auto project = [&](Eigen::VectorXd& x) { x.array() -= m.dot(x) / mass; };
    auto mnorm = [&](const Eigen::VectorXd& x) { return std::sqrt((m.array() * x.array().square()).sum()); };

    Eigen::VectorXd x(n);
    SplitMix64 rng(opts.seed);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    project(x);
    x /= mnorm(x);

    const bool dense = !form.local() && n <= opts.dense_limit;
    Eigen::MatrixXd K;
    Eigen::LDLT<Eigen::MatrixXd> dense_solver;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sparse_solver;
    if (dense) {
        K = Eigen::MatrixXd::Zero(n, n);
        for (const auto& e : edges) {
            K(e.i, e.j) -= e.w;
            K(e.j, e.i) -= e.w;
        }
        for (std::size_t i = 0; i < n; ++i) K(i, i) = diag[i] + sigma * m[i];
        dense_solver.compute(K);
        K.resize(0, 0);
        if (dense_solver.info() != Eigen::Success) throw NonConvergenceError("dense factorization failed");
    } else {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(2 * edges.size() + n);
        for (const auto& e : edges) {
            trips.emplace_back(e.i, e.j, -e.w);
            trips.emplace_back(e.j, e.i, -e.w);
        }
        for (std::size_t i = 0; i < n; ++i) trips.emplace_back(i, i, diag[i] + sigma * m[i]);
        Eigen::SparseMatrix<double> S(n, n);
        S.setFromTriplets(trips.begin(), trips.end());
        sparse_solver.compute(S);
        if (sparse_solver.info() != Eigen::Success) throw NonConvergenceError("sparse factorization failed");
    }

    double rho = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::VectorXd rhs = m.cwiseProduct(x);
        Eigen::VectorXd y = dense ? Eigen::VectorXd(dense_solver.solve(rhs))
                                  : Eigen::VectorXd(sparse_solver.solve(rhs));
        project(y);
        double ym = mnorm(y);
        if (!(ym > 0.0) || !std::isfinite(ym)) throw NonConvergenceError("inverse iteration collapsed");
        x = y / ym;
        double next = quadratic_energy(edges, x);
        bool done = std::abs(next - rho) <= opts.tolerance * std::abs(next);
        rho = next;
        if (done) {
            res.lambda1 = rho;
            res.constant = 1.0 / rho;
            res.iterations = it;
            return res;
        }
    }
    throw NonConvergenceError("inverse iteration did not converge in " +
                              std::to_string(opts.max_iterations) + " iterations");
}

double poincare_constant_dense(const FormOperator& form) {
    check_eigen_form(form);
    const Grid& grid = form.grid();
    const std::size_t n = grid.size();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : quadratic_coefficients(form)) {
        L(e.i, e.j) -= e.w;
        L(e.j, e.i) -= e.w;
        L(e.i, e.i) += e.w;
        L(e.j, e.j) += e.w;
    }
    Eigen::VectorXd s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 1.0 / std::sqrt(grid.cells[i].measure);
    Eigen::MatrixXd A = s.asDiagonal() * L * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    double lambda1 = es.eigenvalues()[1];
    return lambda1 > 0.0 ? 1.0 / lambda1 : std::numeric_limits<double>::infinity();
}

std::vector<double> witness_step_function(const Grid& grid) {
    if (!grid.has_tags()) throw std::invalid_argument("witness needs dumbbell region tags");
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Cell& c = grid.cells[i];
        switch (c.tag) {
            case RegionTag::Minus: u[i] = -1.0; break;
            case RegionTag::Plus: u[i] = 1.0; break;
            default: u[i] = std::clamp(c.center.x, -1.0, 1.0); break;
        }
    }
    return u;
}

std::vector<int> witness_classes(const Grid& grid) {
    std::vector<int> cls(grid.size(), -1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.cells[i].tag == RegionTag::Minus) cls[i] = 0;
        if (grid.cells[i].tag == RegionTag::Plus) cls[i] = 1;
    }
    return cls;
}

namespace {

double deviation(const Grid& grid, std::span<const double> u, double p) {
    double mean = cell_mean(grid, u);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double d = std::abs(u[i] - mean);
        s += grid.cells[i].measure * (p == 2.0 ? d * d : std::pow(d, p));
    }
    return s;
}

double checked_ratio(double num, double den) {
    if (!(den > 0.0))
        throw ZeroEnergyError("zero energy: u is constant on every pair-connected component");
    return num / den;
}

}  // namespace

double rayleigh_ratio(const FormOperator& form, std::span<const double> u, double p) {
    return checked_ratio(deviation(form.grid(), u, p), energy(form, u, p));
}

double rayleigh_ratio(const FormOperator& form, std::span<const double> u, double p,
                      std::span<const int> classes) {
    return checked_ratio(deviation(form.grid(), u, p), energy_classes(form, u, classes, p));
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 3) throw std::invalid_argument("power-law fit needs at least 3 samples");
    const double n = static_cast<double>(samples.size());
    double sx = 0, sy = 0;
    for (auto [R, v] : samples) {
        if (!(R > 0.0) || !(v > 0.0)) throw std::invalid_argument("power-law fit needs positive samples");
        sx += std::log(R);
        sy += std::log(v);
    }
    double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
    for (auto [R, v] : samples) {
        double dx = std::log(R) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(v) - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("power-law fit needs distinct R values");
    PowerLawFit f;
    f.exponent = sxy / sxx;
    double intercept = my - f.exponent * mx;
    f.prefactor = std::exp(intercept);
    double ssr = 0.0;
    for (auto [R, v] : samples) {
        double r = std::log(v) - (intercept + f.exponent * std::log(R));
        ssr += r * r;
    }
    f.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
    return f;
}

std::string to_string(ScalingMethod m) { return m == ScalingMethod::Witness ? "witness" : "eigen"; }

std::pair<double, bool> predicted_exponent(const ScalingSetup& setup) {
    constexpr double d = kDim;
    const double p = setup.p;
    if (!(p >= 1.0)) throw std::invalid_argument("scaling needs p >= 1");
    if (!setup.kernel) {
        if (p < d) return {d, false};
        if (p == d) return {d, true};
        throw std::invalid_argument("local scaling is tabulated for p <= d only");
    }
    const KernelSpec& k = *setup.kernel;
    if (k.family != KernelFamily::Power)
        throw std::invalid_argument("nonlocal scaling needs a power kernel");
    if (k.p != p) throw std::invalid_argument("kernel p and energy p differ");
    const double s = k.s;
    if (!(p < d / s)) throw std::invalid_argument("nonlocal scaling needs 1 <= p < d/s");
    if (s * p == 1.0) throw std::invalid_argument("s = 1/p is not covered by the case table");
    if (setup.variant == DumbbellVariant::Curved || s * p > 1.0) return {d, false};
    return {d - 1.0 + s * p, false};
}

ScalingReport scaling_experiment(const ScalingSetup& setup) {
    auto [predicted, log_corrected] = predicted_exponent(setup);
    if (setup.R.size() < 3) throw std::invalid_argument("scaling needs at least 3 radii");
    if (!std::is_sorted(setup.R.begin(), setup.R.end()))
        throw std::invalid_argument("scaling radii must be ascending");
    if (!(setup.h > 0.0 && setup.h <= max_corridor_h(setup.tube_radius)))
        throw std::invalid_argument("h must resolve the corridor with at least 4 cells");
    if (setup.method == ScalingMethod::Eigen && setup.p != 2.0)
        throw std::invalid_argument("eigen method needs p = 2");
    if (setup.kernel && setup.mode == FormMode::Local)
        throw std::invalid_argument("a kernel was given with the local mode");

    ScalingReport rep;
    rep.predicted = setup.predicted_override.value_or(predicted);
    rep.tolerance = setup.tolerance_override.value_or(setup.method == ScalingMethod::Witness ? 0.15 : 0.3);
    rep.log_corrected = log_corrected;
    rep.domain = setup.variant == DumbbellVariant::Straight ? "straight-dumbbell" : "curved-dumbbell";
    rep.kernel = setup.kernel ? to_string(*setup.kernel) : "local";
    rep.method = to_string(setup.method);
    rep.p = setup.p;
    rep.s = setup.kernel ? setup.kernel->s : 0.0;

    const DomainSpec domain = make_dumbbell(setup.variant, setup.tube_radius);
    std::vector<std::pair<double, double>> fit_samples;
    for (double R : setup.R) {
        auto t0 = std::chrono::steady_clock::now();
        Grid grid = build_grid(domain, domain.dumbbell->anchor, R, setup.h, 1);
        double value = 0.0;
        if (setup.method == ScalingMethod::Witness) {
            auto u = witness_step_function(grid);
            auto cls = witness_classes(grid);
            FormOperator form = setup.kernel
                                    ? FormOperator::matrix_free(grid, *setup.kernel, setup.mode, setup.p)
                                    : FormOperator::assemble_local(grid, setup.p);
            value = rayleigh_ratio(form, u, setup.p, cls);
        } else {
            FormOperator form =
                setup.kernel ? FormOperator::assemble(grid, visibility_pairs(grid), *setup.kernel,
                                                      setup.mode, setup.p)
                             : FormOperator::assemble_local(grid, setup.p);
            value = poincare_constant_l2(form).constant;
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.samples.push_back({R, grid.size(), value, secs});
        double fitted = log_corrected ? value / std::pow(std::log(R), setup.p - 1.0) : value;
        fit_samples.emplace_back(R, fitted);
    }
    rep.fit = fit_power_law(fit_samples);
    rep.pass = std::abs(rep.fit.exponent - rep.predicted) <= rep.tolerance;
    return rep;
}

}  // namespace nlvis
