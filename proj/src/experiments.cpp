#include "nlvis/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "nlvis/forms.hpp"
#include "nlvis/mesh.hpp"
#include "nlvis/random.hpp"
#include "nlvis/spectral.hpp"
#include "nlvis/walker.hpp"
#include "nlvis/whitney.hpp"

namespace nlvis {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

const std::string& ExperimentResult::get(const std::string& key) const {
    for (const auto& [k, v] : summary)
        if (k == key) return v;
    throw std::out_of_range("summary has no key '" + key + "'");
}

double ExperimentResult::number(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "inf") return INFINITY;
    return std::stod(v);
}

ExperimentConfig with_defaults(const ExperimentConfig& in) {
    ExperimentConfig cfg = in;
    const std::string name = cfg.get_string("experiment.name");
    auto def = [&](const char* key, const std::string& value) {
        if (!cfg.has(key)) cfg.set(key, value);
    };
    def("experiment.seed", "20240611");
    def("experiment.output", "out/" + name);
    def("experiment.timing", "false");
    if (name == "counterexample") {
        def("counterexample.n", "4,8,16,32");
        def("counterexample.resolution_factor", "8");
    } else if (name == "scaling-nonlocal") {
        def("domain.spec", "straight-dumbbell");
        def("domain.R", "8,16,32,64");
        def("domain.h", "0.5");
        def("experiment.method", "witness");
        def("experiment.mode", "vis");
        if (!cfg.has("kernel.spec")) {
            def("kernel.s", "0.25");
            def("kernel.p", "2");
        }
    } else if (name == "scaling-local") {
        def("domain.spec", "straight-dumbbell");
        def("domain.R", "8,16,32");
        def("domain.h", "0.5");
        def("experiment.method", "witness");
        def("kernel.p", "1");
    } else if (name == "comparability") {
        def("domain.spec", "annulus:0.3333333333333333,1");
        def("domain.h", "0.0625");
        def("comparability.samples", "200");
        if (!cfg.has("kernel.spec")) {
            def("kernel.s", "0.5");
            def("kernel.p", "2");
        }
    } else if (name == "whitney-audit") {
        def("domain.spec", "annulus:0.3333333333333333,1");
        def("domain.R", "8");
        def("whitney.epsilon", "0.05");
        def("whitney.max_level", "8");
        def("whitney.pairs", "100");
    } else if (name == "walk") {
        def("domain.spec", "curved-dumbbell");
        def("domain.R", "16");
        def("domain.h", "0.5");
        def("walk.paths", "1000");
        def("walk.max_steps", "1000000");
        if (!cfg.has("kernel.spec")) {
            def("kernel.s", "0.25");
            def("kernel.p", "2");
        }
    } else if (name == "check-domain") {
        def("domain.spec", "straight-dumbbell");
        def("domain.R", "8,16,32");
    }
    return cfg;
}

KernelSpec resolved_kernel(const ExperimentConfig& cfg) {
    if (cfg.has("kernel.spec")) return parse_kernel(cfg.get_string("kernel.spec"));
    return KernelSpec::power(cfg.get_double("kernel.s", 0.25), cfg.get_double("kernel.p", 2.0));
}

std::vector<double> random_smooth_function(const std::vector<Vec2>& points, const Box& bounds,
                                           std::uint64_t seed, std::size_t index) {
    SplitMix64 rng(derive_seed(seed, "random-u", index));
    const Vec2 c{0.5 * (bounds.lo.x + bounds.hi.x), 0.5 * (bounds.lo.y + bounds.hi.y)};
    const double scale = 2.0 / std::max(bounds.hi.x - bounds.lo.x, bounds.hi.y - bounds.lo.y);
    double lin_x = rng.uniform(-1.0, 1.0), lin_y = rng.uniform(-1.0, 1.0);
    double amp[3], phase[3];
    for (int k = 0; k < 3; ++k) {
        amp[k] = rng.uniform(-1.0, 1.0);
        phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    std::vector<double> u(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        Vec2 q = (points[i] - c) * scale;
        double theta = std::atan2(q.y, q.x);
        double v = lin_x * q.x + lin_y * q.y;
        for (int k = 0; k < 3; ++k) v += amp[k] * std::cos((k + 1) * theta + phase[k]);
        u[i] = v;
    }
    return u;
}

ComparabilityResult comparability_check(const DomainSpec& domain, const KernelSpec& kernel, double h,
                                        std::size_t samples, std::uint64_t seed) {
    ComparabilityResult out;
    out.h = h;
    const Box bounds = domain.bounds();
    double maxima[2] = {0.0, 0.0};
    for (int level = 0; level < 2; ++level) {
        const double hl = level == 0 ? h : 0.5 * h;
        Grid grid = build_grid(domain, hl, 4);
        (level == 0 ? out.cells_coarse : out.cells_fine) = grid.size();
        PairSet pairs = visibility_pairs(grid);
        FormOperator cen = FormOperator::assemble(grid, pairs, kernel, FormMode::Censored, kernel.p);
        FormOperator vis = FormOperator::assemble(grid, pairs, kernel, FormMode::Visible, kernel.p);
        std::vector<Vec2> centers;
        centers.reserve(grid.size());
        for (const auto& c : grid.cells) centers.push_back(c.center);
        for (std::size_t k = 0; k < samples; ++k) {
            auto u = random_smooth_function(centers, bounds, seed, k);
            double ec = energy(cen, u, kernel.p);
            double ev = energy(vis, u, kernel.p);
            double r = ec / ev;
            out.rows.push_back({k, hl, ec, ev, r});
            maxima[level] = std::max(maxima[level], r);
        }
    }
    out.max_coarse = maxima[0];
    out.max_fine = maxima[1];
    out.drift = std::max(maxima[0], maxima[1]) / std::min(maxima[0], maxima[1]);
    return out;
}

namespace {

class Summary {
public:
    void add(const std::string& key, const std::string& value) { items_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, format_number(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
    void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
    std::vector<std::pair<std::string, std::string>> items_;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

std::string seconds_field(bool timing, double secs) { return timing ? format_number(secs) : std::string(); }

DumbbellVariant variant_of(const std::string& spec) {
    if (spec == "straight-dumbbell") return DumbbellVariant::Straight;
    if (spec == "curved-dumbbell") return DumbbellVariant::Curved;
    throw std::invalid_argument("domain '" + spec + "' is not a dumbbell");
}

void write_loglog_plot(const fs::path& dir, const std::string& title, const std::string& ylabel, int ycol,
                       const PowerLawFit* fit) {
    auto os = open_out(dir / "plot.gp");
    os << "set datafile separator ','\n"
       << "set logscale xy\n"
       << "set xlabel 'R'\n"
       << "set ylabel '" << ylabel << "'\n"
       << "set title '" << title << "'\n"
       << "set key top left\n";
    os << "plot 'report.csv' every ::1 using 1:" << ycol << " with linespoints title 'measured'";
    if (fit)
        os << ", " << format_number(fit->prefactor) << "*x**" << format_number(fit->exponent)
           << " with lines title 'fit'";
    os << "\n";
}

int run_counterexample(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum, std::ostream& log) {
    const bool timing = cfg.get_bool("experiment.timing", false);
    const int factor = static_cast<int>(cfg.get_int("counterexample.resolution_factor", 8));
    std::vector<CounterexampleResult> rows;
    auto os = open_out(dir / "report.csv");
    os << "n,h,cells,support,numerator,denominator,ratio,seconds\n";
    for (double nv : cfg.get_list("counterexample.n", {})) {
        const int n = static_cast<int>(nv);
        auto t0 = std::chrono::steady_clock::now();
        CounterexampleResult r = counterexample_ratio(n, factor);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log << "counterexample n=" << n << " cells=" << r.cells << " ratio=" << format_number(r.ratio) << "\n";
        os << n << ',' << format_number(1.0 / (factor * n)) << ',' << r.cells << ',' << r.support << ','
           << format_number(r.numerator) << ',' << format_number(r.denominator) << ',' << format_number(r.ratio)
           << ',' << seconds_field(timing, secs) << '\n';
        rows.push_back(r);
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < rows.size(); ++k) decreasing = decreasing && rows[k].ratio < rows[k - 1].ratio;
    double decay = rows.front().ratio / rows.back().ratio;
    double growth = rows.back().denominator * rows.back().n * rows.back().n /
                    (rows.front().denominator * rows.front().n * rows.front().n);
    sum.add("n_first", static_cast<std::size_t>(rows.front().n));
    sum.add("n_last", static_cast<std::size_t>(rows.back().n));
    sum.add("ratio_first", rows.front().ratio);
    sum.add("ratio_last", rows.back().ratio);
    sum.add("decay", decay);
    sum.add("denominator_growth", growth);
    sum.add("strictly_decreasing", decreasing);

    auto plot = open_out(dir / "plot.gp");
    plot << "set datafile separator ','\n"
         << "set logscale x\n"
         << "set xlabel 'n'\n"
         << "set ylabel 'ratio'\n"
         << "plot 'report.csv' every ::1 using 1:7 with linespoints title 'dyda / censored'\n";
    return decreasing ? kExitPass : kExitFail;
}

int run_scaling(const ExperimentConfig& cfg, bool local, const fs::path& dir, Summary& sum, std::ostream& log) {
    const bool timing = cfg.get_bool("experiment.timing", false);
    ScalingSetup setup;
    setup.variant = variant_of(cfg.get_string("domain.spec"));
    setup.R = cfg.get_list("domain.R", {});
    setup.h = cfg.get_double("domain.h", 0.5);
    const std::string method = cfg.get_string("experiment.method", "witness");
    setup.method = method == "eigen" ? ScalingMethod::Eigen : ScalingMethod::Witness;
    if (local) {
        setup.mode = FormMode::Local;
        setup.p = cfg.get_double("kernel.p", 1.0);
    } else {
        KernelSpec k = resolved_kernel(cfg);
        setup.kernel = k;
        setup.p = k.p;
        setup.mode = parse_form_mode(cfg.get_string("experiment.mode", "vis"));
        if (setup.mode == FormMode::Local) throw std::invalid_argument("scaling-nonlocal cannot use the local mode");
    }
    if (cfg.has("experiment.predicted")) setup.predicted_override = cfg.get_double("experiment.predicted", 0.0);

    ScalingReport rep = scaling_experiment(setup);
    auto os = open_out(dir / "report.csv");
    os << "R,N_cells,value,method,seconds\n";
    for (const auto& s : rep.samples) {
        log << rep.method << " R=" << format_number(s.R) << " cells=" << s.cells << " value=" << format_number(s.value)
            << "\n";
        os << format_number(s.R) << ',' << s.cells << ',' << format_number(s.value) << ',' << rep.method << ','
           << seconds_field(timing, s.seconds) << '\n';
    }
    sum.add("domain", rep.domain);
    sum.add("kernel", rep.kernel);
    sum.add("method", rep.method);
    sum.add("mode", to_string(setup.mode));
    sum.add("p", rep.p);
    sum.add("h", setup.h);
    sum.add("fitted", rep.fit.exponent);
    sum.add("stderr", rep.fit.stderr_);
    sum.add("prefactor", rep.fit.prefactor);
    sum.add("predicted", rep.predicted);
    sum.add("tolerance", rep.tolerance);
    sum.add("log_corrected", rep.log_corrected);
    for (std::size_t k = 0; k < rep.samples.size(); ++k)
        sum.add("value_R" + format_number(rep.samples[k].R), rep.samples[k].value);
    write_loglog_plot(dir, rep.domain + " " + rep.kernel + " " + rep.method,
                      setup.method == ScalingMethod::Eigen ? "C_P" : "Rayleigh ratio", 3,
                      rep.log_corrected ? nullptr : &rep.fit);
    return rep.pass ? kExitPass : kExitFail;
}

int run_comparability(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum, std::ostream& log) {
    const DomainSpec domain = domain_from_name(cfg.get_string("domain.spec"));
    const KernelSpec kernel = resolved_kernel(cfg);
    const double h = cfg.get_double("domain.h", 0.0625);
    const auto samples = static_cast<std::size_t>(cfg.get_int("comparability.samples", 200));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("experiment.seed", 0));
    ComparabilityResult r = comparability_check(domain, kernel, h, samples, seed);
    log << "comparability cells=" << r.cells_coarse << "/" << r.cells_fine << " max=" << format_number(r.max_coarse)
        << "/" << format_number(r.max_fine) << "\n";
    auto os = open_out(dir / "report.csv");
    os << "sample,h,censored,visible,ratio\n";
    for (const auto& row : r.rows)
        os << row.sample << ',' << format_number(row.h) << ',' << format_number(row.censored) << ','
           << format_number(row.visible) << ',' << format_number(row.ratio) << '\n';
    sum.add("domain", domain.name);
    sum.add("kernel", to_string(kernel));
    sum.add("h", h);
    sum.add("cells_h", r.cells_coarse);
    sum.add("cells_h2", r.cells_fine);
    sum.add("max_ratio_h", r.max_coarse);
    sum.add("max_ratio_h2", r.max_fine);
    sum.add("drift", r.drift);
    const bool pass = r.drift < 2.0 && std::max(r.max_coarse, r.max_fine) < 50.0;

    auto plot = open_out(dir / "plot.gp");
    plot << "set datafile separator ','\n"
         << "set xlabel 'sample'\n"
         << "set ylabel 'censored / visible'\n"
         << "plot 'report.csv' every ::1 using 1:($2==" << format_number(h)
         << "?$5:1/0) with points title 'h', 'report.csv' every ::1 using 1:($2==" << format_number(0.5 * h)
         << "?$5:1/0) with points title 'h/2'\n";
    return pass ? kExitPass : kExitFail;
}

int run_whitney(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum, std::ostream& log) {
    DomainSpec domain = domain_from_name(cfg.get_string("domain.spec"));
    if (domain.dumbbell) domain = clip_ball(domain, domain.dumbbell->anchor, cfg.get_list("domain.R", {8}).front());
    const int max_level = static_cast<int>(cfg.get_int("whitney.max_level", 8));
    const double eps = cfg.get_double("whitney.epsilon", 0.05);
    const auto n_pairs = static_cast<std::size_t>(cfg.get_int("whitney.pairs", 100));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("experiment.seed", 0));

    const WhitneyRegion region = whitney_region(domain);
    const WhitneyDecomposition dec = whitney_decompose(region, max_level);
    const WhitneyInvariants inv = check_whitney_invariants(dec, region);
    const double a = region.dim == 1 ? 1.0 : 2.0, b = a + 1.0;
    const WhitneySumStability stab = whitney_sum_stability(region, std::max(0, max_level - 1), a, b);
    log << "whitney " << domain.name << " cubes=" << dec.cubes.size()
        << " residual=" << format_number(inv.residual_fraction) << "\n";
    {
        auto os = open_out(dir / "cubes.csv");
        write_cubes_csv(os, dec);
    }

    std::size_t found = 0, valid = 0;
    {
        auto adj = cube_adjacency(dec);
        SplitMix64 rng(derive_seed(seed, "geometry-MC", 3));
        auto os = open_out(dir / "chains.csv");
        os << "pair,q,s,found,cubes,central,length,long_distance,expansions,strategy\n";
        const std::size_t nc = dec.cubes.size();
        for (std::size_t k = 0; k < n_pairs && nc >= 2; ++k) {
            std::size_t q = rng.next() % nc;
            std::size_t s = rng.next() % (nc - 1);
            if (s >= q) ++s;
            ChainSearchResult res = find_admissible_chain(dec, adj, q, s, eps);
            bool ok = res.chain.has_value();
            bool checked = ok && validate_chain(dec, *res.chain);
            found += ok;
            valid += checked;
            os << k << ',' << q << ',' << s << ',' << (ok ? 1 : 0) << ','
               << (ok ? res.chain->cubes.size() : 0) << ',' << (ok ? res.chain->central : 0) << ','
               << (ok ? format_number(res.chain->length) : "") << ','
               << format_number(long_distance(dec.cubes[q], dec.cubes[s], dec.dim)) << ',' << res.expansions
               << ',' << res.strategy << '\n';
        }
    }
    const bool pairs_ok = found == n_pairs && valid == n_pairs;
    const bool pass = inv.pass(0.02) && stab.stable && pairs_ok;

    auto os = open_out(dir / "report.csv");
    os << "check,value,threshold,pass\n";
    os << "residual_fraction," << format_number(inv.residual_fraction) << ",0.02," << (inv.residual_fraction < 0.02)
       << '\n';
    os << "sandwich_violations," << inv.sandwich_violations << ",0," << (inv.sandwich_violations == 0) << '\n';
    os << "overlap_violations," << inv.overlap_violations << ",0," << (inv.overlap_violations == 0) << '\n';
    os << "sum_sup_level" << std::max(0, max_level - 1) << ',' << format_number(stab.coarse) << ",,\n";
    os << "sum_sup_level" << std::max(0, max_level - 1) + 1 << ',' << format_number(stab.fine) << ",,\n";
    os << "sum_drift," << format_number(std::max(stab.coarse, stab.fine) / std::min(stab.coarse, stab.fine))
       << ",2," << stab.stable << '\n';
    os << "chains_found," << found << ',' << n_pairs << ',' << pairs_ok << '\n';

    sum.add("domain", domain.name);
    sum.add("max_level", static_cast<std::size_t>(max_level));
    sum.add("cubes", dec.cubes.size());
    sum.add("residual_fraction", inv.residual_fraction);
    sum.add("sandwich_violations", inv.sandwich_violations);
    sum.add("overlap_violations", inv.overlap_violations);
    sum.add("sum_coarse", stab.coarse);
    sum.add("sum_fine", stab.fine);
    sum.add("sum_stable", stab.stable);
    sum.add("epsilon", eps);
    sum.add("pairs", n_pairs);
    sum.add("chains_found", found);
    sum.add("chains_valid", valid);

    auto plot = open_out(dir / "plot.gp");
    plot << "set datafile separator ','\n"
         << "set size ratio -1\n"
         << "set style fill empty\n"
         << "plot 'cubes.csv' every ::1 using ($4+$6/2):($5+$6/2):($6/2):($6/2) with boxxyerror notitle\n";
    return pass ? kExitPass : kExitFail;
}

int run_walk(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum, std::ostream& log) {
    const bool timing = cfg.get_bool("experiment.timing", false);
    const std::string spec = cfg.get_string("domain.spec");
    const DomainSpec domain = make_dumbbell(variant_of(spec));
    const KernelSpec kernel = resolved_kernel(cfg);
    const double h = cfg.get_double("domain.h", 0.5);
    const auto paths = static_cast<std::size_t>(cfg.get_int("walk.paths", 1000));
    const auto max_steps = static_cast<std::uint64_t>(cfg.get_int("walk.max_steps", 1000000));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("experiment.seed", 0));
    const auto R_list = cfg.get_list("domain.R", {16});

    auto os = open_out(dir / "report.csv");
    os << "R,N_cells,mean,ci95,completed,censored,direct_transitions,seconds\n";
    std::vector<std::pair<double, double>> samples;
    std::uint64_t direct = 0;
    for (double R : R_list) {
        auto t0 = std::chrono::steady_clock::now();
        Grid grid = build_grid(domain, domain.dumbbell->anchor, R, h, 1);
        ChainModel chain = build_chain(grid, visibility_pairs(grid), kernel);
        CrossingStats st = dumbbell_crossing_time(grid, chain, paths, max_steps, seed);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log << "walk " << spec << " R=" << format_number(R) << " mean=" << format_number(st.mean) << " +- "
            << format_number(st.ci95) << "\n";
        os << format_number(R) << ',' << grid.size() << ',' << format_number(st.mean) << ','
           << format_number(st.ci95) << ',' << st.completed << ',' << st.censored << ',' << st.direct_transitions
           << ',' << seconds_field(timing, secs) << '\n';
        auto pos = open_out(dir / ("paths_R" + format_number(R) + ".csv"));
        write_paths_csv(pos, st);
        const std::string tag = "_R" + format_number(R);
        sum.add("mean" + tag, st.mean);
        sum.add("ci95" + tag, st.ci95);
        sum.add("censored" + tag, st.censored);
        sum.add("direct" + tag, static_cast<std::size_t>(st.direct_transitions));
        direct += st.direct_transitions;
        samples.emplace_back(R, st.mean);
    }
    sum.add("domain", spec);
    sum.add("kernel", to_string(kernel));
    sum.add("paths", paths);
    sum.add("direct_transitions", static_cast<std::size_t>(direct));
    PowerLawFit fit;
    if (samples.size() >= 3) {
        fit = fit_power_law(samples);
        sum.add("fitted", fit.exponent);
        sum.add("stderr", fit.stderr_);
    }
    write_loglog_plot(dir, spec + " crossing time", "mean steps", 3, samples.size() >= 3 ? &fit : nullptr);
    return kExitPass;
}

int run_check_domain(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum, std::ostream& log) {
    const DomainSpec domain = domain_from_name(cfg.get_string("domain.spec"));
    const auto R_list = cfg.get_list("domain.R", {8, 16, 32});
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("experiment.seed", 0));
    bool pass = true;

    auto os = open_out(dir / "report.csv");
    os << "R,minus_ratio,plus_ratio,tilde_minus_ratio,tilde_plus_ratio\n";
    if (domain.dumbbell) {
        ConditionAReport a = check_condition_A(domain, R_list, 20000, seed);
        for (const auto& r : a.rows)
            os << format_number(r.R) << ',' << format_number(r.minus_ratio) << ',' << format_number(r.plus_ratio)
               << ',' << format_number(r.tilde_minus_ratio) << ',' << format_number(r.tilde_plus_ratio) << '\n';
        sum.add("condition_A", a.pass);
        sum.add("volume_ok", a.volume_ok);
        sum.add("gamma_star_bounded", a.gamma_star_bounded);
        sum.add("overlap_ok", a.overlap_ok);
        sum.add("gamma_tilde_present", a.gamma_tilde_present);
        sum.add("gamma_tilde_stable", a.gamma_tilde_stable);
        for (const auto& v : a.violations) log << "condition A: " << v << "\n";
        pass = pass && a.pass;
    } else {
        sum.add("condition_A", std::string("n/a"));
    }

    DomainSpec bounded = domain.dumbbell ? clip_ball(domain, domain.dumbbell->anchor, R_list.front()) : domain;
    ConditionBOptions opts;
    opts.seed = seed;
    if (domain.dumbbell) {
        opts.max_comparison = 32.0;
        opts.window = 4.0;
    }
    ConditionBReport b = check_condition_B(bounded, opts);
    {
        auto bos = open_out(dir / "condition_b.csv");
        bos << "pair,x1,x2,y1,y2,found,length,comparison,expansions\n";
        for (std::size_t k = 0; k < b.pairs.size(); ++k) {
            const auto& p = b.pairs[k];
            bos << k << ',' << format_number(p.x.x) << ',' << format_number(p.x.y) << ',' << format_number(p.y.x)
                << ',' << format_number(p.y.y) << ',' << (p.found ? 1 : 0) << ',' << p.length << ','
                << format_number(p.comparison) << ',' << p.expansions << '\n';
        }
    }
    log << "condition B: " << b.pairs.size() << " pairs, max length " << b.max_length << "\n";
    sum.add("condition_B", b.pass);
    sum.add("condition_B_vacuous", b.vacuous);
    sum.add("condition_B_max_length", b.max_length);
    sum.add("condition_B_max_comparison", b.max_comparison_used);
    pass = pass && b.pass;

    auto plot = open_out(dir / "plot.gp");
    plot << "set datafile separator ','\n"
         << "set logscale x\n"
         << "set xlabel 'R'\n"
         << "set ylabel 'volume / R^2'\n"
         << "plot 'report.csv' every ::1 using 1:2 with linespoints title 'D-', "
            "'report.csv' every ::1 using 1:3 with linespoints title 'D+'\n";
    return pass ? kExitPass : kExitFail;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& input, std::ostream& log) {
    ExperimentResult res;
    try {
        ExperimentConfig cfg = with_defaults(input);
        validate_config(cfg);
        const std::string name = cfg.get_string("experiment.name");
        res.directory = cfg.get_string("experiment.output");
        std::error_code ec;
        fs::create_directories(res.directory, ec);
        if (ec) throw std::runtime_error("cannot create " + res.directory.string() + ": " + ec.message());
        {
            auto os = open_out(res.directory / "config.ini");
            os << cfg.serialize();
        }
        Summary sum;
        sum.add("experiment", name);
        sum.add("seed", cfg.get_string("experiment.seed"));
        int code = kExitError;
        if (name == "counterexample") code = run_counterexample(cfg, res.directory, sum, log);
        else if (name == "scaling-nonlocal") code = run_scaling(cfg, false, res.directory, sum, log);
        else if (name == "scaling-local") code = run_scaling(cfg, true, res.directory, sum, log);
        else if (name == "comparability") code = run_comparability(cfg, res.directory, sum, log);
        else if (name == "whitney-audit") code = run_whitney(cfg, res.directory, sum, log);
        else if (name == "walk") code = run_walk(cfg, res.directory, sum, log);
        else if (name == "check-domain") code = run_check_domain(cfg, res.directory, sum, log);
        sum.add("verdict", std::string(code == kExitPass ? "pass" : "fail"));
        auto os = open_out(res.directory / "summary.txt");
        for (const auto& [k, v] : sum.items_) os << k << '=' << v << '\n';
        res.summary = std::move(sum.items_);
        res.exit_code = code;
    } catch (const std::exception& e) {
        res.exit_code = kExitError;
        res.error = e.what();
        log << "error: " << e.what() << "\n";
    }
    return res;
}

}  // namespace nlvis
