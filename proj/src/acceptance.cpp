#include "nlvis/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <mutex>
#include <numbers>
#include <sstream>

#include "nlvis/experiments.hpp"
#include "nlvis/forms.hpp"
#include "nlvis/mesh.hpp"
#include "nlvis/parallel.hpp"
#include "nlvis/random.hpp"
#include "nlvis/spectral.hpp"

namespace nlvis {

namespace fs = std::filesystem;

namespace {

struct Context {
    const AcceptanceOptions& opts;
    fs::path root;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

ExperimentConfig make_config(const Context& ctx, const std::string& name, const std::string& subdir,
                             std::initializer_list<std::pair<const char*, std::string>> values) {
    ExperimentConfig cfg;
    cfg.set("experiment.name", name);
    cfg.set("experiment.seed", std::to_string(ctx.opts.seed));
    cfg.set("experiment.output", (ctx.root / subdir).string());
    for (const auto& [k, v] : values) cfg.set(k, v);
    return cfg;
}

ExperimentResult run(const ExperimentConfig& cfg) {
    std::ostringstream log;
    ExperimentResult r = run_experiment(cfg, log);
    fs::create_directories(cfg.get_string("experiment.output"));
    std::ofstream(fs::path(cfg.get_string("experiment.output")) / "log.txt") << log.str();
    if (r.exit_code == kExitError) throw std::runtime_error(cfg.get_string("experiment.name") + ": " + r.error);
    return r;
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

std::vector<double> random_values(std::size_t n, std::uint64_t seed, std::size_t index) {
    SplitMix64 rng(derive_seed(seed, "random-u", index));
    std::vector<double> u(n);
    for (auto& x : u) x = rng.uniform(-1.0, 1.0);
    return u;
}

std::ofstream open_csv(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
}

bool same_pairs(const std::vector<WeightedPair>& a, const std::vector<WeightedPair>& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const WeightedPair& x, const WeightedPair& y) {
        return x.i == y.i && x.j == y.j && x.w == y.w;
    });
}

bool subset_pairs(const std::vector<WeightedPair>& small, const std::vector<WeightedPair>& big) {
    auto less = [](const WeightedPair& x, const WeightedPair& y) { return x.i != y.i ? x.i < y.i : x.j < y.j; };
    return std::includes(big.begin(), big.end(), small.begin(), small.end(), less);
}

CriterionResult c01(const Context& ctx) {
    auto r = run(make_config(ctx, "counterexample", "c01_counterexample", {{"counterexample.n", "4,8,16,32"}}));
    const bool decreasing = r.get("strictly_decreasing") == "true";
    const double decay = r.number("decay");
    return {1, "counterexample decay", decreasing && in_band(decay, 2.0, 4.0),
            "strictly decreasing=" + std::string(decreasing ? "yes" : "no") + ", ratio(4)/ratio(32)=" + num(decay) +
                " (band [2, 4]), n^2 E^cen growth=" + num(r.number("denominator_growth"))};
}

CriterionResult c02(const Context& ctx) {
    Grid grid = build_grid(make_box({0.0, 0.0}, {1.0, 1.0}), 1.0 / 16.0, 1);
    const KernelSpec k = KernelSpec::power(0.5, 2.0);
    PairSet pairs = visibility_pairs(grid);
    FormOperator vis = FormOperator::assemble(grid, pairs, k, FormMode::Visible, 2.0);
    FormOperator cen = FormOperator::assemble(grid, pairs, k, FormMode::Censored, 2.0);
    bool pairs_equal = same_pairs(vis.pairs(), cen.pairs());
    std::size_t equal = 0;
    auto os = open_csv(ctx.root / "c02_convexity", "report.csv");
    os << "sample,visible,censored\n";
    for (std::size_t s = 0; s < 100; ++s) {
        auto u = random_values(grid.size(), ctx.opts.seed, s);
        double ev = energy(vis, u, 2.0), ec = energy(cen, u, 2.0);
        equal += ev == ec;
        os << s << ',' << format_number(ev) << ',' << format_number(ec) << '\n';
    }
    return {2, "convexity identity", pairs_equal && equal == 100,
            "pair lists identical=" + std::string(pairs_equal ? "yes" : "no") + " (" +
                std::to_string(vis.pairs().size()) + " pairs), exact energy matches " + std::to_string(equal) +
                "/100"};
}

CriterionResult c03(const Context& ctx) {
    const KernelSpec k = KernelSpec::power(0.5, 2.0);
    struct Case {
        std::string name;
        Grid grid;
    };
    std::vector<Case> cases;
    cases.push_back({"annulus", build_grid(make_annulus(1.0 / 3.0, 1.0), 1.0 / 16.0, 4)});
    for (auto v : {DumbbellVariant::Straight, DumbbellVariant::Curved}) {
        DomainSpec d = make_dumbbell(v);
        cases.push_back({d.name, build_grid(d, d.dumbbell->anchor, 8.0, 0.5, 1)});
    }
    auto os = open_csv(ctx.root / "c03_ordering", "report.csv");
    os << "domain,sample,dyda,visible,censored\n";
    bool pass = true;
    std::string detail;
    std::size_t sample_index = 0;
    for (auto& c : cases) {
        PairSet pairs = visibility_pairs(c.grid);
        FormOperator dy = FormOperator::assemble(c.grid, pairs, k, FormMode::Dyda, 2.0);
        FormOperator vis = FormOperator::assemble(c.grid, pairs, k, FormMode::Visible, 2.0);
        FormOperator cen = FormOperator::assemble(c.grid, pairs, k, FormMode::Censored, 2.0);
        bool nested = subset_pairs(dy.pairs(), vis.pairs()) && subset_pairs(vis.pairs(), cen.pairs());
        std::size_t ok = 0;
        for (std::size_t s = 0; s < 100; ++s, ++sample_index) {
            auto u = random_values(c.grid.size(), ctx.opts.seed, sample_index);
            double a = energy(dy, u, 2.0), b = energy(vis, u, 2.0), e = energy(cen, u, 2.0);
            ok += a <= b && b <= e;
            os << c.name << ',' << s << ',' << format_number(a) << ',' << format_number(b) << ','
               << format_number(e) << '\n';
        }
        pass = pass && nested && ok == 100;
        if (!detail.empty()) detail += "; ";
        detail += c.name + ": " + std::to_string(ok) + "/100 ordered, pairs " + std::to_string(dy.pairs().size()) +
                  " <= " + std::to_string(vis.pairs().size()) + " <= " + std::to_string(cen.pairs().size());
    }
    return {3, "ordering chain", pass, detail};
}

CriterionResult c04(const Context& ctx) {
    auto r = run(make_config(ctx, "comparability", "c04_comparability",
                             {{"domain.spec", "annulus:0.3333333333333333,1"},
                              {"kernel.spec", "power:s=0.5,p=2"},
                              {"domain.h", "0.0625"},
                              {"comparability.samples", ctx.opts.quick ? "50" : "200"}}));
    double a = r.number("max_ratio_h"), b = r.number("max_ratio_h2"), drift = r.number("drift");
    return {4, "comparability", drift < 2.0 && std::max(a, b) < 50.0,
            "max E^cen/E^vis at h=" + num(a) + ", at h/2=" + num(b) + ", drift=" + num(drift) +
                " (< 2), max < 50"};
}

std::string predicted_value(const Context& ctx, double predicted) {
    return format_number(ctx.opts.inject_wrong_exponent ? predicted + 1.0 : predicted);
}

CriterionResult scaling_line(int id, const std::string& name, const std::vector<ExperimentResult>& runs,
                             const std::vector<std::string>& labels, double half_width) {
    bool pass = true;
    std::string detail;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        double fit = runs[k].number("fitted");
        double lo = runs[k].number("predicted") - half_width, hi = runs[k].number("predicted") + half_width;
        bool ok = in_band(fit, lo, hi) && runs[k].exit_code == kExitPass;
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += labels[k] + ": fitted " + num(fit) + " +- " + num(runs[k].number("stderr")) + " (band [" +
                  num(lo) + ", " + num(hi) + "], predicted " + num(runs[k].number("predicted")) + ")";
    }
    return {id, name, pass, detail};
}

std::string radii(const Context& ctx, const char* full, const char* quick) { return ctx.opts.quick ? quick : full; }

CriterionResult c05(const Context& ctx) {
    auto r = run(make_config(ctx, "scaling-nonlocal", "c05_scaling_straight",
                             {{"domain.spec", "straight-dumbbell"},
                              {"kernel.spec", "power:s=0.25,p=2"},
                              {"domain.R", radii(ctx, "8,16,32,64", "8,16,32")},
                              {"experiment.method", "witness"},
                              {"experiment.predicted", predicted_value(ctx, 1.5)}}));
    return scaling_line(5, "nonlocal scaling, s < 1/p", {r}, {"straight s=0.25"}, 0.15);
}

CriterionResult c06(const Context& ctx) {
    auto a = run(make_config(ctx, "scaling-nonlocal", "c06_scaling_curved",
                             {{"domain.spec", "curved-dumbbell"},
                              {"kernel.spec", "power:s=0.25,p=2"},
                              {"domain.R", radii(ctx, "8,16,32,64", "8,16,32")},
                              {"experiment.method", "witness"},
                              {"experiment.predicted", predicted_value(ctx, 2.0)}}));
    auto b = run(make_config(ctx, "scaling-nonlocal", "c06_scaling_straight_s075",
                             {{"domain.spec", "straight-dumbbell"},
                              {"kernel.spec", "power:s=0.75,p=2"},
                              {"domain.R", radii(ctx, "8,16,32,64", "8,16,32")},
                              {"experiment.method", "witness"},
                              {"experiment.predicted", predicted_value(ctx, 2.0)}}));
    return scaling_line(6, "nonlocal scaling, general case", {a, b}, {"curved s=0.25", "straight s=0.75"}, 0.15);
}

CriterionResult c07(const Context& ctx) {
    auto r = run(make_config(ctx, "scaling-local", "c07_scaling_local",
                             {{"domain.spec", "straight-dumbbell"},
                              {"kernel.p", "1"},
                              {"domain.R", "8,16,32"},
                              {"experiment.method", "witness"},
                              {"experiment.predicted", predicted_value(ctx, 2.0)}}));
    return scaling_line(7, "local scaling", {r}, {"straight p=1"}, 0.3);
}

CriterionResult c08(const Context& ctx) {
    auto common = [&](const char* method, const char* dir) {
        return run(make_config(ctx, "scaling-nonlocal", dir,
                               {{"domain.spec", "straight-dumbbell"},
                                {"kernel.spec", "power:s=0.25,p=2"},
                                {"domain.R", "4,8,16"},
                                {"domain.h", "0.5"},
                                {"experiment.method", method}}));
    };
    auto eig = common("eigen", "c08_eigen");
    auto wit = common("witness", "c08_witness");
    bool dominated = true;
    std::string values;
    for (const char* R : {"4", "8", "16"}) {
        double cp = eig.number(std::string("value_R") + R), w = wit.number(std::string("value_R") + R);
        dominated = dominated && cp >= w;
        values += std::string(values.empty() ? "" : ", ") + "R=" + R + ": C_P=" + num(cp) + " >= " + num(w);
    }
    double fe = eig.number("fitted"), fw = wit.number("fitted");
    bool close = std::abs(fe - fw) <= 0.4;
    return {8, "eigen consistency", dominated && close,
            values + "; eigen fit " + num(fe) + " vs witness fit " + num(fw) + " (|diff| <= 0.4)"};
}

CriterionResult c09(const Context& ctx) {
    const double h = 1.0 / 64.0;
    Grid grid = build_grid(make_box({0.0, 0.0}, {1.0, 1.0}), h, 1);
    FormOperator form = FormOperator::assemble_local(grid, 2.0);
    PoincareResult pr = poincare_constant_l2(form);
    const double target = 1.0 / (std::numbers::pi * std::numbers::pi);
    const double rel = std::abs(pr.constant - target) / target;
    auto os = open_csv(ctx.root / "c09_neumann", "report.csv");
    os << "h,N_cells,C_P,target,relative_error\n"
       << format_number(h) << ',' << grid.size() << ',' << format_number(pr.constant) << ','
       << format_number(target) << ',' << format_number(rel) << '\n';
    return {9, "Neumann benchmark", rel <= 0.05,
            "C_P=" + num(pr.constant) + " vs 1/pi^2=" + num(target) + ", relative error " + num(rel) + " (<= 5%)"};
}

CriterionResult c10(const Context& ctx) {
    const int level = ctx.opts.quick ? 7 : 8;
    struct Case {
        const char* dir;
        const char* spec;
        int pairs;
    };
    const Case cases[] = {{"c10_whitney_square", "box:0,1", 0},
                          {"c10_whitney_annulus", "annulus:0.3333333333333333,1", 100},
                          {"c10_whitney_straight", "straight-dumbbell", 0},
                          {"c10_whitney_curved", "curved-dumbbell", 0}};
    bool pass = true;
    std::string detail;
    for (const auto& c : cases) {
        auto r = run(make_config(ctx, "whitney-audit", c.dir,
                                 {{"domain.spec", c.spec},
                                  {"domain.R", "8"},
                                  {"whitney.max_level", std::to_string(level)},
                                  {"whitney.epsilon", "0.05"},
                                  {"whitney.pairs", std::to_string(c.pairs)}}));
        pass = pass && r.exit_code == kExitPass;
        if (!detail.empty()) detail += "; ";
        detail += r.get("domain") + ": residual " + num(100.0 * r.number("residual_fraction")) +
                  "%, sandwich violations " + r.get("sandwich_violations") + ", sum drift " +
                  num(std::max(r.number("sum_coarse"), r.number("sum_fine")) /
                      std::min(r.number("sum_coarse"), r.number("sum_fine")));
        if (c.pairs > 0) detail += ", chains " + r.get("chains_valid") + "/" + r.get("pairs");
    }
    return {10, "Whitney suite", pass, detail};
}

CriterionResult c11(const Context& ctx) {
    auto walk = [&](const char* spec, const char* dir, const char* paths) {
        return run(make_config(ctx, "walk", dir,
                               {{"domain.spec", spec},
                                {"kernel.spec", "power:s=0.25,p=2"},
                                {"domain.R", "16"},
                                {"walk.paths", paths}}));
    };
    auto many = walk("curved-dumbbell", "c11_walk_curved_many", ctx.opts.quick ? "1000" : "10000");
    auto curved = walk("curved-dumbbell", "c11_walk_curved", "1000");
    auto straight = walk("straight-dumbbell", "c11_walk_straight", "1000");
    const double direct = many.number("direct_transitions");
    const double mc = curved.number("mean_R16"), cc = curved.number("ci95_R16");
    const double ms = straight.number("mean_R16"), cs = straight.number("ci95_R16");
    const bool separated = mc - cc > ms + cs;
    return {11, "walker structure", direct == 0 && separated,
            "direct D-/D+ jumps " + num(direct) + " over " + many.get("paths") + " curved paths; mean crossing curved " +
                num(mc) + " +- " + num(cc) + " vs straight " + num(ms) + " +- " + num(cs)};
}

using Criterion = std::function<CriterionResult(const Context&)>;

const std::vector<std::pair<std::string, Criterion>>& criteria() {
    static const std::vector<std::pair<std::string, Criterion>> list{
        {"counterexample decay", c01}, {"convexity identity", c02}, {"ordering chain", c03},
        {"comparability", c04},        {"nonlocal scaling, s < 1/p", c05},
        {"nonlocal scaling, general case", c06},
        {"local scaling", c07},        {"eigen consistency", c08},  {"Neumann benchmark", c09},
        {"Whitney suite", c10},        {"walker structure", c11}};
    return list;
}

void print_line(std::ostream& out, const CriterionResult& r) {
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << ": " << r.detail << '\n' << std::flush;
}

std::vector<CriterionResult> run_suite(const AcceptanceOptions& opts, const fs::path& root, std::ostream* out) {
    Context ctx{opts, root};
    const auto& list = criteria();
    std::vector<CriterionResult> results(list.size());
    std::vector<char> done(list.size(), 0);
    std::size_t printed = 0;
    std::mutex mu;
    parallel_blocks(list.size(), 1, [&](std::size_t, std::size_t lo, std::size_t) {
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = list[lo].second(ctx);
        } catch (const std::exception& e) {
            r = {static_cast<int>(lo + 1), list[lo].first, false, std::string("error: ") + e.what()};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard<std::mutex> lock(mu);
        results[lo] = r;
        done[lo] = 1;
        while (out && printed < list.size() && done[printed]) print_line(*out, results[printed++]);
    });
    return results;
}

std::vector<fs::path> csv_files(const fs::path& root) {
    std::vector<fs::path> out;
    if (!fs::exists(root)) return out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(fs::relative(e.path(), root));
    std::sort(out.begin(), out.end());
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<CriterionResult> reproduce_all(const AcceptanceOptions& opts, std::ostream& out) {
    const fs::path run1 = opts.output / "run1", run2 = opts.output / "run2";
    fs::remove_all(run1);
    fs::remove_all(run2);
    out << "acceptance suite: seed " << opts.seed << (opts.quick ? ", quick" : "")
        << (opts.inject_wrong_exponent ? ", wrong predicted exponents injected" : "") << ", workers "
        << worker_count() << '\n';
    auto results = run_suite(opts, run1, &out);

    CriterionResult det{12, "determinism", false, ""};
    if (!opts.determinism) {
        det.detail = "skipped";
    } else {
        auto t0 = std::chrono::steady_clock::now();
        try {
            run_suite(opts, run2, nullptr);
            auto a = csv_files(run1), b = csv_files(run2);
            std::size_t differing = 0;
            std::string first;
            for (const auto& f : a) {
                if (!std::binary_search(b.begin(), b.end(), f) || slurp(run1 / f) != slurp(run2 / f)) {
                    if (differing++ == 0) first = f.string();
                }
            }
            det.pass = a == b && differing == 0 && !a.empty();
            det.detail = std::to_string(a.size()) + " CSV files compared, " + std::to_string(differing) +
                         " differ" + (a == b ? "" : ", file sets differ") + (first.empty() ? "" : " (first: " + first + ")");
        } catch (const std::exception& e) {
            det.detail = std::string("error: ") + e.what();
        }
        det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    print_line(out, det);
    results.push_back(det);

    std::size_t passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.pass; });
    out << passed << "/" << results.size() << " criteria passed\n";
    std::ofstream summary(opts.output / "acceptance.txt");
    for (const auto& r : results) print_line(summary, r);
    return results;
}

int acceptance_exit_code(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; }) ? kExitPass : kExitFail;
}

}  // namespace nlvis
