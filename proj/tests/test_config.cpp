#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlvis/config.hpp"
#include "nlvis/experiments.hpp"

using namespace nlvis;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("nlvis_test_config_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig named(const std::string& name) {
    ExperimentConfig c;
    c.set("experiment.name", name);
    return c;
}

bool valid(const ExperimentConfig& c) {
    try {
        validate_config(c);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

const char* kSample = R"(# scaling run
[experiment]
name = scaling-nonlocal
seed = 0042
method = witness

[domain]
spec = straight-dumbbell   ; comment
R = 8, 16,32.0
h = .5

[kernel]
s = 0.25
p = 2
)";

}  // namespace

TEST(Config, RoundTripMatchesNormalizedText) {
    auto cfg = ExperimentConfig::parse(kSample);
    EXPECT_EQ(cfg.serialize(), normalize_config(kSample));
    EXPECT_EQ(ExperimentConfig::parse(cfg.serialize()), cfg);
    EXPECT_EQ(cfg.get_int("experiment.seed", 0), 42);
    EXPECT_EQ(cfg.get_list("domain.R", {}), (std::vector<double>{8, 16, 32}));
    EXPECT_EQ(cfg.get_string("domain.R"), "8,16,32");
    EXPECT_EQ(cfg.get_double("h", 0.0), 0.5);
}

TEST(Config, RoundTripEveryKey) {
    ExperimentConfig c;
    for (const auto& k : config_keys()) {
        std::string v = "1";
        if (k == "experiment.timing") v = "true";
        if (k == "experiment.name" || k == "experiment.method" || k == "experiment.mode" ||
            k == "experiment.output" || k == "domain.spec" || k == "kernel.spec")
            v = "x";
        c.set(k, v);
    }
    EXPECT_EQ(ExperimentConfig::parse(c.serialize()), c);
    EXPECT_EQ(normalize_config(c.serialize()), c.serialize());
}

TEST(Config, IntegersAcceptIntegralDecimals) {
    ExperimentConfig c;
    c.set("walk.max_steps", "1e6");
    EXPECT_EQ(c.get_int("walk.max_steps", 0), 1000000);
    EXPECT_THROW(c.set("walk.max_steps", "2.5"), std::invalid_argument);
}

TEST(Config, MalformedInputs) {
    EXPECT_THROW(ExperimentConfig::parse("[nope]\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::parse("[domain]\nwidth = 3\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::parse("[domain]\nh = 1\nh = 2\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::parse("h = 1\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::parse("[domain\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::parse("[domain]\nh\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::parse("[domain]\nh = abc\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::parse("[domain]\nR = 1,,2\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::parse("[experiment]\ntiming = maybe\n"), std::invalid_argument);
    try {
        ExperimentConfig::parse("[domain]\nh = 1\n\nbogus = 2\n");
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
}

TEST(Validate, Guards) {
    EXPECT_TRUE(valid(named("counterexample")));
    EXPECT_FALSE(valid(ExperimentConfig{}));
    EXPECT_FALSE(valid(named("unknown")));

    auto c = named("scaling-nonlocal");
    EXPECT_TRUE(valid(c));
    c.set("kernel.s", "0.5");
    c.set("kernel.p", "4");  // p = d/s
    EXPECT_FALSE(valid(c));
    c.set("kernel.p", "2");  // s p = 1
    EXPECT_FALSE(valid(c));
    c.set("kernel.s", "0.25");
    c.set("domain.spec", "annulus");
    EXPECT_FALSE(valid(c));
    c.set("domain.spec", "curved-dumbbell");
    c.set("domain.h", "1");
    EXPECT_FALSE(valid(c));
    c.set("domain.h", "0.5");
    c.set("domain.R", "8,16");
    EXPECT_FALSE(valid(c));
    c.set("domain.R", "8,32,16");
    EXPECT_FALSE(valid(c));
    c.set("domain.R", "8,16,32");
    EXPECT_TRUE(valid(c));
    c.set("kernel.spec", "power:s=0.5,p=2");
    EXPECT_FALSE(valid(c));  // disagrees with kernel.s
    c.erase("kernel.spec");
    c.set("kernel.p", "3");
    c.set("experiment.method", "eigen");
    EXPECT_FALSE(valid(c));
    c.set("experiment.method", "cg");
    EXPECT_FALSE(valid(c));

    auto l = named("scaling-local");
    l.set("kernel.p", "3");
    EXPECT_FALSE(valid(l));
    auto n = named("counterexample");
    n.set("counterexample.n", "4,1");
    EXPECT_FALSE(valid(n));
    n.set("counterexample.n", "4,8");
    n.set("counterexample.resolution_factor", "4");
    EXPECT_FALSE(valid(n));
    auto w = named("whitney-audit");
    w.set("whitney.epsilon", "0.6");
    EXPECT_FALSE(valid(w));
    w.set("whitney.epsilon", "0.05");
    w.set("whitney.max_level", "13");
    EXPECT_FALSE(valid(w));
    auto s = named("comparability");
    s.set("kernel.s", "1");
    EXPECT_FALSE(valid(s));
    s.set("kernel.s", "0.5");
    s.set("domain.spec", "circle:0,0");
    EXPECT_FALSE(valid(s));
}

TEST(Run, MalformedKernelIsAnError) {
    auto c = named("comparability");
    c.set("kernel.spec", "power:0.5");
    c.set("experiment.output", scratch("bad_kernel").string());
    std::ostringstream log;
    auto r = run_experiment(c, log);
    EXPECT_EQ(r.exit_code, kExitError);
    EXPECT_FALSE(r.error.empty());
}

TEST(Run, CounterexampleIsByteDeterministic) {
    fs::path a = scratch("det_a"), b = scratch("det_b");
    auto c = named("counterexample");
    c.set("counterexample.n", "4,8,16");
    std::ostringstream log;
    c.set("experiment.output", a.string());
    auto ra = run_experiment(c, log);
    c.set("experiment.output", b.string());
    auto rb = run_experiment(c, log);
    ASSERT_NE(ra.exit_code, kExitError) << ra.error;
    EXPECT_EQ(ra.exit_code, rb.exit_code);
    EXPECT_EQ(slurp(a / "report.csv"), slurp(b / "report.csv"));
    EXPECT_FALSE(slurp(a / "report.csv").empty());
    auto cfg = ExperimentConfig::parse(slurp(a / "config.ini"));
    EXPECT_EQ(cfg.get_string("counterexample.n"), "4,8,16");
}

TEST(Run, WrongPredictedExponentFails) {
    auto c = named("scaling-local");
    c.set("domain.R", "4,8,16");
    c.set("experiment.output", scratch("inject_true").string());
    std::ostringstream log;
    auto honest = run_experiment(c, log);
    ASSERT_NE(honest.exit_code, kExitError) << honest.error;
    double fitted = honest.number("fitted");
    c.set("experiment.predicted", format_number(honest.number("predicted") + 1.0));
    c.set("experiment.output", scratch("inject_wrong").string());
    auto wrong = run_experiment(c, log);
    EXPECT_EQ(wrong.exit_code, kExitFail);
    EXPECT_EQ(wrong.number("fitted"), fitted);
    EXPECT_EQ(wrong.get("verdict"), "fail");
}

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(2.0), "2");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}
