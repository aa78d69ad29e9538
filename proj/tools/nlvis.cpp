#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "nlvis/acceptance.hpp"
#include "nlvis/config.hpp"
#include "nlvis/experiments.hpp"

namespace {

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

// Flags shared by name across subcommands, mapped onto config keys.
const std::vector<Flag>& all_flags() {
    static const std::vector<Flag> flags{
        {"--domain", "domain.spec", "straight-dumbbell|curved-dumbbell|annulus:<rin>,<rout>|box:<a>,<b>|ball:<r>|file:<path>"},
        {"--kernel", "kernel.spec", "power:s=<s>,p=<p>|powerlog:s=<s>,sign=<+-1>|constant|truncated:rho=<rho>"},
        {"--p", "kernel.p", "energy exponent"},
        {"--s", "kernel.s", "kernel order"},
        {"--R", "domain.R", "comma-separated radii"},
        {"--h", "domain.h", "grid spacing"},
        {"--method", "experiment.method", "witness|eigen"},
        {"--mode", "experiment.mode", "vis|cen|dyda"},
        {"--predicted", "experiment.predicted", "override the predicted exponent"},
        {"--n", "counterexample.n", "comma-separated n values"},
        {"--resolution-factor", "counterexample.resolution_factor", "h = 1/(factor n)"},
        {"--samples", "comparability.samples", "random functions per resolution"},
        {"--epsilon", "whitney.epsilon", "chain admissibility epsilon"},
        {"--max-level", "whitney.max_level", "finest dyadic level"},
        {"--pairs", "whitney.pairs", "random cube pairs to connect"},
        {"--paths", "walk.paths", "walker paths"},
        {"--max-steps", "walk.max_steps", "censoring step limit"},
        {"--seed", "experiment.seed", "top-level seed"},
        {"--output", "experiment.output", "output directory"},
    };
    return flags;
}

const std::map<std::string, std::vector<std::string>>& subcommand_flags() {
    static const std::map<std::string, std::vector<std::string>> m{
        {"counterexample", {"--n", "--resolution-factor"}},
        {"scaling-nonlocal", {"--domain", "--kernel", "--p", "--s", "--R", "--h", "--method", "--mode", "--predicted"}},
        {"scaling-local", {"--domain", "--p", "--R", "--h", "--method", "--predicted"}},
        {"comparability", {"--domain", "--kernel", "--p", "--s", "--h", "--samples"}},
        {"whitney-audit", {"--domain", "--epsilon", "--max-level", "--pairs", "--R"}},
        {"walk", {"--domain", "--kernel", "--p", "--s", "--R", "--h", "--paths", "--max-steps"}},
        {"check-domain", {"--domain", "--R"}},
    };
    return m;
}

struct Subcommand {
    CLI::App* app = nullptr;
    std::string config_file;
    bool timing = false;
    std::map<std::string, std::string> values;  // config key -> flag value
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string subcommand_description(const std::string& name) {
    static const std::map<std::string, std::string> text{
        {"counterexample", "ball-restricted over censored energy of corner indicators"},
        {"scaling-nonlocal", "Poincare constant growth of nonlocal forms in R"},
        {"scaling-local", "Poincare constant growth of the local form in R"},
        {"comparability", "censored over visible energy ratios at h and h/2"},
        {"whitney-audit", "Whitney decomposition, sum and chain checks"},
        {"walk", "mean crossing times of the visibility jump chain"},
        {"check-domain", "uniform-domain conditions on samples and chains"},
    };
    auto it = text.find(name);
    return it == text.end() ? std::string() : it->second;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nlvis: visibility-constrained nonlocal energies on dumbbell domains"};
    app.require_subcommand(1);

    std::map<std::string, Subcommand> subs;
    for (const auto& [name, flags] : subcommand_flags()) {
        Subcommand& sc = subs[name];
        sc.app = app.add_subcommand(name, subcommand_description(name));
        sc.app->set_help_flag("--help", "print this help message and exit");
        sc.app->add_option("--config", sc.config_file, "config file; flags override its values");
        sc.app->add_flag("--timing", sc.timing, "fill the seconds column");
        std::vector<std::string> names = flags;
        names.push_back("--seed");
        names.push_back("--output");
        for (const auto& f : all_flags()) {
            if (std::find(names.begin(), names.end(), f.name) == names.end()) continue;
            sc.app->add_option_function<std::string>(
                f.name, [&sc, key = std::string(f.key)](const std::string& v) { sc.values[key] = v; }, f.help);
        }
    }

    nlvis::AcceptanceOptions acc;
    bool no_determinism = false;
    auto* reproduce = app.add_subcommand("reproduce", "run the acceptance suite");
    reproduce->add_flag("--quick", acc.quick, "reduced radii, paths and samples");
    reproduce->add_flag("--inject-wrong-exponent", acc.inject_wrong_exponent, "negative control");
    reproduce->add_flag("--no-determinism", no_determinism, "skip the determinism rerun");
    reproduce->add_option("--seed", acc.seed, "top-level seed");
    std::string out_dir = acc.output.string();
    reproduce->add_option("--output", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : nlvis::kExitError;
    }

    if (reproduce->parsed()) {
        acc.output = out_dir;
        acc.determinism = !no_determinism;
        try {
            auto results = nlvis::reproduce_all(acc, std::cout);
            return nlvis::acceptance_exit_code(results);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return nlvis::kExitError;
        }
    }

    for (auto& [name, sc] : subs) {
        if (!sc.app->parsed()) continue;
        nlvis::ExperimentConfig cfg;
        try {
            if (!sc.config_file.empty()) cfg = nlvis::ExperimentConfig::parse(read_file(sc.config_file));
            if (cfg.has("experiment.name") && cfg.get_string("experiment.name") != name)
                throw std::invalid_argument("config file is for '" + cfg.get_string("experiment.name") +
                                            "', not '" + name + "'");
            cfg.set("experiment.name", name);
            for (const auto& [key, value] : sc.values) cfg.set(key, value);
            if (sc.timing) cfg.set("experiment.timing", "true");
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return nlvis::kExitError;
        }
        nlvis::ExperimentResult r = nlvis::run_experiment(cfg, std::cerr);
        if (r.exit_code == nlvis::kExitError) return r.exit_code;
        for (const auto& [k, v] : r.summary) std::cout << k << '=' << v << '\n';
        std::cout << "output=" << r.directory.string() << '\n';
        return r.exit_code;
    }
    return nlvis::kExitError;
}
