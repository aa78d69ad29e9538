#include "nlvis/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlvis/geometry.hpp"
#include "nlvis/kernels.hpp"
#include "nlvis/mesh.hpp"

namespace nlvis {

namespace {

enum class Kind { String, Number, Integer, NumberList, Bool };

struct Field {
    const char* section;
    const char* key;
    Kind kind;
};

const std::vector<Field>& schema() {
    static const std::vector<Field> fields{
        {"experiment", "name", Kind::String},
        {"experiment", "method", Kind::String},
        {"experiment", "mode", Kind::String},
        {"experiment", "seed", Kind::Integer},
        {"experiment", "output", Kind::String},
        {"experiment", "timing", Kind::Bool},
        {"experiment", "predicted", Kind::Number},
        {"domain", "spec", Kind::String},
        {"domain", "h", Kind::Number},
        {"domain", "R", Kind::NumberList},
        {"kernel", "spec", Kind::String},
        {"kernel", "p", Kind::Number},
        {"kernel", "s", Kind::Number},
        {"counterexample", "n", Kind::NumberList},
        {"counterexample", "resolution_factor", Kind::Integer},
        {"whitney", "epsilon", Kind::Number},
        {"whitney", "max_level", Kind::Integer},
        {"whitney", "pairs", Kind::Integer},
        {"walk", "paths", Kind::Integer},
        {"walk", "max_steps", Kind::Integer},
        {"comparability", "samples", Kind::Integer},
    };
    return fields;
}

std::string full_name(const Field& f) { return std::string(f.section) + "." + f.key; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

const Field& lookup(std::string_view key) {
    const Field* hit = nullptr;
    int matches = 0;
    for (const auto& f : schema()) {
        if (full_name(f) == key) return f;
        if (key == f.key) {
            hit = &f;
            ++matches;
        }
    }
    if (matches == 1) return *hit;
    if (matches > 1) throw std::invalid_argument("config key '" + std::string(key) + "' is ambiguous; qualify it");
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

double to_number(std::string_view s, std::string_view key) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw std::invalid_argument("config key '" + std::string(key) + "': invalid number '" + std::string(s) + "'");
    return v;
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string canonical(const Field& f, std::string_view raw) {
    std::string_view v = trim(raw);
    const std::string key = full_name(f);
    switch (f.kind) {
        case Kind::String:
            if (v.empty()) throw std::invalid_argument("config key '" + key + "' is empty");
            return std::string(v);
        case Kind::Number: return fmt(to_number(v, key));
        case Kind::Integer: {
            std::int64_t x = 0;
            auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || ptr != v.data() + v.size()) {
                // Accept integral decimals such as 1e6.
                double d = to_number(v, key);
                if (d != std::floor(d) || std::abs(d) > 9e18)
                    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" +
                                                std::string(v) + "'");
                x = static_cast<std::int64_t>(d);
            }
            return std::to_string(x);
        }
        case Kind::NumberList: {
            std::string out;
            std::size_t start = 0;
            while (start <= v.size()) {
                std::size_t comma = v.find(',', start);
                if (comma == std::string_view::npos) comma = v.size();
                if (!out.empty()) out += ',';
                out += fmt(to_number(v.substr(start, comma - start), key));
                start = comma + 1;
            }
            return out;
        }
        case Kind::Bool:
            if (v == "true" || v == "1" || v == "yes" || v == "on") return "true";
            if (v == "false" || v == "0" || v == "no" || v == "off") return "false";
            throw std::invalid_argument("config key '" + key + "': expected a boolean");
    }
    return std::string(v);
}

// Parses lines into (qualified key -> canonical value).
std::map<std::string, std::string> parse_lines(std::string_view text) {
    std::map<std::string, std::string> out;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        auto hash = s.find_first_of("#;");
        if (hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        auto where = [&] { return "config line " + std::to_string(line) + ": "; };
        if (s.front() == '[') {
            if (s.back() != ']') throw std::invalid_argument(where() + "unterminated section header");
            section = std::string(trim(s.substr(1, s.size() - 2)));
            bool known = std::any_of(schema().begin(), schema().end(),
                                     [&](const Field& f) { return section == f.section; });
            if (!known) throw std::invalid_argument(where() + "unknown section [" + section + "]");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument(where() + "expected key = value");
        if (section.empty()) throw std::invalid_argument(where() + "key outside of any section");
        std::string key = section + "." + std::string(trim(s.substr(0, eq)));
        auto f = std::find_if(schema().begin(), schema().end(),
                              [&](const Field& x) { return full_name(x) == key; });
        if (f == schema().end()) throw std::invalid_argument(where() + "unknown key '" + key + "'");
        if (out.count(key)) throw std::invalid_argument(where() + "duplicate key '" + key + "'");
        try {
            out[key] = canonical(*f, s.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where() + e.what());
        }
    }
    return out;
}

std::string emit(const std::map<std::string, std::string>& values) {
    std::string out;
    std::string section;
    for (const auto& f : schema()) {
        auto it = values.find(full_name(f));
        if (it == values.end()) continue;
        if (section != f.section) {
            if (!out.empty()) out += '\n';
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += std::string(f.key) + " = " + it->second + "\n";
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    ExperimentConfig c;
    c.values_ = parse_lines(text);
    return c;
}

std::string ExperimentConfig::serialize() const { return emit(values_); }

void ExperimentConfig::set(std::string_view key, std::string_view value) {
    const Field& f = lookup(key);
    values_[full_name(f)] = canonical(f, value);
}

void ExperimentConfig::erase(std::string_view key) { values_.erase(full_name(lookup(key))); }

bool ExperimentConfig::has(std::string_view key) const { return values_.count(full_name(lookup(key))) > 0; }

std::string ExperimentConfig::get_string(std::string_view key, std::string_view fallback) const {
    auto it = values_.find(full_name(lookup(key)));
    return it == values_.end() ? std::string(fallback) : it->second;
}

double ExperimentConfig::get_double(std::string_view key, double fallback) const {
    auto it = values_.find(full_name(lookup(key)));
    return it == values_.end() ? fallback : to_number(it->second, key);
}

std::int64_t ExperimentConfig::get_int(std::string_view key, std::int64_t fallback) const {
    auto it = values_.find(full_name(lookup(key)));
    return it == values_.end() ? fallback : std::stoll(it->second);
}

bool ExperimentConfig::get_bool(std::string_view key, bool fallback) const {
    auto it = values_.find(full_name(lookup(key)));
    return it == values_.end() ? fallback : it->second == "true";
}

std::vector<double> ExperimentConfig::get_list(std::string_view key, const std::vector<double>& fallback) const {
    auto it = values_.find(full_name(lookup(key)));
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::string_view v = it->second;
    std::size_t start = 0;
    while (start <= v.size()) {
        std::size_t comma = v.find(',', start);
        if (comma == std::string_view::npos) comma = v.size();
        out.push_back(to_number(v.substr(start, comma - start), key));
        start = comma + 1;
    }
    return out;
}

std::string normalize_config(std::string_view text) { return emit(parse_lines(text)); }

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& f : schema()) out.push_back(full_name(f));
    return out;
}

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

bool is_dumbbell(const std::string& spec) { return spec == "straight-dumbbell" || spec == "curved-dumbbell"; }

void check_radii(const std::vector<double>& R, std::size_t min_count) {
    require(R.size() >= min_count, "need at least " + std::to_string(min_count) + " R values");
    for (double r : R) require(r > 0.0, "R values must be positive");
    require(std::is_sorted(R.begin(), R.end()) && std::adjacent_find(R.begin(), R.end()) == R.end(),
            "R values must be strictly ascending");
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
    const std::string name = cfg.get_string("experiment.name");
    require(!name.empty(), "experiment name is missing");
    const auto& names = experiment_names();
    require(std::find(names.begin(), names.end(), name) != names.end(), "unknown experiment '" + name + "'");
    require(cfg.get_int("experiment.seed", 0) >= 0, "seed must be nonnegative");

    if (cfg.has("domain.spec")) (void)domain_from_name(cfg.get_string("domain.spec"));
    if (cfg.has("domain.h")) require(cfg.get_double("domain.h", 0.0) > 0.0, "h must be positive");
    if (cfg.has("kernel.p")) require(cfg.get_double("kernel.p", 0.0) >= 1.0, "p must be at least 1");
    if (cfg.has("kernel.s")) {
        double s = cfg.get_double("kernel.s", 0.0);
        require(s > 0.0 && s < 1.0, "s must lie in (0,1)");
    }
    if (cfg.has("kernel.spec")) {
        KernelSpec k = parse_kernel(cfg.get_string("kernel.spec"));
        if (k.family == KernelFamily::Power) {
            if (cfg.has("kernel.p"))
                require(cfg.get_double("kernel.p", 0.0) == k.p, "kernel p and energy p differ");
            if (cfg.has("kernel.s")) require(cfg.get_double("kernel.s", 0.0) == k.s, "kernel s and s differ");
        }
    }
    if (cfg.has("experiment.method")) {
        std::string m = cfg.get_string("experiment.method");
        require(m == "witness" || m == "eigen", "method must be witness or eigen");
    }
    if (cfg.has("experiment.mode")) {
        std::string m = cfg.get_string("experiment.mode");
        require(m == "vis" || m == "cen" || m == "dyda" || m == "local", "mode must be vis, cen, dyda or local");
    }

    const std::string domain = cfg.get_string("domain.spec");
    if (name == "scaling-nonlocal" || name == "scaling-local" || name == "walk") {
        if (!domain.empty()) require(is_dumbbell(domain), name + " needs a dumbbell domain");
        if (cfg.has("domain.R")) check_radii(cfg.get_list("domain.R", {}), name == "walk" ? 1 : 3);
        if (cfg.has("domain.h"))
            require(cfg.get_double("domain.h", 0.0) <= max_corridor_h(1.0), "h must be at most 0.5 to resolve the corridor");
    }
    if (name == "scaling-nonlocal") {
        double p = cfg.get_double("kernel.p", 2.0);
        double s = cfg.get_double("kernel.s", 0.25);
        if (cfg.has("kernel.spec")) {
            KernelSpec k = parse_kernel(cfg.get_string("kernel.spec"));
            require(k.family == KernelFamily::Power, "scaling-nonlocal needs a power kernel");
            p = k.p;
            s = k.s;
        }
        require(p >= 1.0 && p < kDim / s, "hypothesis 1 <= p < d/s fails");
        require(s * p != 1.0, "s = 1/p is not covered by the case table");
        if (cfg.get_string("experiment.method", "witness") == "eigen") require(p == 2.0, "eigen method needs p = 2");
    }
    if (name == "scaling-local") {
        double p = cfg.get_double("kernel.p", 1.0);
        require(p <= kDim, "local scaling is tabulated for p <= d");
        if (cfg.get_string("experiment.method", "witness") == "eigen") require(p == 2.0, "eigen method needs p = 2");
    }
    if (name == "counterexample") {
        auto n = cfg.get_list("counterexample.n", {4, 8, 16, 32});
        require(!n.empty(), "counterexample needs n values");
        for (double v : n) require(v >= 2.0 && v == std::floor(v), "counterexample n must be integers >= 2");
        require(cfg.get_int("counterexample.resolution_factor", 8) >= 8, "resolution factor must be at least 8");
    }
    if (name == "comparability") require(cfg.get_int("comparability.samples", 200) >= 1, "samples must be positive");
    if (name == "whitney-audit") {
        double eps = cfg.get_double("whitney.epsilon", 0.05);
        require(eps > 0.0 && eps <= 0.5, "epsilon must lie in (0, 1/2]");
        auto lvl = cfg.get_int("whitney.max_level", 8);
        require(lvl >= 0 && lvl <= 12, "max_level must lie in [0, 12]");
        require(cfg.get_int("whitney.pairs", 100) >= 0, "pairs must be nonnegative");
    }
    if (name == "walk") {
        require(cfg.get_int("walk.paths", 1000) >= 1, "paths must be positive");
        require(cfg.get_int("walk.max_steps", 1000000) >= 1, "max_steps must be positive");
    }
}

}  // namespace nlvis
