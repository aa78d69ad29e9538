#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nlvis {

// Sectioned key=value configuration:
//
//   [experiment]
//   name = scaling-nonlocal
//   [domain]
//   spec = straight-dumbbell
//   R = 8,16,32,64
//
// Keys are addressed as "section.key". Values are stored in canonical text
// form, so two configs compare equal iff they serialize identically.
class ExperimentConfig {
public:
    static ExperimentConfig parse(std::string_view text);
    std::string serialize() const;

    // Accepts "section.key" or a bare key that names exactly one field.
    void set(std::string_view key, std::string_view value);
    void erase(std::string_view key);
    bool has(std::string_view key) const;

    std::string get_string(std::string_view key, std::string_view fallback = "") const;
    double get_double(std::string_view key, double fallback) const;
    std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;
    std::vector<double> get_list(std::string_view key, const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    bool operator==(const ExperimentConfig&) const = default;

private:
    std::map<std::string, std::string> values_;
};

// Canonical text for a config file: comments and blank lines dropped,
// sections and keys in schema order, values canonicalized.
std::string normalize_config(std::string_view text);

// Fully qualified names of every known key, in schema order.
std::vector<std::string> config_keys();

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"counterexample", "scaling-nonlocal", "scaling-local",
                                                "comparability",  "whitney-audit",    "walk",
                                                "check-domain"};
    return names;
}

// Validates ranges and hypothesis guards for the named experiment; throws
// std::invalid_argument with a specific message.
void validate_config(const ExperimentConfig& cfg);

}  // namespace nlvis
