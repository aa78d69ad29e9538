#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nlvis/config.hpp"
#include "nlvis/geometry.hpp"
#include "nlvis/kernels.hpp"

namespace nlvis {

enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitFail = 2 };

struct ExperimentResult {
    int exit_code = kExitError;
    std::filesystem::path directory;
    std::vector<std::pair<std::string, std::string>> summary;  // in write order
    std::string error;

    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;
};

// Fills unset keys with the defaults of the named experiment.
ExperimentConfig with_defaults(const ExperimentConfig& cfg);

// Validates, runs and writes report.csv, summary.txt and plot.gp (plus
// experiment-specific CSVs) into experiment.output. Never throws; errors map
// to exit code 1 with the message in `error`.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Shortest round-trip decimal form.
std::string format_number(double v);

// Kernel from kernel.spec, or a power kernel from kernel.s and kernel.p.
KernelSpec resolved_kernel(const ExperimentConfig& cfg);

// Smooth random test functions, identical at every resolution: a linear part
// plus three angular modes about the bounding-box center.
std::vector<double> random_smooth_function(const std::vector<Vec2>& points, const Box& bounds,
                                           std::uint64_t seed, std::size_t index);

struct ComparabilityRow {
    std::size_t sample = 0;
    double h = 0.0;
    double censored = 0.0;
    double visible = 0.0;
    double ratio = 0.0;
};

struct ComparabilityResult {
    double h = 0.0;
    std::size_t cells_coarse = 0;
    std::size_t cells_fine = 0;
    double max_coarse = 0.0;
    double max_fine = 0.0;
    double drift = 0.0;  // larger max over smaller max
    std::vector<ComparabilityRow> rows;
};

// max over random u of E^cen(u) / E^vis(u) at h and h/2.
ComparabilityResult comparability_check(const DomainSpec& domain, const KernelSpec& kernel, double h,
                                        std::size_t samples, std::uint64_t seed);

}  // namespace nlvis
