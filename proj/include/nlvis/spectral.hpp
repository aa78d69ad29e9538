#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlvis/forms.hpp"
#include "nlvis/geometry.hpp"
#include "nlvis/kernels.hpp"

namespace nlvis {

struct ZeroEnergyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenOptions {
    double tolerance = 1e-8;
    int max_iterations = 10000;
    std::uint64_t seed = 0x5eed;
    std::size_t dense_limit = 4096;  // above this, factor sparsely
};

struct PoincareResult {
    double constant = 0.0;  // 1 / lambda_1; +inf when the pair graph is disconnected
    double lambda1 = 0.0;
    bool disconnected = false;
    std::size_t components = 1;
    int iterations = 0;
};

// Smallest nonzero eigenvalue of E(u, v) = lambda <u, v>_m on measure-mean-zero u.
PoincareResult poincare_constant_l2(const FormOperator& form, const EigenOptions& opts = {});

// Dense reference eigensolver; small grids only.
double poincare_constant_dense(const FormOperator& form);

// -1 on D-, clamp(x1, -1, 1) on the corridor, +1 on D+.
std::vector<double> witness_step_function(const Grid& grid);
// Class ids for energy_classes: 0 on D-, 1 on D+, free on the corridor.
std::vector<int> witness_classes(const Grid& grid);

// sum m |u - mean|^p / E(u). Throws ZeroEnergyError when E(u) = 0.
double rayleigh_ratio(const FormOperator& form, std::span<const double> u, double p);
double rayleigh_ratio(const FormOperator& form, std::span<const double> u, double p,
                      std::span<const int> classes);

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double stderr_ = 0.0;
};

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples);

enum class ScalingMethod { Witness, Eigen };

std::string to_string(ScalingMethod m);

struct ScalingSample {
    double R = 0.0;
    std::size_t cells = 0;
    double value = 0.0;
    double seconds = 0.0;
};

struct ScalingReport {
    std::vector<ScalingSample> samples;
    PowerLawFit fit;
    double predicted = 0.0;
    double tolerance = 0.0;
    bool log_corrected = false;
    bool pass = false;
    std::string domain;
    std::string kernel;
    std::string method;
    double p = 2.0;
    double s = 0.0;
};

struct ScalingSetup {
    DumbbellVariant variant = DumbbellVariant::Straight;
    std::optional<KernelSpec> kernel;  // empty selects the local form
    FormMode mode = FormMode::Visible;
    double p = 2.0;
    std::vector<double> R;
    ScalingMethod method = ScalingMethod::Witness;
    double h = 0.5;
    double tube_radius = 1.0;
    std::optional<double> predicted_override;
    std::optional<double> tolerance_override;
};

// Predicted exponent and log-correction flag for a setup; throws when the
// hypotheses 1 <= p < d/s fail or s = 1/p.
std::pair<double, bool> predicted_exponent(const ScalingSetup& setup);

ScalingReport scaling_experiment(const ScalingSetup& setup);

}  // namespace nlvis
