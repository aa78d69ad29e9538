#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nlvis {

enum class KernelFamily { Power, PowerLog, Constant, Truncated };

// Radial profile l(r); the kernel is k(x, y) = l(|x - y|) / |x - y|^d.
struct KernelSpec {
    KernelFamily family = KernelFamily::Power;
    double s = 0.5;    // power, powerlog
    double p = 2.0;    // integrability exponent
    int sign = 1;      // powerlog: l(r) = r^{-2s} log(1 + 1/r)^{sign}
    double rho = 1.0;  // truncated: l(r) = 1 on (0, rho)
    int dim = 2;

    static KernelSpec power(double s, double p);
    static KernelSpec powerlog(double s, int sign);
    static KernelSpec constant();
    static KernelSpec truncated(double rho);

    void validate() const;
    double profile(double r) const;
};

// l(r) / r^d; throws for r <= 0.
double eval_kernel(const KernelSpec& k, double r);

KernelSpec parse_kernel(std::string_view text);
std::string to_string(const KernelSpec& k);

struct IntegrabilityReport {
    bool pass = false;
    double value = 0.0;  // integral over [1e-8, 1e8]
    std::vector<double> decade_increments;
    bool head_converged = false;
    bool tail_converged = false;
};

// Integral of min(r^{p-1}, 1/r) l(r) over a log grid on [1e-8, 1e8].
IntegrabilityReport check_levy_integrability(const KernelSpec& k);

struct ScalingCheckReport {
    double constant = 10.0;
    // Worst observed constants for each bound; the bound holds iff <= constant.
    double l2_lower = 0.0;   // max over samples of lambda^{-gamma} l(r) / l(lambda r)
    double l2_upper = 0.0;   // max over samples of l(lambda r) / (lambda^d l(r))
    double decay = 0.0;      // max over samples of l(lambda r) lambda^delta / l(r)
    bool l2_pass = false;
    bool decay_pass = false;
    std::vector<std::string> violations;
};

// Samples lambda in [1, 1e4] and r in [1e-4, 1e4] on a fixed lattice unless
// explicit samples are passed.
ScalingCheckReport check_scaling(const KernelSpec& k, double delta, double gamma,
                                 const std::vector<double>& lambdas = {},
                                 const std::vector<double>& radii = {});

}  // namespace nlvis
