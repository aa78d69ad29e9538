#include "nlvis/kernels.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace nlvis {

KernelSpec KernelSpec::power(double s, double p) {
    KernelSpec k;
    k.family = KernelFamily::Power;
    k.s = s;
    k.p = p;
    k.validate();
    return k;
}

KernelSpec KernelSpec::powerlog(double s, int sign) {
    KernelSpec k;
    k.family = KernelFamily::PowerLog;
    k.s = s;
    k.sign = sign;
    k.validate();
    return k;
}

KernelSpec KernelSpec::constant() {
    KernelSpec k;
    k.family = KernelFamily::Constant;
    k.s = 0.0;
    return k;
}

KernelSpec KernelSpec::truncated(double rho) {
    KernelSpec k;
    k.family = KernelFamily::Truncated;
    k.s = 0.0;
    k.rho = rho;
    k.validate();
    return k;
}

void KernelSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("kernel dimension must be positive");
    if (!(p >= 1.0)) throw std::invalid_argument("kernel p must be at least 1");
    switch (family) {
        case KernelFamily::Power:
            if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("power kernel needs s in (0,1)");
            if (!(s * p < dim)) throw std::invalid_argument("power kernel needs s*p < d");
            break;
        case KernelFamily::PowerLog:
            if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("powerlog kernel needs s in (0,1)");
            if (sign != 1 && sign != -1) throw std::invalid_argument("powerlog sign must be +1 or -1");
            break;
        case KernelFamily::Constant: break;
        case KernelFamily::Truncated:
            if (!(rho > 0.0)) throw std::invalid_argument("truncated kernel needs rho > 0");
            break;
    }
}

double KernelSpec::profile(double r) const {
    switch (family) {
        case KernelFamily::Power: return std::pow(r, -s * p);
        case KernelFamily::PowerLog: {
            double lg = std::log1p(1.0 / r);
            return std::pow(r, -2.0 * s) * (sign > 0 ? lg : 1.0 / lg);
        }
        case KernelFamily::Constant: return 1.0;
        case KernelFamily::Truncated: return r < rho ? 1.0 : 0.0;
    }
    return 0.0;
}

double eval_kernel(const KernelSpec& k, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("kernel evaluated at r <= 0");
    double rd = k.dim == 2 ? r * r : std::pow(r, k.dim);
    return k.profile(r) / rd;
}

namespace {

double parse_number(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw std::invalid_argument("kernel: invalid number '" + std::string(s) + "'");
    return v;
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

KernelSpec parse_kernel(std::string_view text) {
    auto colon = text.find(':');
    std::string_view family = text.substr(0, colon);
    std::map<std::string, double, std::less<>> args;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
            std::size_t comma = rest.find(',', start);
            if (comma == std::string_view::npos) comma = rest.size();
            std::string_view item = rest.substr(start, comma - start);
            auto eq = item.find('=');
            if (eq == std::string_view::npos)
                throw std::invalid_argument("kernel: expected key=value, got '" + std::string(item) + "'");
            args[std::string(item.substr(0, eq))] = parse_number(item.substr(eq + 1));
            start = comma + 1;
        }
    }
    auto take = [&](const char* key) {
        auto it = args.find(key);
        if (it == args.end())
            throw std::invalid_argument("kernel '" + std::string(family) + "' needs " + key);
        double v = it->second;
        args.erase(it);
        return v;
    };
    KernelSpec k;
    if (family == "power") {
        double s = take("s");
        double p = take("p");
        k = KernelSpec::power(s, p);
    } else if (family == "powerlog") {
        double s = take("s");
        double sign = take("sign");
        if (sign != 1.0 && sign != -1.0) throw std::invalid_argument("powerlog sign must be +1 or -1");
        k = KernelSpec::powerlog(s, static_cast<int>(sign));
    } else if (family == "constant") {
        k = KernelSpec::constant();
    } else if (family == "truncated") {
        k = KernelSpec::truncated(take("rho"));
    } else {
        throw std::invalid_argument("unknown kernel family '" + std::string(family) + "'");
    }
    if (!args.empty())
        throw std::invalid_argument("kernel: unexpected parameter '" + args.begin()->first + "'");
    return k;
}

std::string to_string(const KernelSpec& k) {
    switch (k.family) {
        case KernelFamily::Power: return "power:s=" + fmt(k.s) + ",p=" + fmt(k.p);
        case KernelFamily::PowerLog: return "powerlog:s=" + fmt(k.s) + ",sign=" + std::to_string(k.sign);
        case KernelFamily::Constant: return "constant";
        case KernelFamily::Truncated: return "truncated:rho=" + fmt(k.rho);
    }
    return "";
}

namespace {

// Composite Simpson in u = log r over [ua, ub].
double simpson_log(const KernelSpec& k, double ua, double ub, int n) {
    auto f = [&](double u) {
        double r = std::exp(u);
        double w = std::min(std::pow(r, k.p - 1.0), 1.0 / r);
        return w * k.profile(r) * r;
    };
    double hstep = (ub - ua) / n;
    double s = f(ua) + f(ub);
    for (int i = 1; i < n; ++i) s += f(ua + i * hstep) * (i % 2 ? 4.0 : 2.0);
    return s * hstep / 3.0;
}

}  // namespace

IntegrabilityReport check_levy_integrability(const KernelSpec& k) {
    constexpr int kDecades = 16;
    constexpr int kPanels = 256;
    IntegrabilityReport rep;
    const double ln10 = std::log(10.0);
    for (int dcd = 0; dcd < kDecades; ++dcd) {
        double ua = (dcd - 8) * ln10;
        double ub = ua + ln10;
        double inc = 0.0;
        // Split at the truncation point so the jump sits on a panel edge.
        double ur = k.family == KernelFamily::Truncated ? std::log(k.rho) : ua;
        if (ur >= ua && ur <= ub) {
            if (ur - 1e-12 > ua) inc += simpson_log(k, ua, ur - 1e-12, kPanels);
            if (ur + 1e-12 < ub) inc += simpson_log(k, ur + 1e-12, ub, kPanels);
        } else
            inc = simpson_log(k, ua, ub, kPanels);
        rep.decade_increments.push_back(inc);
        rep.value += inc;
    }
    const auto& I = rep.decade_increments;
    auto converged = [&](double last, double prev, double prev2) {
        if (!std::isfinite(rep.value)) return false;
        if (last <= 1e-6 * rep.value) return true;
        // Geometric decay toward the end of the range bounds the remainder.
        return last <= 0.9 * prev && prev <= 0.9 * prev2;
    };
    rep.head_converged = converged(I[0], I[1], I[2]);
    rep.tail_converged = converged(I[kDecades - 1], I[kDecades - 2], I[kDecades - 3]);
    rep.pass = rep.head_converged && rep.tail_converged;
    return rep;
}

ScalingCheckReport check_scaling(const KernelSpec& k, double delta, double gamma,
                                 const std::vector<double>& lambdas,
                                 const std::vector<double>& radii) {
    std::vector<double> lam = lambdas, rad = radii;
    if (lam.empty())
        for (int i = 0; i <= 40; ++i) lam.push_back(std::pow(2.0, 0.5 * i));
    if (rad.empty())
        for (int j = -24; j <= 24; ++j) rad.push_back(std::pow(10.0, 0.25 * j));
    for (double l : lam)
        if (!(l >= 1.0)) throw std::invalid_argument("check_scaling: lambda samples must be >= 1");

    ScalingCheckReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    std::size_t undefined = 0;
    double first_undefined = 0.0;
    for (double r : rad) {
        double lr = k.profile(r);
        if (!(lr > 0.0)) {
            if (undefined++ == 0) first_undefined = r;
            continue;
        }
        for (double l : lam) {
            double ratio = k.profile(l * r) / lr;
            double lower = ratio > 0.0 ? std::pow(l, -gamma) / ratio : inf;
            if (lower > rep.l2_lower) {
                rep.l2_lower = lower;
                if (lower > rep.constant && ratio == 0.0)
                    rep.violations.push_back("l2 lower bound: ratio 0 at r=" + fmt(r) + ", lambda=" + fmt(l));
            }
            rep.l2_upper = std::max(rep.l2_upper, ratio / std::pow(l, k.dim));
            rep.decay = std::max(rep.decay, ratio * std::pow(l, delta));
        }
    }
    if (undefined > 0)
        rep.violations.push_back("ratio undefined (l(r) = 0) at " + std::to_string(undefined) +
                                 " radii, first r=" + fmt(first_undefined));
    rep.l2_pass = undefined == 0 && rep.l2_lower <= rep.constant && rep.l2_upper <= rep.constant;
    rep.decay_pass = undefined == 0 && rep.decay <= rep.constant;
    if (rep.l2_lower > rep.constant && rep.l2_lower < inf)
        rep.violations.push_back("l2 lower bound constant " + fmt(rep.l2_lower));
    if (rep.l2_upper > rep.constant) rep.violations.push_back("l2 upper bound constant " + fmt(rep.l2_upper));
    if (rep.decay > rep.constant) rep.violations.push_back("decay bound constant " + fmt(rep.decay));
    return rep;
}

}  // namespace nlvis
