#include <gtest/gtest.h>

#include <cmath>

#include "nlvis/kernels.hpp"

using namespace nlvis;

TEST(EvalKernel, Examples) {
    EXPECT_DOUBLE_EQ(eval_kernel(KernelSpec::power(0.5, 2), 1.0), 1.0);
    EXPECT_DOUBLE_EQ(eval_kernel(KernelSpec::constant(), 2.0), 0.25);
    EXPECT_DOUBLE_EQ(eval_kernel(KernelSpec::truncated(1.0), 2.0), 0.0);
}

TEST(EvalKernel, NonPositiveRadiusIsError) {
    EXPECT_THROW(eval_kernel(KernelSpec::constant(), 0.0), std::invalid_argument);
    EXPECT_THROW(eval_kernel(KernelSpec::constant(), -1.0), std::invalid_argument);
}

TEST(EvalKernel, ScaleIdentity) {
    for (double s : {0.25, 0.5, 0.75}) {
        KernelSpec k = KernelSpec::power(s, 2.0);
        for (int i = 0; i <= 8; ++i) {
            double lam = std::pow(2.0, i);
            for (int j = -6; j <= 6; ++j) {
                double r = std::pow(2.0, j);
                double lhs = eval_kernel(k, lam * r), rhs = std::pow(lam, -2.0 - s * 2.0) * eval_kernel(k, r);
                EXPECT_NEAR(lhs, rhs, 4e-16 * std::abs(rhs)) << "s=" << s << " lam=" << lam << " r=" << r;
            }
        }
    }
}

TEST(EvalKernel, ProfilesNonIncreasing) {
    std::vector<KernelSpec> ks{KernelSpec::power(0.25, 2), KernelSpec::power(0.75, 1.5),
                               KernelSpec::powerlog(0.5, 1), KernelSpec::powerlog(0.5, -1),
                               KernelSpec::powerlog(0.8, -1), KernelSpec::constant(),
                               KernelSpec::truncated(1.0)};
    for (const auto& k : ks) {
        double prev = INFINITY;
        for (int j = -400; j <= 400; ++j) {
            double r = std::pow(10.0, j / 100.0);
            double v = k.profile(r);
            ASSERT_LE(v, prev) << to_string(k) << " r=" << r;
            prev = v;
        }
    }
}

TEST(ParseKernel, RoundTripAndErrors) {
    for (const char* text : {"power:s=0.25,p=2", "powerlog:s=0.5,sign=-1", "constant", "truncated:rho=1.5"})
        EXPECT_EQ(to_string(parse_kernel(text)), text);
    EXPECT_EQ(to_string(parse_kernel("power:p=2,s=0.25")), "power:s=0.25,p=2");
    for (const char* bad : {"power:s=1.5,p=2", "power:s=0.25", "powerlog:s=0.5,sign=2", "truncated:rho=-1",
                            "gauss", "power:s=abc,p=2", "power:s=0.5,p=2,q=1", "power:s=0.9,p=3"})
        EXPECT_THROW(parse_kernel(bad), std::invalid_argument) << bad;
}

TEST(Integrability, Examples) {
    EXPECT_TRUE(check_levy_integrability(KernelSpec::power(0.5, 2)).pass);
    KernelSpec edge = KernelSpec::power(0.5, 2);
    edge.s = 1.0;  // l(r) = r^-2, on purpose outside the valid range
    auto rep = check_levy_integrability(edge);
    EXPECT_FALSE(rep.pass);
    EXPECT_FALSE(rep.head_converged);
    auto tr = check_levy_integrability(KernelSpec::truncated(1.0));
    EXPECT_TRUE(tr.pass);
    EXPECT_NEAR(tr.value, 0.5, 1e-6);
}

TEST(Integrability, PowerValueMatchesClosedForm) {
    // p = 2: int_0^1 r^{1-2s} dr + int_1^inf r^{-1-2s} dr = 1/(2-2s) + 1/(2s).
    for (double s : {0.25, 0.5, 0.75}) {
        auto rep = check_levy_integrability(KernelSpec::power(s, 2.0));
        double tail_cut = std::pow(1e8, -2 * s) / (2 * s) + std::pow(1e-8, 2 - 2 * s) / (2 - 2 * s);
        EXPECT_NEAR(rep.value, 1 / (2 - 2 * s) + 1 / (2 * s) - tail_cut, 1e-6) << s;
    }
}

TEST(ScalingCheck, Examples) {
    auto p = check_scaling(KernelSpec::power(0.5, 2), 1.0, 1.0);
    EXPECT_TRUE(p.l2_pass);
    EXPECT_TRUE(p.decay_pass);
    auto c = check_scaling(KernelSpec::constant(), 0.5, 0.0);
    EXPECT_TRUE(c.l2_pass);
    EXPECT_FALSE(c.decay_pass);
    auto t = check_scaling(KernelSpec::truncated(1.0), 1.0, 1.0, {4.0}, {0.5});
    EXPECT_FALSE(t.l2_pass);
    EXPECT_FALSE(t.violations.empty());
}
