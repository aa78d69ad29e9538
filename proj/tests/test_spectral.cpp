#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlvis/random.hpp"
#include "nlvis/spectral.hpp"

using namespace nlvis;

namespace {

Grid two_cells() {
    std::vector<Cell> cells(2);
    cells[0].center = {0.5, 0.5};
    cells[0].measure = 1.0;
    cells[1].ix = 1;
    cells[1].center = {1.5, 0.5};
    cells[1].measure = 1.0;
    return grid_from_cells(cells, 1.0);
}

FormOperator two_cell_form() {
    return FormOperator::assemble(two_cells(), PairSet::all_visible(2), KernelSpec::constant(), FormMode::Censored,
                                  2.0);
}

std::vector<double> random_u(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> u(n);
    for (auto& x : u) x = rng.uniform(-1.0, 1.0);
    return u;
}

Grid dumbbell_grid(DumbbellVariant v, double R) {
    DomainSpec d = make_dumbbell(v);
    return build_grid(d, d.dumbbell->anchor, R, 0.5, 1);
}

}  // namespace

TEST(Poincare, TwoCells) {
    auto r = poincare_constant_l2(two_cell_form());
    EXPECT_NEAR(r.lambda1, 4.0, 1e-12);
    EXPECT_NEAR(r.constant, 0.25, 1e-12);
    EXPECT_NEAR(poincare_constant_dense(two_cell_form()), 0.25, 1e-12);
}

TEST(Poincare, NeumannUnitSquare) {
    Grid g = build_grid(make_box({0, 0}, {1, 1}), 1.0 / 64.0, 1);
    auto r = poincare_constant_l2(FormOperator::assemble_local(g, 2.0));
    const double target = 1.0 / (std::numbers::pi * std::numbers::pi);
    EXPECT_LT(std::abs(r.constant - target) / target, 0.05);
}

TEST(Poincare, LocalMatchesDiscreteCosineMode) {
    // Forward differences on an m x m grid: lambda_1 = 4 sin^2(pi / (2m)) / h^2.
    const int m = 16;
    Grid g = build_grid(make_box({0, 0}, {1, 1}), 1.0 / m, 1);
    auto r = poincare_constant_l2(FormOperator::assemble_local(g, 2.0));
    double s = std::sin(std::numbers::pi / (2.0 * m));
    EXPECT_NEAR(r.lambda1, 4.0 * s * s * m * m, 1e-8 * r.lambda1);
}

TEST(Poincare, CutCorridorIsInfinite) {
    Grid g = dumbbell_grid(DumbbellVariant::Curved, 6.0);
    auto form = FormOperator::assemble(g, visibility_pairs(g), KernelSpec::power(0.25, 2), FormMode::Visible, 2.0);
    auto cut = form.without([&](const WeightedPair& p) {
        return (g.cells[p.i].center.x < 0.0) != (g.cells[p.j].center.x < 0.0);
    });
    auto r = poincare_constant_l2(cut);
    EXPECT_TRUE(r.disconnected);
    EXPECT_TRUE(std::isinf(r.constant));
    EXPECT_EQ(r.components, 2u);
}

TEST(Poincare, IterativeMatchesDense) {
    for (auto v : {DumbbellVariant::Straight, DumbbellVariant::Curved}) {
        Grid g = dumbbell_grid(v, 4.0);
        auto form = FormOperator::assemble(g, visibility_pairs(g), KernelSpec::power(0.25, 2), FormMode::Visible, 2.0);
        double dense = poincare_constant_dense(form);
        EXPECT_NEAR(poincare_constant_l2(form).constant, dense, 1e-7 * dense);
        EigenOptions sparse;
        sparse.dense_limit = 0;
        EXPECT_NEAR(poincare_constant_l2(form, sparse).constant, dense, 1e-7 * dense);
    }
}

TEST(Poincare, RejectsDydaAndOtherExponents) {
    Grid g = dumbbell_grid(DumbbellVariant::Straight, 4.0);
    PairSet p = visibility_pairs(g);
    EXPECT_THROW(poincare_constant_l2(FormOperator::assemble(g, p, KernelSpec::power(0.25, 2), FormMode::Dyda, 2.0)),
                 std::invalid_argument);
    EXPECT_THROW(poincare_constant_l2(FormOperator::assemble_local(g, 1.0)), std::invalid_argument);
}

TEST(Poincare, ModeMonotonicity) {
    for (auto v : {DumbbellVariant::Straight, DumbbellVariant::Curved}) {
        Grid g = dumbbell_grid(v, 5.0);
        PairSet p = visibility_pairs(g);
        const KernelSpec k = KernelSpec::power(0.5, 2);
        double vis = poincare_constant_l2(FormOperator::assemble(g, p, k, FormMode::Visible, 2.0)).constant;
        double cen = poincare_constant_l2(FormOperator::assemble(g, p, k, FormMode::Censored, 2.0)).constant;
        EXPECT_GE(vis, cen);
    }
    Grid a = build_grid(make_annulus(1.0 / 3.0, 1.0), 0.125, 4);
    PairSet p = visibility_pairs(a);
    const KernelSpec k = KernelSpec::power(0.5, 2);
    EXPECT_GE(poincare_constant_l2(FormOperator::assemble(a, p, k, FormMode::Visible, 2.0)).constant,
              poincare_constant_l2(FormOperator::assemble(a, p, k, FormMode::Censored, 2.0)).constant);
}

TEST(Poincare, ScaleSanity) {
    Grid g = dumbbell_grid(DumbbellVariant::Straight, 4.0);
    auto form = FormOperator::assemble(g, visibility_pairs(g), KernelSpec::power(0.25, 2), FormMode::Visible, 2.0);
    double base = poincare_constant_l2(form).constant;
    for (double c : {2.0, 0.25, 8.0}) EXPECT_EQ(poincare_constant_l2(form.scaled(c)).constant, base / c) << c;
}

TEST(Rayleigh, TwoCells) {
    std::vector<double> u{0, 1};
    EXPECT_DOUBLE_EQ(rayleigh_ratio(two_cell_form(), u, 2.0), 0.25);
    std::vector<double> c{3, 3};
    EXPECT_THROW(rayleigh_ratio(two_cell_form(), c, 2.0), ZeroEnergyError);
}

TEST(Rayleigh, BoundedByPoincare) {
    const DomainSpec doms[] = {make_annulus(1.0 / 3.0, 1.0), make_box({0, 0}, {1, 1})};
    for (const auto& d : doms) {
        Grid g = build_grid(d, 0.125, 4);
        auto form = FormOperator::assemble(g, visibility_pairs(g), KernelSpec::power(0.5, 2), FormMode::Visible, 2.0);
        double cp = poincare_constant_l2(form).constant;
        for (std::uint64_t s = 0; s < 50; ++s) {
            auto u = random_u(g.size(), s);
            ASSERT_LE(rayleigh_ratio(form, u, 2.0), cp * (1.0 + 1e-9));
        }
    }
    Grid g = dumbbell_grid(DumbbellVariant::Straight, 6.0);
    auto form = FormOperator::assemble_local(g, 2.0);
    double cp = poincare_constant_l2(form).constant;
    for (std::uint64_t s = 0; s < 50; ++s) ASSERT_LE(rayleigh_ratio(form, random_u(g.size(), s), 2.0), cp * (1 + 1e-9));
}

TEST(Witness, SymmetryAndBounds) {
    Grid g = dumbbell_grid(DumbbellVariant::Straight, 8.0);
    auto u = witness_step_function(g);
    EXPECT_NEAR(cell_mean(g, u), 0.0, 1e-12);
    for (double v : u) {
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_THROW(witness_step_function(build_grid(make_box({0, 0}, {1, 1}), 0.5, 1)), std::invalid_argument);
}

TEST(Witness, DeviationGrowsLikeArea) {
    auto dev = [](double R) {
        Grid g = dumbbell_grid(DumbbellVariant::Straight, R);
        auto u = witness_step_function(g);
        double mean = cell_mean(g, u), s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += g.cells[i].measure * (u[i] - mean) * (u[i] - mean);
        return s;
    };
    double ratio = dev(16.0) / dev(8.0);
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
}

TEST(Witness, ClassesMatchPlainRatio) {
    Grid g = dumbbell_grid(DumbbellVariant::Curved, 8.0);
    auto form = FormOperator::matrix_free(g, KernelSpec::power(0.25, 2), FormMode::Visible, 2.0);
    auto u = witness_step_function(g);
    EXPECT_EQ(rayleigh_ratio(form, u, 2.0, witness_classes(g)), rayleigh_ratio(form, u, 2.0));
}

TEST(FitPowerLaw, Examples) {
    auto a = fit_power_law({{2, 4}, {4, 16}, {8, 64}});
    EXPECT_NEAR(a.exponent, 2.0, 1e-12);
    EXPECT_NEAR(a.stderr_, 0.0, 1e-12);
    EXPECT_NEAR(fit_power_law({{2, 8}, {4, 64}, {8, 512}}).exponent, 3.0, 1e-12);
    EXPECT_NEAR(fit_power_law({{8, std::pow(8, 1.5)}, {16, std::pow(16, 1.5)}, {32, std::pow(32, 1.5)}}).exponent,
                1.5, 1e-12);
    EXPECT_THROW(fit_power_law({{2, 1}, {4, 0}, {8, 1}}), std::invalid_argument);
    EXPECT_THROW(fit_power_law({{2, 1}, {4, 2}}), std::invalid_argument);
}

TEST(Predicted, CaseTable) {
    ScalingSetup s;
    s.kernel = KernelSpec::power(0.25, 2);
    s.p = 2;
    EXPECT_EQ(predicted_exponent(s).first, 1.5);
    s.variant = DumbbellVariant::Curved;
    EXPECT_EQ(predicted_exponent(s).first, 2.0);
    s.variant = DumbbellVariant::Straight;
    s.kernel = KernelSpec::power(0.75, 2);
    EXPECT_EQ(predicted_exponent(s).first, 2.0);
    s.kernel = KernelSpec::power(0.5, 2);
    EXPECT_THROW(predicted_exponent(s), std::invalid_argument);  // s = 1/p
    s.kernel = KernelSpec::power(0.9, 2);
    s.kernel->p = 3;
    s.p = 3;
    EXPECT_THROW(predicted_exponent(s), std::invalid_argument);  // p >= d/s
    ScalingSetup loc;
    loc.p = 1;
    EXPECT_EQ(predicted_exponent(loc), std::make_pair(2.0, false));
    loc.p = 2;
    EXPECT_EQ(predicted_exponent(loc), std::make_pair(2.0, true));
    loc.p = 3;
    EXPECT_THROW(predicted_exponent(loc), std::invalid_argument);
}

TEST(Scaling, Preconditions) {
    ScalingSetup s;
    s.kernel = KernelSpec::power(0.25, 2);
    s.R = {8, 16};
    EXPECT_THROW(scaling_experiment(s), std::invalid_argument);
    s.R = {16, 8, 32};
    EXPECT_THROW(scaling_experiment(s), std::invalid_argument);
    s.R = {4, 8, 16};
    s.h = 0.75;
    EXPECT_THROW(scaling_experiment(s), std::invalid_argument);
}

TEST(Scaling, EigenDominatesWitness) {
    ScalingSetup s;
    s.kernel = KernelSpec::power(0.25, 2);
    s.R = {4, 8, 16};
    s.method = ScalingMethod::Witness;
    auto w = scaling_experiment(s);
    s.method = ScalingMethod::Eigen;
    auto e = scaling_experiment(s);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_GE(e.samples[k].value, w.samples[k].value);
    EXPECT_LE(std::abs(e.fit.exponent - w.fit.exponent), 0.4);
}
