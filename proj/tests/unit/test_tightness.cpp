#include <gtest/gtest.h>

#include <cmath>

#include "besovtight/rng.hpp"
#include "besovtight/tightness.hpp"

using namespace besovtight;

namespace {

const WaveletBasis2D& haar() {
    static const auto b = WaveletBasis2D::daubechies(1, 10);
    return b;
}
const WaveletBasis2D& db2() {
    static const auto b = WaveletBasis2D::daubechies(2, 12);
    return b;
}

const Rect kU{-1, -1, 4, 4};

CellGrid grid_on_U(double a) {
    const int n = static_cast<int>(std::lround(5.0 / a));
    return CellGrid{{-1, -1}, a, n, n};
}

LatticeField rademacher(const CellGrid& g, Xoshiro256& rng) {
    std::vector<double> v(g.size());
    for (double& x : v) x = rng.coin() ? 1.0 : -1.0;
    return LatticeField(g, std::move(v));
}

MomentRegion region(int n_min, int n_max) {
    return MomentRegion{AdaptedRegion{Rect{0, 0, 3, 3}, n_min, Domain::box(kU), "K"}, n_min, n_max,
                        PositionRule::support_in_K, "K"};
}

}  // namespace

TEST(Magnetization, FieldValues) {
    using namespace besovtight::ising;
    const auto d = LatticeDomain::box(2, 2, Boundary::plus);
    SpinConfiguration s{{1, 1, 1, 1}, Boundary::plus};
    const auto f = magnetization_field(s, d, 1.0, Rect{-0.5, -0.5, 1.5, 1.5});
    double integral = 0.0;
    for (double v : f.values()) integral += v;  // cell area 1
    EXPECT_DOUBLE_EQ(integral, 4.0);
    EXPECT_EQ(f.provenance(), FieldProvenance::magnetization);

    s.sigma = {1, -1, 1, 1};
    const auto h = magnetization_field(s, d, 0.5, Rect{-0.25, -0.25, 0.75, 0.75});
    EXPECT_NEAR(h.at(0, 0), std::pow(2.0, 0.125), 1e-15);
    EXPECT_NEAR(h.at(1, 0), -std::pow(2.0, 0.125), 1e-15);
}

TEST(Magnetization, GridMustTileU) {
    EXPECT_THROW(magnetization_grid(Rect{0, 0, 1, 1}, 0.25, 3, 4), std::invalid_argument);
    EXPECT_THROW(magnetization_grid(Rect{0, 0, 1, 1}, 0.25, 4, 4), std::invalid_argument);  // centres off aZ^2
    EXPECT_NO_THROW(magnetization_grid(Rect{-0.125, -0.125, 0.875, 0.875}, 0.25, 4, 4));
}

TEST(MomentAccumulator, RequiresEvenP) {
    EXPECT_THROW(MomentAccumulator(haar(), region(0, 3), 3.0), std::invalid_argument);
    EXPECT_THROW(MomentAccumulator(haar(), region(0, 3), 1.0), std::invalid_argument);
    EXPECT_NO_THROW(MomentAccumulator(haar(), region(0, 3), 4.0));
}

TEST(MomentAccumulator, SupportRuleKeepsSupportsInsideK) {
    const auto mr = region(0, 3);
    for (int n = 0; n <= 3; ++n) {
        const auto box = moment_positions(mr, db2(), n);
        const double len = std::ldexp(3.0, -n);
        EXPECT_GE(std::ldexp(static_cast<double>(box.i0), -n), 0.0);
        EXPECT_LE(std::ldexp(static_cast<double>(box.i1), -n) + len, 3.0 + 1e-12);
    }
    EXPECT_EQ(moment_positions(mr, db2(), 0).count(), 1u);
    EXPECT_EQ(moment_positions(mr, haar(), 0).count(), 9u);
}

TEST(MomentScaling, WhiteNoiseSecondMoment) {
    // Rademacher cells of side a: E|w|^2 = a^2 at every Haar position with 2^-n >= a,
    // so 2^{n} E[w^2]^{1/2} = 2^n a and the fitted slope is 1.
    const double a = 1.0 / 32;
    const auto g = grid_on_U(a);
    Xoshiro256 rng(4);
    std::vector<MomentAccumulator> chains;
    for (int c = 0; c < 32; ++c) {
        chains.emplace_back(haar(), region(0, 4), 2.0);
        for (int s = 0; s < 4; ++s) chains.back().add(rademacher(g, rng));
    }
    // pooled per-position second moment
    double acc = 0.0;
    std::size_t count = 0, samples = 0;
    for (const auto& c : chains) samples += c.samples();
    for (std::size_t t = 0; t < chains[0].sum(3, 3).size(); ++t) {
        double s = 0.0;
        for (const auto& c : chains) s += c.sum(3, 3)[t];
        acc += s / static_cast<double>(samples);
        ++count;
    }
    EXPECT_NEAR(acc / static_cast<double>(count), a * a, 0.02 * a * a);

    const auto rep = moment_bound_scaling(chains);
    ASSERT_TRUE(rep.has_fit);
    EXPECT_NEAR(rep.beta_hat(), -1.0, 0.1);
    for (const auto& lv : rep.levels) EXPECT_NEAR(lv.value, std::ldexp(a, lv.n), 0.25 * std::ldexp(a, lv.n));
}

TEST(MomentScaling, ConstantFieldHasNoMotherSignal) {
    const auto g = grid_on_U(1.0 / 32);
    const std::vector<LatticeField> ens{LatticeField::constant(g, 2.0), LatticeField::constant(g, 2.0)};
    const auto rep = moment_bound_scaling(ens, db2(), region(0, 3), 2.0, SupEstimator::plug_in);
    for (const auto& lv : rep.levels) EXPECT_LT(lv.value, 1e-9);
    // father: 2^{-dk/2} |<2, phi_{0,x}>| = 2
    EXPECT_NEAR(rep.father.value, 2.0, 1e-6);
}

TEST(MomentScaling, HomogeneousAndSignInvariant) {
    const auto g = grid_on_U(1.0 / 16);
    Xoshiro256 rng(8);
    std::vector<LatticeField> ens, scaled, flipped;
    for (int c = 0; c < 6; ++c) {
        auto f = rademacher(g, rng);
        scaled.push_back(f.scaled(-2.5));
        flipped.push_back(f.scaled(-1.0));
        ens.push_back(std::move(f));
    }
    for (auto est : {SupEstimator::plug_in, SupEstimator::cross_fit}) {
        const auto r0 = moment_bound_scaling(ens, haar(), region(0, 3), 4.0, est);
        const auto r1 = moment_bound_scaling(scaled, haar(), region(0, 3), 4.0, est);
        const auto r2 = moment_bound_scaling(flipped, haar(), region(0, 3), 4.0, est);
        for (std::size_t t = 0; t < r0.levels.size(); ++t) {
            EXPECT_NEAR(r1.levels[t].value, 2.5 * r0.levels[t].value, 1e-12 * r1.levels[t].value);
            EXPECT_NEAR(r2.levels[t].value, r0.levels[t].value, 1e-12 * r0.levels[t].value);
        }
        EXPECT_NEAR(r1.slope, r0.slope, 1e-12);
    }
}

TEST(MomentScaling, CrossFitNeverExceedsPlugIn) {
    const auto g = grid_on_U(1.0 / 16);
    Xoshiro256 rng(9);
    std::vector<LatticeField> ens;
    for (int c = 0; c < 8; ++c) ens.push_back(rademacher(g, rng));
    const auto plug = moment_bound_scaling(ens, haar(), region(0, 3), 2.0, SupEstimator::plug_in);
    const auto cross = moment_bound_scaling(ens, haar(), region(0, 3), 2.0, SupEstimator::cross_fit);
    for (std::size_t t = 0; t < plug.levels.size(); ++t) EXPECT_LE(cross.levels[t].value, plug.levels[t].value + 1e-15);
}

TEST(Verdict, StrictInequalities) {
    MomentScalingReport rep;
    rep.has_fit = true;
    rep.slope = 0.125;
    rep.slope_stderr = 0.0625;
    auto v = tightness_verdict(rep, -0.5, 2.0, kInf, 2.0);
    EXPECT_DOUBLE_EQ(v.besov_margin, 0.25);
    EXPECT_TRUE(v.besov_consistent);
    EXPECT_DOUBLE_EQ(v.holder_margin, -0.75);
    EXPECT_FALSE(v.holder_consistent);
    EXPECT_EQ(v.besov_label(), "TIGHT-consistent");
    EXPECT_EQ(v.holder_label(), "NOT-consistent");
    // boundary case: alpha = beta_hat - m se exactly
    v = tightness_verdict(rep, -0.25, 2.0, kInf, 2.0);
    EXPECT_DOUBLE_EQ(v.besov_margin, 0.0);
    EXPECT_FALSE(v.besov_consistent);
    // p = inf drops the d/p shift
    v = tightness_verdict(rep, -0.5, kInf, kInf, 2.0);
    EXPECT_DOUBLE_EQ(v.holder_margin, v.besov_margin);
    rep.has_fit = false;
    EXPECT_THROW(tightness_verdict(rep, -0.5, 2.0, kInf), std::invalid_argument);
}

TEST(Converse, ConstantFieldGivesMassTimesArea) {
    const double a = 1.0 / 64;
    const auto g = grid_on_U(a);
    const double c = std::pow(a, -0.125);
    ConverseSetup setup{{1.5, 1.5}, 1.0, {0.5, 0.125, 1.0 / 32, 1.0 / 128}};
    ConverseAccumulator acc(g, setup, radial_step_eta);
    const auto x = acc.evaluate(LatticeField::constant(g, c));
    const double expected = std::numbers::pi * c * smooth_radial_step_mass();
    for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(x[t], expected, 2e-3 * expected) << setup.lambdas[t];
    EXPECT_TRUE(std::isnan(x[3]));
    EXPECT_FALSE(acc.usable(3));

    ConverseAccumulator twice(g, setup, [](Point y) { return 2.0 * radial_step_eta(y); });
    const auto x2 = twice.evaluate(LatticeField::constant(g, c));
    for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(x2[t], 2 * x[t], 1e-12 * x[t]);
}

TEST(Converse, ProfileOfConstantFieldIsFlat) {
    const double a = 1.0 / 64;
    const auto g = grid_on_U(a);
    const std::vector<LatticeField> ens{LatticeField::constant(g, 1.0), LatticeField::constant(g, 1.0)};
    const auto prof = lower_bound_profile(ens, radial_step_eta, ConverseSetup{{1.5, 1.5}, 1.0, {0.5, 0.25, 0.125}});
    ASSERT_TRUE(prof.has_fit);
    EXPECT_NEAR(prof.growth, 0.0, 1e-3);
}

TEST(Converse, RejectsDiscLeavingDomain) {
    const auto g = grid_on_U(1.0 / 16);
    EXPECT_THROW(ConverseAccumulator(g, ConverseSetup{{1.5, 1.5}, 2.4, {0.5}}, radial_step_eta), std::invalid_argument);
}

TEST(Kolmogorov, GapsShrinkToZero) {
    const auto g = grid_on_U(1.0 / 32);
    Xoshiro256 rng(10);
    const auto f = rademacher(g, rng);
    const AdaptedRegion reg{Rect{0, 0, 3, 3}, 1, Domain::box(kU), "K"};
    const auto gaps = kolmogorov_convergence_check(f, haar(), reg, 4, -0.25, 2.0);
    ASSERT_EQ(gaps.size(), 4u);
    for (std::size_t t = 1; t < gaps.size(); ++t) EXPECT_LE(gaps[t], gaps[t - 1] + 1e-12);
    EXPECT_LT(gaps.back(), 1e-10);
    const auto zero = kolmogorov_convergence_check(f.scaled(0.0), haar(), reg, 3, -0.25, 2.0);
    for (double z : zero) EXPECT_EQ(z, 0.0);
}

TEST(Kolmogorov, CellsCentredOnLatticeStillReachZero) {
    // cells of side 1/32 centred on (1/32)Z^2 straddle the level-5 dyadic lines
    const double a = 1.0 / 32;
    const CellGrid g{{-32.5 * a, -32.5 * a}, a, 160, 160};
    Xoshiro256 rng(11);
    const auto f = rademacher(g, rng);
    const AdaptedRegion reg{Rect{0, 0, 3, 3}, 1, Domain::box(g.extent()), "K"};
    const auto gaps = kolmogorov_convergence_check(f, haar(), reg, 5, -0.25, 2.0);
    ASSERT_EQ(gaps.size(), 5u);
    EXPECT_GT(gaps.front(), 1.0);
    EXPECT_LT(gaps.back(), 1e-10);
}
