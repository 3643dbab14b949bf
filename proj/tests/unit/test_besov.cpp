#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "besovtight/besov.hpp"
#include "besovtight/rng.hpp"

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
const Rect kK{0, 0, 3, 3};

LatticeField random_field(std::uint64_t seed, double a = 1.0 / 32) {
    const int n = static_cast<int>(std::lround(5.0 / a));
    CellGrid g{{-1, -1}, a, n, n};
    Xoshiro256 rng(seed);
    std::vector<double> v(g.size());
    for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
    return LatticeField(g, std::move(v));
}

AdaptedRegion region(int k) { return AdaptedRegion{kK, k, Domain::box(kU), "K"}; }

// Seminorm computed straight from the coefficients for finite p, q.
double oracle_seminorm(const CoefficientPyramid& pyr, double alpha, double p, double q) {
    double fv = 0.0;
    for (double v : pyr.father().values) fv += std::pow(std::abs(v), p);
    double total = std::pow(2.0, 2 * pyr.k() * (0.5 - 1 / p)) * std::pow(fv, 1 / p);
    double acc = 0.0;
    for (int n = pyr.k(); n <= pyr.n_max(); ++n) {
        double s = 0.0;
        for (int i = 1; i <= 3; ++i)
            for (double v : pyr.mother(n, i).values) s += std::pow(std::abs(v), p);
        const double w = std::pow(2.0, 2 * n * (0.5 - 1 / p)) * std::pow(s, 1 / p);
        acc += std::pow(std::pow(2.0, alpha * n) * w, q);
    }
    return total + std::pow(acc, 1 / q);
}

}  // namespace

TEST(BesovParams, Validation) {
    EXPECT_NO_THROW((BesovParams{-0.5, 2, kInf}.validate(1)));
    EXPECT_THROW((BesovParams{-1.0, 2, kInf}.validate(1)), std::invalid_argument);
    EXPECT_THROW((BesovParams{0.0, 0.5, kInf}.validate(2)), std::invalid_argument);
    EXPECT_THROW((BesovParams{0.0, 2, 0.5}.validate(2)), std::invalid_argument);
}

TEST(Adapted, DistanceCondition) {
    const Domain U = Domain::box(kU);
    EXPECT_FALSE(check_adapted(kK, 0, U, std::sqrt(2.0)));
    EXPECT_TRUE(check_adapted(kK, 1, U, std::sqrt(2.0)));
    EXPECT_FALSE(check_adapted(kK, 2, U, 3 * std::sqrt(2.0)));
    EXPECT_TRUE(check_adapted(kK, 3, U, 3 * std::sqrt(2.0)));
    EXPECT_THROW(check_adapted(Rect{-2, 0, 1, 1}, 5, U, 1.0), std::invalid_argument);
    EXPECT_TRUE(check_adapted(kK, 0, Domain::whole_plane(), 100.0));
}

TEST(Adapted, SpanningSequenceIsNestedAndAdapted) {
    const double R = db2().support_radius();
    const auto seq = spanning_sequence(Rect{0, 0, 4, 4}, 0.5, R, 8);
    ASSERT_FALSE(seq.regions.empty());
    for (std::size_t t = 1; t < seq.regions.size(); ++t)
        EXPECT_TRUE(seq.regions[t].K.contains(seq.regions[t - 1].K));
    for (const auto& r : seq.regions) EXPECT_TRUE(check_adapted(r.K, r.k, r.U, R));
    EXPECT_FALSE(spanning_sequence(Rect{0, 0, 1, 1}, 0.5, 100.0, 3).warnings.empty());
}

TEST(Pyramid, LevelSizes) {
    const auto pyr = build_pyramid(random_field(1), haar(), region(1), 3);
    EXPECT_EQ(pyr.father().values.size(), 49u);  // 7 x 7 points of Lambda_1 in [0, 3]^2
    EXPECT_EQ(pyr.mother(3, 2).values.size(), 25u * 25u);
    EXPECT_THROW(build_pyramid(random_field(1), haar(), region(0), 3), std::invalid_argument);
}

TEST(Seminorm, MatchesDirectFormula) {
    const auto f = random_field(2);
    for (const auto* b : {&haar(), &db2()}) {
        const int k = b == &haar() ? 1 : 3;
        const auto pyr = build_pyramid(f, *b, region(k), 5);
        for (double p : {1.0, 2.0, 4.0})
            for (double q : {1.0, 3.0})
                EXPECT_NEAR(local_seminorm(pyr, {-0.3, p, q}), oracle_seminorm(pyr, -0.3, p, q),
                            1e-12 * oracle_seminorm(pyr, -0.3, p, q));
    }
}

TEST(Seminorm, InfiniteExponents) {
    const auto pyr = build_pyramid(random_field(3), haar(), region(1), 4);
    double m = 0.0;
    for (double v : pyr.father().values) m = std::max(m, std::abs(v));
    double best = 0.0;
    for (int n = 1; n <= 4; ++n)
        for (int i = 1; i <= 3; ++i)
            for (double v : pyr.mother(n, i).values) best = std::max(best, std::pow(2.0, (-0.5 + 1) * n) * std::abs(v));
    EXPECT_NEAR(local_seminorm(pyr, {-0.5, kInf, kInf}), 2.0 * m + best, 1e-12);
}

TEST(Seminorm, HomogeneityAndTriangle) {
    const auto f = random_field(4), g = random_field(5);
    const auto pf = build_pyramid(f, db2(), region(3), 5);
    const auto pg = build_pyramid(g, db2(), region(3), 5);
    const BesovParams bp{-0.25, 2, kInf};
    EXPECT_NEAR(local_seminorm(pf.scaled(-3.0), bp), 3.0 * local_seminorm(pf, bp), 1e-12);
    EXPECT_LE(local_seminorm(pf + pg, bp), local_seminorm(pf, bp) + local_seminorm(pg, bp) + 1e-12);
    // linearity of the transform
    const auto psum = build_pyramid(f + g, db2(), region(3), 5);
    EXPECT_NEAR(local_seminorm(psum - (pf + pg), bp), 0.0, 1e-12);
}

TEST(Projection, HaarNormEquivalenceIsExact) {
    const auto f = random_field(6);
    for (int n = 0; n <= 4; ++n)
        for (double p : {1.0, 2.0, 3.5, kInf}) {
            const auto b = projection_norm_bounds(f, haar(), n, p);
            EXPECT_NEAR(b.ratio, 1.0, 1e-10) << "n = " << n << " p = " << p;
        }
}

TEST(Projection, Db2RatioBounded) {
    const auto f = random_field(7);
    for (int n = 0; n <= 3; ++n) {
        const auto b = projection_norm_bounds(f, db2(), n, 2.0);
        EXPECT_GT(b.ratio, 0.1);
        EXPECT_LT(b.ratio, 10.0);
    }
}

TEST(Embedding, InequalityHolds) {
    const auto pyr = build_pyramid(random_field(8), db2(), region(3), 5);
    const BesovParams first{-0.5, 4, kInf};
    const BesovParams second{-0.5 + 2 * (0.5 - 0.25), 2, 2};
    const auto r = embedding_check(pyr, first, second);
    EXPECT_LE(r.norm1, r.bound * r.norm2);
    EXPECT_THROW(embedding_check(pyr, second, first), std::invalid_argument);
}

TEST(Ball, NonStrictMembership) {
    const auto pyr = build_pyramid(random_field(9), haar(), region(1), 3);
    const BesovParams bp{-0.5, 2, kInf};
    const double s = local_seminorm(pyr, bp);
    EXPECT_TRUE(in_coefficient_ball(pyr, bp, {{"K", s}}));
    EXPECT_FALSE(in_coefficient_ball(pyr, bp, {{"K", s * 0.999}}));
    EXPECT_THROW(in_coefficient_ball(pyr, bp, {{"other", 1.0}}), std::invalid_argument);
}

TEST(Reconstruction, HaarRecoversFieldOnInnerRegion) {
    // With a = 1/32 and n_max = 4, V_5 f equals f on cells whose level-1 father supports lie in K.
    const auto f = random_field(10);
    const auto pyr = build_pyramid(f, haar(), region(1), 4);
    const auto rec = reconstruct_truncated(pyr, 4, haar(), f.grid());
    const Rect inner = inner_region(kK, 1, haar());
    double worst = 0.0;
    const auto& g = f.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Point c = g.center(i, j);
            if (c.x > inner.x0 && c.x < inner.x1 && c.y > inner.y0 && c.y < inner.y1)
                worst = std::max(worst, std::abs(rec.at(i, j) - f.at(i, j)));
        }
    EXPECT_LT(worst, 1e-12);
}

TEST(HolderDictionary, ZeroAndScaling) {
    const auto f = random_field(11, 1.0 / 16);
    const auto dict = default_holder_dictionary(-0.5);
    const auto lam = dyadic_lambdas(0, 2);
    const std::vector<Point> xs{{1, 1}, {1.5, 2}};
    const double n1 = holder_dictionary_norm(f, -0.5, dict, lam, xs);
    EXPECT_GT(n1, 0.0);
    EXPECT_NEAR(holder_dictionary_norm(f.scaled(2.0), -0.5, dict, lam, xs), 2 * n1, 1e-12);
    EXPECT_EQ(holder_dictionary_norm(f.scaled(0.0), -0.5, dict, lam, xs), 0.0);
    EXPECT_THROW(holder_dictionary_norm(f, 0.5, dict, lam, xs), std::invalid_argument);
}

TEST(PyramidBlob, RoundTrip) {
    const auto pyr = build_pyramid(random_field(12), haar(), region(1), 3);
    std::stringstream ss;
    write_pyramid_blob(ss, pyr);
    const auto back = read_pyramid_blob(ss, pyr.basis_id());
    EXPECT_EQ(back.mother(3, 3).values, pyr.mother(3, 3).values);
    EXPECT_EQ(back.father().values, pyr.father().values);
    std::ostringstream csv;
    write_pyramid_csv(csv, pyr);
    EXPECT_EQ(csv.str().rfind("n,i,x1,x2,value\n", 0), 0u);
}

TEST(Adapted, WorkedExamples) {
    const Domain U = Domain::box(Rect{0, 0, 1, 1});
    const Rect K{0.25, 0.25, 0.75, 0.75};
    const double R = 3 * std::sqrt(2.0);
    EXPECT_TRUE(check_adapted(K, 5, U, R));
    EXPECT_FALSE(check_adapted(K, 4, U, R));
    const auto seq = spanning_sequence(Rect{0, 0, 1, 1}, 0.5, R, 11);
    ASSERT_FALSE(seq.regions.empty());
    EXPECT_EQ(seq.regions.back().k, 10);
    EXPECT_NEAR(seq.regions.back().K.x0, 2.5 * R / 1024, 1e-15);
    for (const auto& r : seq.regions) EXPECT_GE(r.k, 4);  // (2 + delta) R 2^-n >= 1/2 drops n <= 4
}

TEST(Pyramid, PositionCountsOnQuarterSquare) {
    CellGrid g{{-0.5, -0.5}, 1.0 / 32, 64, 64};  // 64^2 cells covering [-1/2, 3/2)^2
    Xoshiro256 rng(13);
    std::vector<double> v(g.size());
    for (double& x : v) x = rng.coin() ? 1.0 : -1.0;
    const AdaptedRegion reg{Rect{0.25, 0.25, 0.75, 0.75}, 2, Domain::box(Rect{-0.5, -0.5, 1.5, 1.5}), "K"};
    const auto pyr = build_pyramid(LatticeField(g, v), haar(), reg, 5);
    for (int n = 2; n <= 5; ++n) {
        const std::size_t side = static_cast<std::size_t>(0.5 * std::ldexp(1.0, n) + 1);
        for (int i = 1; i <= 3; ++i) EXPECT_EQ(pyr.mother(n, i).values.size(), side * side);
    }
}

TEST(Pyramid, ConstantFieldHaar) {
    CellGrid g{{-1, -1}, 1.0 / 32, 160, 160};
    const auto pyr = build_pyramid(LatticeField::constant(g, 1.5), haar(), region(1), 4);
    for (double v : pyr.father().values) EXPECT_NEAR(v, 1.5 * 0.5, 1e-12);  // c 2^{-dk/2}
    for (int n = 1; n <= 4; ++n)
        for (int i = 1; i <= 3; ++i)
            for (double w : pyr.mother(n, i).values) EXPECT_NEAR(w, 0.0, 1e-10);
}

TEST(Pyramid, SingleMotherIsolated) {
    // field = psi^(3)_{m,y}: one unit coefficient, all others zero
    CellGrid g{{-1, -1}, 1.0 / 32, 160, 160};
    std::vector<double> v(g.size(), 0.0);
    const int m = 3;
    const DyadicIndex y{10, 12};
    synthesize_level(haar(), LevelGrid{m, WaveletKind::mother3, IndexBox{y.i, y.i, y.j, y.j}, {1.0}}, g, v);
    const auto pyr = build_pyramid(LatticeField(g, v), haar(), region(1), 4);
    for (int n = 1; n <= 4; ++n)
        for (int i = 1; i <= 3; ++i) {
            const auto& lv = pyr.mother(n, i);
            for (long j = lv.box.j0; j <= lv.box.j1; ++j)
                for (long ii = lv.box.i0; ii <= lv.box.i1; ++ii) {
                    const bool hit = n == m && i == 3 && ii == y.i && j == y.j;
                    EXPECT_NEAR(lv.at(ii, j), hit ? 1.0 : 0.0, 1e-10);
                }
        }
    for (double f : pyr.father().values) EXPECT_NEAR(f, 0.0, 1e-10);

    // level statistics and seminorm of a single unit coefficient
    const auto s2 = level_statistics(pyr, 2.0);
    EXPECT_NEAR(s2.w[m - 1], 1.0, 1e-10);
    const auto sinf = level_statistics(pyr, kInf);
    EXPECT_NEAR(sinf.w[m - 1], std::exp2(m), 1e-10);
    EXPECT_NEAR(local_seminorm(pyr, {-0.5, kInf, kInf}), std::exp2(-0.5 * m) * std::exp2(m), 1e-10);
    EXPECT_NEAR(local_seminorm(pyr, {0.0, 2, 2}), 1.0, 1e-10);
    EXPECT_FALSE(in_coefficient_ball(pyr, {0.0, 2, 2}, {{"K", 0.5}}));

    // the reconstruction reproduces it
    const auto rec = reconstruct_truncated(pyr, 4, haar(), g);
    double worst = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) worst = std::max(worst, std::abs(rec.values()[t] - v[t]));
    EXPECT_LT(worst, 1e-8);
    EXPECT_THROW(reconstruct_truncated(pyr, 5, haar(), g), std::invalid_argument);
}

TEST(Pyramid, SingleFatherReconstructs) {
    CellGrid g{{-1, -1}, 1.0 / 32, 160, 160};
    std::vector<double> v(g.size(), 0.0);
    synthesize_level(haar(), LevelGrid{1, WaveletKind::father, IndexBox{2, 2, 3, 3}, {1.0}}, g, v);
    const auto pyr = build_pyramid(LatticeField(g, v), haar(), region(1), 3);
    const auto rec = reconstruct_truncated(pyr, 1, haar(), g);
    for (std::size_t t = 0; t < v.size(); ++t) ASSERT_NEAR(rec.values()[t], v[t], 1e-8);
}

TEST(LevelStatistics, UniformLevelL1) {
    // all coefficients c at level m with M positions, p = 1: 2^{-dm/2} 3 M |c|
    CoefficientPyramid pyr(region(1), 3, 1, "haar");
    const int m = 2;
    for (int i = 1; i <= 3; ++i)
        for (double& w : pyr.mother(m, i).values) w = -0.3;
    const double M = static_cast<double>(pyr.position_count(m));
    EXPECT_NEAR(level_statistics(pyr, 1.0).w[m - 1], std::exp2(-m) * 3 * M * 0.3, 1e-12);
    CoefficientPyramid zero(region(1), 3, 1, "haar");
    EXPECT_EQ(local_seminorm(zero, {-0.5, 2, 2}), 0.0);
    EXPECT_TRUE(in_coefficient_ball(zero, {-0.5, 2, 2}, {{"K", 1e-9}}));
}

TEST(Seminorm, MonotoneInQAndAlpha) {
    const auto pyr = build_pyramid(random_field(14), db2(), region(3), 5);
    EXPECT_LE(local_seminorm(pyr, {-0.3, 2, kInf}), local_seminorm(pyr, {-0.3, 2, 2}));
    EXPECT_LE(local_seminorm(pyr, {-0.3, 2, 2}), local_seminorm(pyr, {-0.3, 2, 1}));
    EXPECT_LE(local_seminorm(pyr, {-0.6, 2, 2}), local_seminorm(pyr, {-0.3, 2, 2}));
}

TEST(Embedding, WorkedExamples) {
    const auto pyr = build_pyramid(random_field(15), db2(), region(3), 5);
    // p1 = inf, p2 = 2, beta = alpha1 + 1
    const auto r = embedding_check(pyr, {-1.5, kInf, kInf}, {-0.5, 2, kInf});
    EXPECT_LE(r.norm1, r.bound * r.norm2);
    const auto s = embedding_check(pyr, {-0.5, 2, kInf}, {-0.5, 2, 1});
    EXPECT_LE(s.ratio, 1.0);
    CoefficientPyramid zero(region(3), 5, 2, "db2");
    const auto z = embedding_check(zero, {-0.5, 2, kInf}, {-0.5, 2, 1});
    EXPECT_EQ(z.norm1, 0.0);
    EXPECT_EQ(z.norm2, 0.0);
}

TEST(Projection, Db2RatioWithinCalibratedBand) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto f = random_field(100 + s, 1.0 / 8);
        const auto b = projection_norm_bounds(f, db2(), 1, 2.0);
        EXPECT_GT(b.ratio, 0.1);
        EXPECT_LT(b.ratio, 10.0);
    }
}

TEST(HolderDictionary, ConstantMagnetizationField) {
    // constant field c: each lambda gives lambda^{1/8} c M_eta, largest at the largest lambda
    const double a = 1.0 / 64;
    const double c = std::pow(a, -0.125);
    const auto f = LatticeField::constant(CellGrid{{-1, -1}, a, 320, 320}, c);
    const auto dict = default_holder_dictionary(-0.125);
    const auto& bump = dict.front();
    // bump mass by fine midpoint quadrature on the disc
    double mass = 0.0;
    const int m = 1000;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) mass += bump.value({-1 + (i + 0.5) * 2.0 / m, -1 + (j + 0.5) * 2.0 / m});
    mass *= 4.0 / (double(m) * m);
    const std::vector<DictionaryBump> only{bump};
    const std::vector<Point> xs{{1.5, 1.5}};
    double best = 0.0;
    for (double lambda : {1.0, 0.5, 0.25}) {
        const std::vector<double> lam{lambda};
        const double v = holder_dictionary_norm(f, -0.125, only, lam, xs);
        EXPECT_NEAR(v, std::pow(lambda, 0.125) * c * mass, 1e-3 * c * mass) << lambda;
        best = std::max(best, v);
    }
    const auto all = dyadic_lambdas(0, 2);
    EXPECT_NEAR(holder_dictionary_norm(f, -0.125, only, all, xs), best, 1e-15);
    EXPECT_NEAR(best, c * mass, 1e-3 * c * mass);
    EXPECT_THROW(holder_dictionary_norm(f, -0.125, {}, all, xs), std::invalid_argument);
}

TEST(Cutoff, OneAndZero) {
    const auto f = random_field(16, 1.0 / 8);
    const auto same = multiply_cutoff(f, [](Point) { return 1.0; });
    const auto none = multiply_cutoff(f, LatticeField::constant(f.grid(), 0.0));
    for (std::size_t t = 0; t < f.values().size(); ++t) {
        EXPECT_EQ(same.values()[t], f.values()[t]);
        EXPECT_EQ(none.values()[t], 0.0);
    }
    const auto other = LatticeField::constant(CellGrid{{0, 0}, 0.5, 2, 2}, 1.0);
    EXPECT_THROW(multiply_cutoff(f, other), std::invalid_argument);
}
