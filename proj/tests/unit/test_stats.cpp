#include "cookieaudit/error.hpp"
#include "cookieaudit/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace cookieaudit;
using namespace cookieaudit::stats;

// Reference values below were computed with scipy.special / scipy.stats.

TEST(SpecialFunctions, IncompleteBetaReference) {
    EXPECT_NEAR(regularized_beta(0.4, 2.5, 3.5), 0.4869041915261176, 1e-12);
    EXPECT_NEAR(regularized_beta(0.9, 0.5, 0.5), 0.7951672353008665, 1e-12);
    EXPECT_NEAR(regularized_beta(0.45, 30, 40), 0.6447480085585666, 1e-12);
    EXPECT_EQ(regularized_beta(0.0, 2, 3), 0.0);
    EXPECT_EQ(regularized_beta(1.0, 2, 3), 1.0);
}

TEST(SpecialFunctions, IncompleteGammaReference) {
    EXPECT_NEAR(regularized_gamma_p(3, 2), 0.32332358381693654, 1e-12);
    EXPECT_NEAR(regularized_gamma_q(0.5, 4), 0.004677734981047276, 1e-12);
    EXPECT_NEAR(regularized_gamma_p(10, 25), 0.9997785233617512, 1e-12);
    EXPECT_EQ(regularized_gamma_p(2, 0), 0.0);
}

TEST(Distributions, Reference) {
    EXPECT_NEAR(f_sf(3.2, 2, 12), 0.0769450237840636, 1e-12);
    EXPECT_NEAR(f_cdf(0.5, 5, 7), 0.2314156702720842, 1e-12);
    EXPECT_NEAR(chi2_sf(3.857142857142857, 1), 0.04953461343562649, 1e-12);
    EXPECT_NEAR(chi2_cdf(7.5, 4), 0.8882907071839568, 1e-12);
}

TEST(Distributions, CdfShapeOnGrid) {
    for (double d1 : {1.0, 2.0, 5.0, 30.0})
        for (double d2 : {1.0, 4.0, 12.0, 100.0}) {
            EXPECT_EQ(f_cdf(0, d1, d2), 0.0);
            EXPECT_NEAR(f_cdf(1e12, d1, d2), 1.0, 1e-5);
            double prev = 0;
            for (double x = 0; x < 20; x += 0.05) {
                double c = f_cdf(x, d1, d2);
                EXPECT_GE(c, prev - 1e-15);
                EXPECT_NEAR(c + f_sf(x, d1, d2), 1.0, 1e-12);
                prev = c;
            }
        }
    for (double k : {1.0, 2.0, 3.0, 9.0, 40.0}) {
        EXPECT_EQ(chi2_cdf(0, k), 0.0);
        EXPECT_NEAR(chi2_cdf(1e6, k), 1.0, 1e-12);
        double prev = 0;
        for (double x = 0; x < 80; x += 0.1) {
            double c = chi2_cdf(x, k);
            EXPECT_GE(c, prev - 1e-15);
            prev = c;
        }
    }
}

TEST(Levene, Reference) {
    for (auto center : {LeveneCenter::Mean, LeveneCenter::Median}) {
        auto r = levene({{1, 2, 3, 4}, {10, 20, 30, 40}}, center);
        EXPECT_NEAR(r.statistic, 9.623762376237623, 1e-12);
        EXPECT_NEAR(r.p_value, 0.021056767112156507, 1e-12);
        EXPECT_LT(r.p_value, 0.05);
        EXPECT_EQ(r.df1, 1);
        EXPECT_EQ(r.df2, 6);
        EXPECT_EQ(r.n_total, 8u);
    }
    const Groups g{{2.1, 3.4, 1.9, 5.6, 4.4}, {7.2, 6.1, 8.8, 5.5}, {3.3, 3.3, 2.2, 9.1, 4.0, 1.0}};
    auto mean = levene(g, LeveneCenter::Mean);
    EXPECT_NEAR(mean.statistic, 0.4155795132602733, 1e-12);
    EXPECT_NEAR(mean.p_value, 0.6691017271652472, 1e-12);
    auto median = levene(g, LeveneCenter::Median);
    EXPECT_NEAR(median.statistic, 0.18940003498338254, 1e-12);
    EXPECT_NEAR(median.p_value, 0.8298816926421924, 1e-12);
}

TEST(Levene, IdenticalGroupsAndEdgeCases) {
    auto r = levene({{1, 5, 9}, {1, 5, 9}});
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
    auto flat = levene({{2, 2}, {7, 7}});
    EXPECT_EQ(flat.statistic, 0.0);
    EXPECT_EQ(flat.p_value, 1.0);
    auto code = [](const Groups& g) {
        try {
            levene(g);
        } catch (const audit_error& e) {
            return e.code();
        }
        return errc::io_error;
    };
    EXPECT_EQ(code({{1, 2, 3}}), errc::insufficient_data);
    EXPECT_EQ(code({{1, 2}, {3}}), errc::insufficient_data);
}

TEST(KruskalWallis, Reference) {
    auto r = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
    // rank sums 6 and 15: 12/(6*7) * (36/3 + 225/3) - 3*7
    EXPECT_NEAR(r.statistic, 12.0 / 42.0 * (12.0 + 75.0) - 21.0, 1e-12);
    EXPECT_NEAR(r.statistic, 3.857142857142854, 1e-12);
    EXPECT_NEAR(r.p_value, 0.049534613435626915, 1e-12);
    EXPECT_EQ(r.df1, 1);

    auto t = kruskal_wallis({{1, 1, 2, 3, 3}, {2, 2, 4, 5}, {3, 5, 5, 6, 7, 7}});
    EXPECT_NEAR(t.statistic, 8.42905982905983, 1e-12);
    EXPECT_NEAR(t.p_value, 0.014779267653361853, 1e-12);
    EXPECT_LT(kruskal_wallis({{1, 1, 2, 3, 3}, {2, 2, 4, 5}, {3, 5, 5, 6, 7, 7}}, false).statistic, t.statistic);
}

TEST(KruskalWallis, EqualAndIdentical) {
    auto r = kruskal_wallis({{4, 4}, {4, 4, 4}});
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_NEAR(kruskal_wallis({{1, 2, 3}, {1, 2, 3}}).statistic, 0.0, 1e-12);
    EXPECT_THROW(kruskal_wallis({{1, 2}}), audit_error);
    EXPECT_THROW(kruskal_wallis({{1}, {2}}), audit_error);
    EXPECT_THROW(kruskal_wallis({{1, 2}, {}}), audit_error);
}

TEST(Midranks, Ties) {
    EXPECT_EQ(midranks({10, 20, 10, 30}), (std::vector<double>{1.5, 3, 1.5, 4}));
    EXPECT_TRUE(midranks({}).empty());
}

namespace {

// W is infinite when every group has zero spread around its center.
void expect_same_w(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) EXPECT_EQ(a, b);
    else EXPECT_NEAR(a, b, tol);
}

}  // namespace

TEST(StatsProperties, Invariances) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 50);
    for (int trial = 0; trial < 40; ++trial) {
        Groups g(2 + rng() % 3);
        for (auto& grp : g) {
            grp.resize(2 + rng() % 8);
            for (auto& v : grp) v = std::round(u(rng));  // rounding forces ties
        }
        auto lev = levene(g);
        auto kw = kruskal_wallis(g);
        EXPECT_GE(lev.statistic, 0.0);
        EXPECT_GE(kw.statistic, 0.0);
        EXPECT_GE(kw.p_value, 0.0);
        EXPECT_LE(kw.p_value, 1.0);

        Groups perm = g;
        for (auto& grp : perm) std::shuffle(grp.begin(), grp.end(), rng);
        std::shuffle(perm.begin(), perm.end(), rng);
        expect_same_w(levene(perm).statistic, lev.statistic, 1e-9);
        EXPECT_NEAR(kruskal_wallis(perm).statistic, kw.statistic, 1e-9);

        Groups shifted = g;
        for (auto& grp : shifted)
            for (auto& v : grp) v += 1234.5;
        expect_same_w(levene(shifted).statistic, lev.statistic, 1e-7 * std::max(1.0, lev.statistic));

        Groups mono = g;
        for (auto& grp : mono)
            for (auto& v : grp) v = std::exp(v / 10.0) + 3;
        EXPECT_NEAR(kruskal_wallis(mono).statistic, kw.statistic, 1e-9);
    }
}
