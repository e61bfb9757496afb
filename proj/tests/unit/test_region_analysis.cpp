#include "cookieaudit/error.hpp"
#include "cookieaudit/region_analysis.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace cookieaudit;
using cookieaudit::testing::TraceBuilder;

namespace {

CorpusReport corpus_of(const std::vector<CrawlTrace>& traces, MergeMode mode = MergeMode::Mean) {
    std::map<std::pair<std::string, std::string>, std::vector<CrawlTrace>> groups;
    for (const auto& t : traces) groups[{t.region, t.site}].push_back(t);
    std::vector<MergedAudit> merged;
    for (const auto& [k, ts] : groups) merged.push_back(merge_iterations(ts, mode));
    return classify_corpus(merged);
}

CrawlTrace with_cookies(std::string site, std::string region, int n, int iteration = 1) {
    TraceBuilder b(std::move(site), std::move(region), iteration);
    for (int i = 0; i < n; ++i) b.cookie("c" + std::to_string(i), "x.net", Phase::PostReject);
    return b;
}

}  // namespace

TEST(SiteDeltas, IdenticalRegionsAreZero) {
    auto d = site_deltas(corpus_of({with_cookies("a.com", "EU", 4), with_cookies("a.com", "UK", 4)}));
    ASSERT_EQ(d.deltas.size(), 2u);
    for (const auto& r : d.deltas) {
        EXPECT_EQ(r.delta_cookie_count, 0.0);
        for (double v : r.delta_outcome) EXPECT_EQ(v, 0.0);
    }
}

TEST(SiteDeltas, TenVersusThree) {
    auto d = site_deltas(corpus_of({with_cookies("a.com", "EU", 3), with_cookies("a.com", "US-CA", 10)}));
    const auto& us = d.deltas[1];
    EXPECT_EQ(us.region, "US-CA");
    EXPECT_EQ(us.baseline_region, "EU");
    EXPECT_DOUBLE_EQ(us.delta_cookie_count, 7.0);
    EXPECT_DOUBLE_EQ(us.delta_outcome[index_of(Outcome::Undeclared)], 7.0);
}

TEST(SiteDeltas, MeanAndUnionModes) {
    auto c = corpus_of({with_cookies("a.com", "EU", 2, 1), with_cookies("a.com", "EU", 4, 2), with_cookies("a.com", "UK", 5)});
    EXPECT_DOUBLE_EQ(site_deltas(c, "EU", MergeMode::Mean).deltas[1].delta_cookie_count, 2.0);
    EXPECT_DOUBLE_EQ(site_deltas(c, "EU", MergeMode::Union).deltas[1].delta_cookie_count, 1.0);
}

TEST(SiteDeltas, TranslationConsistent) {
    std::vector<CrawlTrace> base{with_cookies("a.com", "EU", 3), with_cookies("a.com", "UK", 6)};
    auto before = site_deltas(corpus_of(base));
    for (auto& t : base) {
        TraceBuilder extra(t.site, t.region, t.iteration);
        extra.cookie("shared", "a.com", Phase::PostReject);
        t.requests.push_back(extra.build().requests[0]);
        t.requests.back().request_id = "extra";
        t.requests.back().attached_cookies[0].request_id = "extra";
    }
    auto after = site_deltas(corpus_of(base));
    ASSERT_EQ(before.deltas.size(), after.deltas.size());
    for (std::size_t i = 0; i < before.deltas.size(); ++i) {
        EXPECT_DOUBLE_EQ(before.deltas[i].delta_cookie_count, after.deltas[i].delta_cookie_count);
        EXPECT_EQ(before.deltas[i].delta_outcome, after.deltas[i].delta_outcome);
    }
}

TEST(SiteDeltas, MissingBaseline) {
    auto c = corpus_of({with_cookies("a.com", "UK", 1), with_cookies("b.com", "EU", 1)});
    auto d = site_deltas(c);
    EXPECT_EQ(d.diagnostics.size(), 1u);
    try {
        site_deltas(c, "SG");
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::missing_baseline);
    }
}

TEST(BannerDiff, Examples) {
    BannerConfig a, b;
    EXPECT_EQ(banner_diff(a, b).count, 0u);
    a.set("reject_all_present", "true");
    b.set("reject_all_present", "false");
    a.set("consent_lifetime", "1 month");
    b.set("consent_lifetime", "12 months");
    a.set("banner_position", "bottom");
    b.set("banner_position", "  bottom ");
    b.set("consent_model", "opt-in");
    auto d = banner_diff(a, b, "s", "UK", "EU");
    EXPECT_EQ(d.differing_parameters, (std::vector<std::string>{"consent_lifetime", "consent_model", "reject_all_present"}));
    EXPECT_EQ(d.count, 3u);
    EXPECT_EQ(d.region_a, "EU");  // pair is ordered
    EXPECT_EQ(banner_diff(b, a, "s", "EU", "UK"), d);
    EXPECT_EQ(banner_diff(a, a).count, 0u);
}

TEST(BannerDiff, MultiValuedParametersCompareAsSets) {
    BannerConfig a, b;
    a.set_multi("category_names", {"Marketing", "Analytics"});
    b.set_multi("category_names", {"Analytics", "Marketing", "Analytics"});
    EXPECT_EQ(banner_diff(a, b).count, 0u);
    BannerConfig c;
    c.set("button_labels", "Continue to Site");
    BannerConfig d;
    d.set("button_labels", "continue to site");
    EXPECT_EQ(banner_diff(c, d).count, 1u);  // value case is significant
}

TEST(PairwiseMatrix, OneSiteThreeParameters) {
    auto eu = TraceBuilder("a.com", "EU").banner("x", "1").banner("y", "1").banner("z", "1").build();
    auto uk = TraceBuilder("a.com", "UK").banner("x", "2").banner("y", "2").build();
    auto m = pairwise_region_matrix(corpus_of({eu, uk}));
    EXPECT_EQ(m.regions, (std::vector<std::string>{"EU", "UK"}));
    EXPECT_EQ(m.counts, (std::vector<std::vector<std::size_t>>{{0, 3}, {3, 0}}));
    ASSERT_EQ(m.diffs.size(), 1u);
}

TEST(PairwiseMatrix, IdenticalCorpusAndSingleRegion) {
    auto t1 = TraceBuilder("a.com", "EU").banner("x", "1").build();
    auto t2 = TraceBuilder("a.com", "UK").banner("x", "1").build();
    auto t3 = TraceBuilder("b.com", "UK").banner("x", "9").build();  // UK only: not compared
    auto m = pairwise_region_matrix(corpus_of({t1, t2, t3}));
    for (const auto& row : m.counts)
        for (auto v : row) EXPECT_EQ(v, 0u);
    try {
        pairwise_region_matrix(corpus_of({t1}));
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::single_region);
    }
}

TEST(Histograms, RejectAllPresence) {
    auto h = parameter_histogram(corpus_of({TraceBuilder("a.com", "EU").banner("reject_all_present", "true").build(),
                                            TraceBuilder("b.com", "EU").build(),
                                            TraceBuilder("a.com", "US-CA").banner("reject_all_present", "false").build()}),
                                 kParamRejectAllPresent);
    EXPECT_EQ(h.values, (std::vector<std::string>{"(absent)", "false", "true"}));
    EXPECT_EQ(h.counts.at("EU").at("true"), 1u);
    EXPECT_EQ(h.counts.at("EU").at("(absent)"), 1u);
    EXPECT_EQ(h.counts.at("US-CA").at("false"), 1u);
    EXPECT_EQ(banner_histograms(corpus_of({TraceBuilder("a.com").build()})).size(), 3u);
}
