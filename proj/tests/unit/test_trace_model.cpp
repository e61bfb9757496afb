#include "cookieaudit/error.hpp"
#include "cookieaudit/trace_model.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace cookieaudit;
using cookieaudit::testing::TraceBuilder;

namespace {

const char* kMeta = R"({"kind":"meta","trace_version":1,"site":"a.com","region":"EU","iteration":1})"
                    "\n";

errc code_of(const std::string& doc) {
    try {
        parse_trace(doc);
    } catch (const audit_error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return errc::io_error;
}

}  // namespace

TEST(TraceModel, MinimalDocumentOneRequestNoCookies) {
    auto t = parse_trace(std::string(kMeta) +
                         R"({"kind":"request","request_id":"r1","url":"https://a.com/"})" "\n");
    EXPECT_EQ(t.site, "a.com");
    ASSERT_EQ(t.requests.size(), 1u);
    EXPECT_TRUE(t.requests[0].attached_cookies.empty());
    EXPECT_EQ(t.requests[0].method, "GET");
}

TEST(TraceModel, CookieDomainIsNormalized) {
    auto t = parse_trace(std::string(kMeta) +
                         R"({"kind":"request","request_id":"r1","url":"https://a.com/"})" "\n"
                         R"({"kind":"cookie","request_id":"r1","name":"x","domain":".Example.COM","observed_at":5,"phase":"post_reject"})" "\n");
    ASSERT_EQ(t.requests[0].attached_cookies.size(), 1u);
    const auto& c = t.requests[0].attached_cookies[0];
    EXPECT_EQ(c.domain, "example.com");
    EXPECT_EQ(c.path, "/");
    EXPECT_EQ(c.phase, Phase::PostReject);
}

TEST(TraceModel, AlwaysActiveCategoryCannotRecordNotConsent) {
    const std::string doc = std::string(kMeta) +
                            R"({"kind":"category","category_id":"Necessary","rejectable":false,"consent_choice":"not_consent"})" "\n";
    try {
        parse_trace(doc);
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::invariant_violation);
        EXPECT_NE(std::string(e.what()).find("Necessary"), std::string::npos);
    }
}

TEST(TraceModel, SchemaAndInvariantErrors) {
    // unknown phase value
    EXPECT_EQ(code_of(std::string(kMeta) +
                      R"({"kind":"request","request_id":"r1","url":"u"})" "\n"
                      R"({"kind":"cookie","request_id":"r1","name":"x","domain":"a.com","observed_at":1,"phase":"later"})" "\n"),
              errc::schema_violation);
    // cookie pointing at a missing request
    EXPECT_EQ(code_of(std::string(kMeta) +
                      R"({"kind":"cookie","request_id":"nope","name":"x","domain":"a.com","observed_at":1,"phase":"pre_consent"})" "\n"),
              errc::invariant_violation);
    // empty cookie name
    EXPECT_EQ(code_of(std::string(kMeta) +
                      R"({"kind":"request","request_id":"r1","url":"u"})" "\n"
                      R"({"kind":"cookie","request_id":"r1","name":"","domain":"a.com","observed_at":1,"phase":"pre_consent"})" "\n"),
              errc::invariant_violation);
    // declaration referencing an unknown category
    EXPECT_EQ(code_of(std::string(kMeta) +
                      R"({"kind":"declaration","name_pattern":"_ga","host":"a.com","category_id":"C9"})" "\n"),
              errc::invariant_violation);
    // OneTrust snapshot without a value
    EXPECT_EQ(code_of(std::string(kMeta) +
                      R"({"kind":"snapshot","cmp":"onetrust","raw_value":"","captured_at":1})" "\n"),
              errc::invariant_violation);
    // subpage outside the consent scope
    EXPECT_EQ(code_of(std::string(kMeta) + R"({"kind":"subpage","url":"https://b.com/x"})" "\n"),
              errc::invariant_violation);
    // duplicate banner key after canonicalization
    EXPECT_EQ(code_of(std::string(kMeta) + R"({"kind":"banner","params":{"Reject_All":"a"," reject_all ":"b"}})" "\n"),
              errc::invariant_violation);
    // missing meta, wrong version, unknown kind
    EXPECT_EQ(code_of(R"({"kind":"subpage","url":"https://a.com/"})" "\n"), errc::schema_violation);
    EXPECT_EQ(code_of(R"({"kind":"meta","trace_version":2,"site":"a.com","region":"EU","iteration":1})" "\n"),
              errc::schema_violation);
    EXPECT_EQ(code_of(std::string(kMeta) + R"({"kind":"mystery"})" "\n"), errc::schema_violation);
    EXPECT_EQ(code_of(std::string(kMeta) + "{not json}\n"), errc::malformed_trace);
}

TEST(TraceModel, BannerCanonicalization) {
    auto t = parse_trace(std::string(kMeta) +
                         R"({"kind":"banner","params":{" Consent_Lifetime ":"  12   months ","reject_all_present":true,"buttons":["Settings","Accept","Accept"]}})" "\n");
    EXPECT_EQ(t.banner.params.at("consent_lifetime"), "12 months");
    EXPECT_EQ(t.banner.params.at("reject_all_present"), "true");
    EXPECT_EQ(t.banner.params.at("buttons"), "Accept|Settings");
}

TEST(TraceModel, SerializeParseRoundTrip) {
    CrawlTrace t = TraceBuilder("shop.example.org", "US-CA", 3)
                       .onetrust_categories()
                       .declare("_ga", "example.org", "C0002", "analytics")
                       .rejected_onetrust()
                       .cookie("_ga", "example.org", Phase::PostReject, "GA1.2.3.4", "https://shop.example.org/p")
                       .cookie("sid", "shop.example.org", Phase::PreConsent)
                       .banner("reject_all_present", "true");
    t.subpage_seed = 42;
    t.subpages_visited.push_back("https://shop.example.org/about");
    const auto text = serialize_trace(t);
    const auto back = parse_trace(text);
    EXPECT_EQ(back, t);
    EXPECT_EQ(serialize_trace(back), text);
}

TEST(TraceModel, DeriveParty) {
    EXPECT_EQ(derive_party("sub.a.com", "a.com"), Party::FirstParty);
    EXPECT_EQ(derive_party("doubleclick.net", "nhl.com"), Party::ThirdParty);
    EXPECT_EQ(derive_party("a.com.evil.org", "a.com"), Party::ThirdParty);
    EXPECT_EQ(derive_party("www.shop.co.uk", "shop.co.uk"), Party::FirstParty);
    EXPECT_EQ(derive_party("other.co.uk", "shop.co.uk"), Party::ThirdParty);
    try {
        derive_party("co.uk", "shop.co.uk");
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::unparsable_domain);
    }
}

TEST(TraceModel, LatestSnapshotAndScope) {
    CrawlTrace t = TraceBuilder("a.com").snapshot(Cmp::Other, "", "www.a.com", 5).snapshot(Cmp::Other, "", "a.com", 5);
    EXPECT_EQ(latest_snapshot(t)->consent_cookie_domain, "a.com");  // later record wins the tie
    EXPECT_EQ(consent_scope_domain(t), "a.com");
    EXPECT_EQ(consent_scope_domain(TraceBuilder("b.com").build()), "b.com");
}

TEST(TraceModel, MergeIterations) {
    CrawlTrace a = TraceBuilder("a.com", "EU", 1).cookie("x", "a.com", Phase::PostReject);
    CrawlTrace a2 = TraceBuilder("a.com", "EU", 2).cookie("x", "a.com", Phase::PostReject);
    auto same = merge_iterations(std::vector<CrawlTrace>{a, a2}, MergeMode::Union);
    EXPECT_EQ(same.cookie_union.size(), 1u);
    EXPECT_DOUBLE_EQ(same.mean_cookie_count, 1.0);

    CrawlTrace b = TraceBuilder("a.com", "EU", 2).cookie("x", "a.com", Phase::PostReject).cookie("y", "a.com", Phase::PostReject);
    auto u = merge_iterations(std::vector<CrawlTrace>{b, a}, MergeMode::Union);
    EXPECT_EQ(u.cookie_union.size(), 2u);
    EXPECT_DOUBLE_EQ(u.mean_cookie_count, 1.5);
    EXPECT_DOUBLE_EQ(u.cookie_count(), 2.0);
    auto m = merge_iterations(std::vector<CrawlTrace>{a, b}, MergeMode::Mean);
    EXPECT_DOUBLE_EQ(m.cookie_count(), 1.5);
    EXPECT_EQ(m.iterations.front()->iteration, 1);

    auto err = [](auto&& f) {
        try {
            f();
        } catch (const audit_error& e) {
            return e.code();
        }
        return errc::io_error;
    };
    EXPECT_EQ(err([] { merge_iterations(std::vector<CrawlTrace>{}, MergeMode::Union); }), errc::empty_input);
    CrawlTrace other = TraceBuilder("a.com", "UK", 2);
    EXPECT_EQ(err([&] { merge_iterations(std::vector<CrawlTrace>{a, other}, MergeMode::Union); }), errc::mixed_keys);
    CrawlTrace clash = TraceBuilder("a.com", "EU", 1).cookie("z", "a.com", Phase::PostReject);
    EXPECT_EQ(err([&] { merge_iterations(std::vector<CrawlTrace>{a, clash}, MergeMode::Union); }),
              errc::duplicate_iteration);
    // identical duplicates collapse
    EXPECT_EQ(merge_iterations(std::vector<CrawlTrace>{a, a}, MergeMode::Union).iterations.size(), 1u);
}

TEST(TraceModel, EnumWireNames) {
    for (auto p : {Phase::PreConsent, Phase::PostReject, Phase::SubpageVisit}) EXPECT_EQ(parse_phase(to_string(p)), p);
    for (auto c : {Cmp::OneTrust, Cmp::Cookiebot, Cmp::Other}) EXPECT_EQ(parse_cmp(to_string(c)), c);
    for (auto m : {MergeMode::Union, MergeMode::Mean}) EXPECT_EQ(parse_merge_mode(to_string(m)), m);
    EXPECT_FALSE(parse_phase("PreConsent"));
}
