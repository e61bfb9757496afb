#include "cookieaudit/consent_decoder.hpp"
#include "cookieaudit/error.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cookieaudit;
using CC = ConsentChoice;

namespace {

std::string decode_error_message(std::string_view raw, bool cookiebot) {
    try {
        cookiebot ? decode_cookiebot(raw) : decode_onetrust(raw);
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::decode_error);
        return e.what();
    }
    ADD_FAILURE() << "decoded: " << raw;
    return {};
}

}  // namespace

TEST(DecodeOneTrust, Examples) {
    EXPECT_EQ(decode_onetrust("groups=C1:1,C2:0"), (CategoryChoices{{"C1", CC::Consent}, {"C2", CC::NotConsent}}));
    EXPECT_EQ(decode_onetrust("groups=C0001%3A1%2CC0004%3A0"),
              (CategoryChoices{{"C0001", CC::Consent}, {"C0004", CC::NotConsent}}));
    decode_error_message("groups=", false);
}

TEST(DecodeOneTrust, RealisticValueIgnoresOtherFields) {
    const std::string raw =
        "isGpcEnabled=0&datestamp=Mon+Oct+02+2023+10%3A00%3A00+GMT%2B0100&version=202301.1.0&isIABGlobal=false"
        "&hosts=&consentId=abc&interactionCount=1&landingPath=NotLandingPage"
        "&groups=C0001%3A1%2CC0002%3A0%2CC0003%3A0%2CC0004%3A0&AwaitingReconsent=false";
    auto c = decode_onetrust(raw);
    EXPECT_EQ(c.size(), 4u);
    EXPECT_EQ(c.at("C0001"), CC::Consent);
    EXPECT_EQ(c.at("C0004"), CC::NotConsent);
    // whole value URL-encoded once more
    EXPECT_EQ(decode_onetrust("groups%3DC1%253A1"), (CategoryChoices{{"C1", CC::Consent}}));
}

TEST(DecodeOneTrust, Errors) {
    EXPECT_NE(decode_error_message("datestamp=x", false).find("groups"), std::string::npos);
    EXPECT_NE(decode_error_message("groups=C1:2", false).find("C1"), std::string::npos);
    decode_error_message("groups=C1", false);
    decode_error_message("groups=C1:1,C1:0", false);
}

TEST(DecodeCookiebot, Examples) {
    const CategoryChoices rejected{{"Necessary", CC::Consent},
                                   {"Preferences", CC::NotConsent},
                                   {"Statistics", CC::NotConsent},
                                   {"Marketing", CC::NotConsent},
                                   {"Unclassified", CC::Consent}};
    EXPECT_EQ(decode_cookiebot("{stamp:'-1',necessary:true,preferences:false,statistics:false,marketing:false,"
                               "method:'explicit',ver:1,utc:1696240000000,region:'ie'}"),
              rejected);
    EXPECT_EQ(decode_cookiebot("%7Bstamp%3A%27abc%27%2Cnecessary%3Atrue%2Cpreferences%3Afalse%2Cstatistics%3Afalse"
                               "%2Cmarketing%3Afalse%7D"),
              rejected);
    for (const auto& [id, choice] : decode_cookiebot("{preferences:true,statistics:true,marketing:true}")) {
        EXPECT_EQ(choice, CC::Consent) << id;
    }
    EXPECT_NE(decode_error_message("{preferences:true,statistics:true}", true).find("marketing"), std::string::npos);
    decode_error_message("-1", true);
    decode_error_message("{preferences:yes,statistics:true,marketing:true}", true);
}

TEST(ConsentChoices, CompleteAndVerifyRejectAll) {
    const std::vector<CategoryDeclaration> cats{{"C0001", "", false, CC::Consent}, {"C0002", "", true, CC::NotConsent},
                                                {"C0003", "", true, CC::NotConsent}};
    auto completed = complete_choices({{"C0002", CC::NotConsent}}, cats);
    EXPECT_EQ(completed.at("C0001"), CC::Consent);
    EXPECT_EQ(completed.at("C0003"), CC::NotConsent);
    EXPECT_TRUE(verify_reject_all(completed, cats).recorded);

    auto check = verify_reject_all({{"C0001", CC::Consent}, {"C0002", CC::Consent}, {"C0003", CC::NotConsent}}, cats);
    EXPECT_FALSE(check.recorded);
    EXPECT_EQ(check.mismatched_categories, std::vector<std::string>{"C0002"});
    EXPECT_EQ(expected_after_reject_all(cats), completed);
}

TEST(BuildConsentSets, Examples) {
    DeclarationMap m;
    const CookieKey only_rejected{"_ga", "a.com", "/"}, both{"_gid", "cambridge.org", "/"}, none{"z", "a.com", "/"};
    m.categories[only_rejected] = {"Analytics"};
    m.categories[both] = {"Necessary", "Performance"};
    m.categories[none] = {};
    CategoryChoices choices{{"Analytics", CC::NotConsent}, {"Necessary", CC::Consent}, {"Performance", CC::NotConsent}};
    auto sets = build_consent_sets(choices, m);
    EXPECT_EQ(sets.approved, (std::set<CookieKey>{both}));
    EXPECT_EQ(sets.rejected, (std::set<CookieKey>{only_rejected, both}));

    m.categories[none] = {"Ghost"};
    try {
        build_consent_sets(choices, m);
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::unknown_category);
    }
}

TEST(BuildConsentSets, MatchesSetBuilderDefinition) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        CategoryChoices choices;
        for (int c = 0; c < 4; ++c) choices["K" + std::to_string(c)] = rng() % 2 ? CC::Consent : CC::NotConsent;
        DeclarationMap m;
        for (int k = 0; k < 6; ++k) {
            auto& cats = m.categories[{"c" + std::to_string(k), "a.com", "/"}];
            for (int c = 0; c < 4; ++c)
                if (rng() % 3 == 0) cats.insert("K" + std::to_string(c));
        }
        auto sets = build_consent_sets(choices, m);
        for (const auto& [key, cats] : m.categories) {
            bool a = false, r = false;
            for (const auto& c : cats) (choices.at(c) == CC::Consent ? a : r) = true;
            EXPECT_EQ(sets.approved.count(key) == 1, a);
            EXPECT_EQ(sets.rejected.count(key) == 1, r);
        }
    }
}

TEST(UrlDecode, PlusHandling) {
    EXPECT_EQ(url_decode("a+b%20c"), "a b c");
    EXPECT_EQ(url_decode("a+b", false), "a+b");
    EXPECT_EQ(url_decode("100%"), "100%");
    EXPECT_EQ(url_decode("%zz"), "%zz");
}
