#include "cookieaudit/domain.hpp"
#include "cookieaudit/error.hpp"

#include <gtest/gtest.h>

using namespace cookieaudit;

TEST(Domain, Normalize) {
    EXPECT_EQ(normalize_domain(".Example.COM"), "example.com");
    EXPECT_EQ(normalize_domain("a.b.c."), "a.b.c");
    EXPECT_EQ(normalize_domain(""), "");
}

TEST(Domain, HostValidity) {
    EXPECT_TRUE(is_valid_host("www.example.com"));
    EXPECT_TRUE(is_valid_host("localhost"));
    EXPECT_TRUE(is_valid_host("203.0.113.7"));
    EXPECT_FALSE(is_valid_host(""));
    EXPECT_FALSE(is_valid_host("a..b"));
    EXPECT_FALSE(is_valid_host("-bad.com"));
    EXPECT_FALSE(is_valid_host("sp ace.com"));
    EXPECT_TRUE(is_ip_literal("203.0.113.7"));
    EXPECT_FALSE(is_ip_literal("example.com"));
}

TEST(Domain, UrlHost) {
    EXPECT_EQ(url_host("https://Sub.Example.com:8443/path?q=1"), "sub.example.com");
    EXPECT_EQ(url_host("http://user:pw@a.com/"), "a.com");
    EXPECT_EQ(url_host("https://a.com"), "a.com");
    try {
        url_host("not a url");
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::unparsable_url);
    }
}

TEST(Domain, RegisteredDomainByHand) {
    const auto& psl = PublicSuffixList::bundled();
    EXPECT_GT(psl.rule_count(), 5000u);
    EXPECT_EQ(psl.registered_domain("sub.a.com").value(), "a.com");
    EXPECT_EQ(psl.registered_domain("a.com.evil.org").value(), "evil.org");
    EXPECT_EQ(psl.registered_domain("shop.maplecraft.co.uk").value(), "maplecraft.co.uk");
    EXPECT_FALSE(psl.registered_domain("co.uk"));
    EXPECT_FALSE(psl.registered_domain("com"));
    EXPECT_EQ(psl.registered_domain("203.0.113.7").value(), "203.0.113.7");
    EXPECT_EQ(psl.public_suffix("x.y.co.uk"), "co.uk");
}

TEST(Domain, WildcardAndExceptionRules) {
    auto psl = PublicSuffixList::parse("// test\ncom\n*.ck\n!www.ck\n");
    EXPECT_EQ(psl.public_suffix("a.b.ck"), "b.ck");
    EXPECT_EQ(psl.registered_domain("a.b.ck").value(), "a.b.ck");
    EXPECT_EQ(psl.public_suffix("www.ck"), "ck");
    EXPECT_EQ(psl.registered_domain("www.ck").value(), "www.ck");
    // default rule "*"
    EXPECT_EQ(psl.public_suffix("host.unknowntld"), "unknowntld");
    EXPECT_EQ(psl.registered_domain("host.unknowntld").value(), "host.unknowntld");
}
