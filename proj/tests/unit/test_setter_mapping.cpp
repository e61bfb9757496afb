#include "cookieaudit/error.hpp"
#include "cookieaudit/setter_mapping.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace cookieaudit;
using cookieaudit::testing::fixture;
using cookieaudit::testing::slurp;

namespace {

errc code_of(const std::string& doc) {
    try {
        parse_setter_mappings(doc);
    } catch (const audit_error& e) {
        return e.code();
    }
    return errc::io_error;
}

}  // namespace

TEST(SetterMapping, FixtureParsesAndRoundTrips) {
    auto m = parse_setter_mappings(slurp(fixture("interfaces/setters.jsonl")));
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0].cmp_id, "onetrust");
    EXPECT_FALSE(m[0].reject_all.empty());
    EXPECT_TRUE(m[1].reject_all.empty());
    EXPECT_FALSE(m[1].category_toggles.empty());
    EXPECT_TRUE(m[2].category_toggles.empty());
    EXPECT_EQ(parse_setter_mappings(serialize_setter_mappings(m)), m);
}

TEST(SetterMapping, Errors) {
    EXPECT_EQ(code_of(R"({"kind":"setter","open_menu":"#a","confirm":"#b","reject_all":"#c"})"), errc::schema_violation);
    EXPECT_EQ(code_of(R"({"kind":"setter","cmp":"x","open_menu":"#a","confirm":"#b","reject_all":"","category_toggles":{}})"),
              errc::invariant_violation);
    const std::string one = R"({"kind":"setter","cmp":"x","open_menu":"#a","confirm":"#b","reject_all":"#c"})";
    EXPECT_EQ(code_of(one + "\n" + one + "\n"), errc::invariant_violation);
}
