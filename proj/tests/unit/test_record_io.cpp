#include "cookieaudit/error.hpp"
#include "cookieaudit/record_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace cookieaudit;

TEST(RecordIo, ReadsKindsAndSkipsBlankLines) {
    auto recs = read_records("{\"kind\":\"a\",\"x\":1}\n\n  \n{\"kind\":\"b\"}\r\n");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].kind, "a");
    EXPECT_EQ(recs[0].line, 1u);
    EXPECT_EQ(recs[1].kind, "b");
    EXPECT_EQ(recs[1].line, 4u);
    EXPECT_EQ(recs[1].byte_offset, 23u);  // 19 + 1 + 3
}

TEST(RecordIo, SyntaxErrorCarriesByteOffset) {
    const std::string doc = "{\"kind\":\"a\"}\n{\"kind\":\"b\",}\n";
    try {
        read_records(doc);
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::malformed_trace);
        ASSERT_TRUE(e.byte_offset());
        // second line starts at 13; the stray '}' is at column 12 of it
        EXPECT_EQ(*e.byte_offset(), 13u + 12u);
    }
}

TEST(RecordIo, NonObjectAndMissingKind) {
    EXPECT_THROW(
        {
            try {
                read_records("[1,2]\n");
            } catch (const audit_error& e) {
                EXPECT_EQ(e.code(), errc::malformed_trace);
                throw;
            }
        },
        audit_error);
    try {
        read_records("{\"x\":1}\n");
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::schema_violation);
        EXPECT_NE(std::string(e.what()).find("kind"), std::string::npos);
    }
}

TEST(RecordIo, FieldAccessorsNameTheField) {
    auto recs = read_records("{\"kind\":\"k\",\"s\":\"v\",\"n\":3,\"b\":true}\n");
    const auto& r = recs.at(0);
    EXPECT_EQ(require_string(r, "s"), "v");
    EXPECT_EQ(require_int(r, "n"), 3);
    EXPECT_TRUE(require_bool(r, "b"));
    EXPECT_EQ(optional_string(r, "missing", "dflt"), "dflt");
    try {
        require_string(r, "absent_field");
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::schema_violation);
        EXPECT_NE(std::string(e.what()).find("absent_field"), std::string::npos);
    }
    EXPECT_THROW(require_int(r, "s"), audit_error);
}

TEST(RecordIo, WriteThenReadRoundTrips) {
    std::ostringstream out;
    write_record(out, nlohmann::ordered_json{{"kind", "z"}, {"v", "a\nb"}});
    auto recs = read_records(out.str());
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].body.at("v"), "a\nb");
}

TEST(RecordIo, MissingFileIsIoError) {
    try {
        read_record_file("/nonexistent/cookieaudit/file.jsonl");
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::io_error);
    }
}
