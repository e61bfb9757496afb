#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Line-delimited record container shared by traces, purpose databases,
// labeled button data, setter mappings and machine-readable reports.
// Each non-blank line is one JSON object carrying a "kind" member.
namespace cookieaudit {

struct Record {
    std::string kind;
    nlohmann::json body;
    std::size_t line{};         // 1-based
    std::size_t byte_offset{};  // offset of the line start
};

/// Throws audit_error(malformed_trace) with the byte offset of the syntax
/// error, or schema_violation when a line lacks a string "kind".
std::vector<Record> read_records(std::string_view text);
std::vector<Record> read_records(std::istream& in);
std::vector<Record> read_record_file(const std::string& path);

void write_record(std::ostream& out, const nlohmann::ordered_json& record);

// Field accessors raising schema_violation that names the missing field.
const nlohmann::json& require_field(const Record& rec, std::string_view field);
std::string require_string(const Record& rec, std::string_view field);
std::string optional_string(const Record& rec, std::string_view field, std::string fallback = {});
std::int64_t require_int(const Record& rec, std::string_view field);
bool require_bool(const Record& rec, std::string_view field);

}  // namespace cookieaudit
