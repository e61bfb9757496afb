#include "cookieaudit/record_io.hpp"

#include "cookieaudit/error.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace cookieaudit {

std::vector<Record> read_records(std::string_view text) {
    std::vector<Record> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::size_t line_start = pos;
        pos = end + 1;

        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        nlohmann::json body;
        try {
            body = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            // nlohmann reports a 1-based byte position within the parsed line.
            std::size_t within = e.byte > 0 ? e.byte - 1 : 0;
            if (within > line.size()) within = line.size();
            throw audit_error(errc::malformed_trace,
                              "line " + std::to_string(line_no) + ": " + e.what(),
                              line_start + within);
        }
        if (!body.is_object()) {
            throw audit_error(errc::malformed_trace, "line " + std::to_string(line_no) + ": record is not an object",
                              line_start);
        }
        auto kind = body.find("kind");
        if (kind == body.end() || !kind->is_string()) {
            throw audit_error(errc::schema_violation, "line " + std::to_string(line_no) + ": missing field 'kind'");
        }
        out.push_back(Record{kind->get<std::string>(), std::move(body), line_no, line_start});
    }
    return out;
}

std::vector<Record> read_records(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return read_records(text);
}

std::vector<Record> read_record_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw audit_error(errc::io_error, "cannot open " + path);
    return read_records(in);
}

void write_record(std::ostream& out, const nlohmann::ordered_json& record) {
    out << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

namespace {

[[noreturn]] void missing(const Record& rec, std::string_view field, std::string_view what) {
    throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": " + rec.kind + " record field '" +
                                                  std::string(field) + "' " + std::string(what));
}

}  // namespace

const nlohmann::json& require_field(const Record& rec, std::string_view field) {
    auto it = rec.body.find(field);
    if (it == rec.body.end() || it->is_null()) missing(rec, field, "is required");
    return *it;
}

std::string require_string(const Record& rec, std::string_view field) {
    const auto& v = require_field(rec, field);
    if (!v.is_string()) missing(rec, field, "must be a string");
    return v.get<std::string>();
}

std::string optional_string(const Record& rec, std::string_view field, std::string fallback) {
    auto it = rec.body.find(field);
    if (it == rec.body.end() || it->is_null()) return fallback;
    if (!it->is_string()) missing(rec, field, "must be a string");
    return it->get<std::string>();
}

std::int64_t require_int(const Record& rec, std::string_view field) {
    const auto& v = require_field(rec, field);
    if (!v.is_number_integer()) missing(rec, field, "must be an integer");
    return v.get<std::int64_t>();
}

bool require_bool(const Record& rec, std::string_view field) {
    const auto& v = require_field(rec, field);
    if (!v.is_boolean()) missing(rec, field, "must be a boolean");
    return v.get<bool>();
}

}  // namespace cookieaudit
