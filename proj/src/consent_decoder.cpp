#include "cookieaudit/consent_decoder.hpp"

#include "cookieaudit/error.hpp"

#include <algorithm>
#include <cctype>

namespace cookieaudit {

namespace {

[[noreturn]] void decode_fail(const std::string& what) { throw audit_error(errc::decode_error, what); }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

bool icontains(std::string_view hay, std::string_view needle) {
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end(), [](char a, char b) {
               return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
           }) != hay.end();
}

// Splits "a:1,b:'x,y',c:{...}" on top-level commas.
std::vector<std::string_view> split_object_fields(std::string_view body) {
    std::vector<std::string_view> out;
    char quote = 0;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (quote) {
            if (c == '\\') ++i;
            else if (c == quote) quote = 0;
            continue;
        }
        if (c == '\'' || c == '"') quote = c;
        else if (c == '{' || c == '[') ++depth;
        else if (c == '}' || c == ']') --depth;
        else if (c == ',' && depth == 0) {
            out.push_back(body.substr(start, i - start));
            start = i + 1;
        }
    }
    if (quote) decode_fail("unterminated string in consent object");
    out.push_back(body.substr(start));
    return out;
}

}  // namespace

std::string url_decode(std::string_view in, bool plus_as_space) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        char c = in[i];
        if (c == '%' && i + 2 < in.size()) {
            int hi = hex_value(in[i + 1]);
            int lo = hex_value(in[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>(hi * 16 + lo);
                i += 2;
                continue;
            }
        }
        out += (plus_as_space && c == '+') ? ' ' : c;
    }
    return out;
}

CategoryChoices decode_onetrust(std::string_view raw) {
    std::string whole;
    if (raw.find('=') == std::string_view::npos && icontains(raw, "%3D")) {
        whole = url_decode(raw, false);
        raw = whole;
    }
    std::optional<std::string> groups;
    for (auto piece : split(raw, '&')) {
        auto eq = piece.find('=');
        if (eq == std::string_view::npos) continue;
        if (url_decode(trim(piece.substr(0, eq))) != "groups") continue;
        if (groups) decode_fail("OptanonConsent has more than one groups field");
        groups = url_decode(piece.substr(eq + 1));
    }
    if (!groups) decode_fail("OptanonConsent has no groups field");
    if (trim(*groups).empty()) decode_fail("OptanonConsent groups field is empty");

    CategoryChoices out;
    for (auto pair : split(*groups, ',')) {
        pair = trim(pair);
        auto colon = pair.rfind(':');
        if (colon == std::string_view::npos || colon == 0) {
            decode_fail("malformed group pair '" + std::string(pair) + "'");
        }
        std::string id(trim(pair.substr(0, colon)));
        std::string_view flag = trim(pair.substr(colon + 1));
        ConsentChoice choice;
        if (flag == "1") choice = ConsentChoice::Consent;
        else if (flag == "0") choice = ConsentChoice::NotConsent;
        else decode_fail("group '" + id + "' has unknown flag '" + std::string(flag) + "'");
        if (id.empty()) decode_fail("group pair with empty id");
        if (!out.emplace(id, choice).second) decode_fail("group '" + id + "' listed twice");
    }
    return out;
}

CategoryChoices decode_cookiebot(std::string_view raw) {
    std::string decoded;
    if (icontains(raw, "%7B") || icontains(raw, "%3A")) {
        decoded = url_decode(raw, false);
        raw = decoded;
    }
    raw = trim(raw);
    if (raw == "-1") decode_fail("CookieConsent is -1 (no consent recorded)");
    if (raw.size() < 2 || raw.front() != '{' || raw.back() != '}') {
        decode_fail("CookieConsent value is not an object literal");
    }

    std::map<std::string, std::string, std::less<>> fields;
    for (auto field : split_object_fields(raw.substr(1, raw.size() - 2))) {
        if (trim(field).empty()) continue;
        // Keys never contain ':'; values (timestamps, stamps) might.
        std::size_t colon = std::string_view::npos;
        char quote = 0;
        for (std::size_t i = 0; i < field.size(); ++i) {
            if (quote) {
                if (field[i] == quote) quote = 0;
            } else if (field[i] == '\'' || field[i] == '"') {
                quote = field[i];
            } else if (field[i] == ':') {
                colon = i;
                break;
            }
        }
        if (colon == std::string_view::npos) decode_fail("malformed CookieConsent field '" + std::string(field) + "'");
        fields[std::string(unquote(field.substr(0, colon)))] = std::string(unquote(field.substr(colon + 1)));
    }

    auto flag = [&](std::string_view name) {
        auto it = fields.find(name);
        if (it == fields.end()) decode_fail("CookieConsent missing field '" + std::string(name) + "'");
        if (it->second == "true") return ConsentChoice::Consent;
        if (it->second == "false") return ConsentChoice::NotConsent;
        decode_fail("CookieConsent field '" + std::string(name) + "' is not a boolean: '" + it->second + "'");
    };

    CategoryChoices out;
    out[std::string(kCookiebotPreferences)] = flag("preferences");
    out[std::string(kCookiebotStatistics)] = flag("statistics");
    out[std::string(kCookiebotMarketing)] = flag("marketing");
    out[std::string(kCookiebotNecessary)] = ConsentChoice::Consent;
    out[std::string(kCookiebotUnclassified)] = ConsentChoice::Consent;
    return out;
}

CategoryChoices decode_snapshot(const ConsentStateSnapshot& snapshot) {
    switch (snapshot.cmp) {
        case Cmp::OneTrust: return decode_onetrust(snapshot.raw_value);
        case Cmp::Cookiebot: return decode_cookiebot(snapshot.raw_value);
        case Cmp::Other: break;
    }
    return {};
}

CategoryChoices complete_choices(CategoryChoices decoded, const std::vector<CategoryDeclaration>& categories) {
    for (const auto& c : categories) {
        decoded.try_emplace(c.category_id, c.rejectable ? ConsentChoice::NotConsent : ConsentChoice::Consent);
    }
    return decoded;
}

CategoryChoices expected_after_reject_all(const std::vector<CategoryDeclaration>& categories) {
    CategoryChoices out;
    for (const auto& c : categories) {
        out[c.category_id] = c.rejectable ? ConsentChoice::NotConsent : ConsentChoice::Consent;
    }
    return out;
}

RejectAllCheck verify_reject_all(const CategoryChoices& completed, const std::vector<CategoryDeclaration>& categories) {
    RejectAllCheck check;
    for (const auto& [id, expected] : expected_after_reject_all(categories)) {
        auto it = completed.find(id);
        if (it == completed.end() || it->second != expected) {
            check.recorded = false;
            check.mismatched_categories.push_back(id);
        }
    }
    return check;
}

ConsentSets build_consent_sets(const CategoryChoices& choices, const DeclarationMap& decl_map) {
    ConsentSets sets;
    for (const auto& [key, cats] : decl_map.categories) {
        for (const auto& cat : cats) {
            auto it = choices.find(cat);
            if (it == choices.end()) {
                throw audit_error(errc::unknown_category, "category '" + cat + "' of cookie " + to_string(key) +
                                                              " has no consent choice");
            }
            (it->second == ConsentChoice::Consent ? sets.approved : sets.rejected).insert(key);
        }
    }
    return sets;
}

}  // namespace cookieaudit
