#include "cookieaudit/pi_detector.hpp"

#include "cookieaudit/consent_decoder.hpp"
#include "cookieaudit/domain.hpp"
#include "cookieaudit/embedded_data.hpp"
#include "cookieaudit/error.hpp"
#include "cookieaudit/record_io.hpp"

#include <boost/regex.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <set>
#include <utility>

namespace cookieaudit {

std::string_view to_string(PiCategory c) noexcept {
    switch (c) {
        case PiCategory::Tracker: return "tracker";
        case PiCategory::Location: return "location";
        case PiCategory::IpAddress: return "ip_address";
        case PiCategory::Language: return "language";
        case PiCategory::UnlikelyPI: return "unlikely_pi";
    }
    return "unlikely_pi";
}

std::string_view display_name(PiCategory c) noexcept {
    switch (c) {
        case PiCategory::Tracker: return "Trackers";
        case PiCategory::Location: return "Location";
        case PiCategory::IpAddress: return "IP Address";
        case PiCategory::Language: return "Language";
        case PiCategory::UnlikelyPI: return "Unlikely P.I.";
    }
    return "";
}

std::optional<PiCategory> parse_pi_category(std::string_view s) noexcept {
    for (auto c : kAllPiCategories) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

int pi_priority(PiCategory c) noexcept {
    switch (c) {
        case PiCategory::IpAddress: return 4;
        case PiCategory::Location: return 3;
        case PiCategory::Language: return 2;
        case PiCategory::Tracker: return 1;
        case PiCategory::UnlikelyPI: return 0;
    }
    return 0;
}

struct PiRules::Compiled {
    std::vector<boost::regex> regexes;
    std::vector<std::vector<std::string>> keyword_tokens;
};

namespace {

PiCategory require_category(const Record& rec) {
    auto s = require_string(rec, "category");
    auto c = parse_pi_category(s);
    if (!c || *c == PiCategory::UnlikelyPI) {
        throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": unknown PI category '" + s + "'");
    }
    return *c;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace

PiRules PiRules::parse(std::string_view document) {
    PiRules rules;
    bool seen_meta = false;
    for (const auto& rec : read_records(document)) {
        if (rec.kind == "pi_rules_meta") {
            rules.version_ = static_cast<int>(require_int(rec, "version"));
            seen_meta = true;
        } else if (rec.kind == "pi_regex") {
            PiRegexRule r;
            r.name = require_string(rec, "name");
            r.category = require_category(rec);
            r.pattern = require_string(rec, "pattern");
            auto v = optional_string(rec, "validate");
            if (v == "lat_lon") r.validate_lat_lon = true;
            else if (!v.empty()) throw audit_error(errc::schema_violation, "unknown regex validator '" + v + "'");
            rules.regexes_.push_back(std::move(r));
        } else if (rec.kind == "pi_keyword") {
            auto term = join_tokens(keyword_tokens(require_string(rec, "term"), false));
            if (term.empty()) throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": empty keyword");
            rules.keywords_.push_back({std::move(term), require_category(rec)});
        } else {
            throw audit_error(errc::schema_violation, "unknown record kind '" + rec.kind + "' in PI rules");
        }
    }
    if (!seen_meta) throw audit_error(errc::schema_violation, "PI rules lack a pi_rules_meta record");
    rules.compile();
    return rules;
}

const PiRules& PiRules::bundled() {
    static const PiRules rules = parse(embedded::pi_rules());
    return rules;
}

PiRules PiRules::with_keywords(std::vector<PiKeywordRule> keywords) const {
    PiRules out = *this;
    out.keywords_ = std::move(keywords);
    for (auto& k : out.keywords_) k.term = join_tokens(keyword_tokens(k.term, false));
    out.compile();
    return out;
}

void PiRules::compile() {
    auto c = std::make_shared<Compiled>();
    for (const auto& r : regexes_) {
        try {
            c->regexes.emplace_back(r.pattern, boost::regex::perl);
        } catch (const boost::regex_error& e) {
            throw audit_error(errc::schema_violation, "regex '" + r.name + "' does not compile: " + e.what());
        }
    }
    for (const auto& k : keywords_) c->keyword_tokens.push_back(keyword_tokens(k.term, false));
    compiled_ = std::move(c);
}

PurposeDatabase PurposeDatabase::parse(std::string_view document) {
    PurposeDatabase db;
    for (const auto& rec : read_records(document)) {
        if (rec.kind != "purpose") {
            throw audit_error(errc::schema_violation, "unknown record kind '" + rec.kind + "' in purpose database");
        }
        PurposeEntry e;
        e.name_pattern = NamePattern(require_string(rec, "name_pattern"));
        e.host = normalize_domain(optional_string(rec, "host"));
        e.purpose = optional_string(rec, "purpose");
        auto hint = optional_string(rec, "category");
        if (!hint.empty()) e.category_hint = require_category(rec);
        db.add(std::move(e));
    }
    return db;
}

PurposeDatabase PurposeDatabase::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw audit_error(errc::io_error, "cannot open purpose database '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

void PurposeDatabase::add(PurposeEntry entry) { entries_.push_back(std::move(entry)); }

const PurposeEntry* PurposeDatabase::lookup(std::string_view name, std::string_view domain) const {
    const PurposeEntry* fallback = nullptr;
    for (const auto& e : entries_) {
        if (!e.name_pattern.matches(name)) continue;
        if (e.host.empty()) {
            if (!fallback) fallback = &e;
        } else if (match_declared_host(e.host, domain)) {
            return &e;
        }
    }
    return fallback;
}

namespace {

constexpr std::string_view kBase64Alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

bool plausible_base64(std::string_view value) {
    if (value.size() < 8 || value.size() % 4 != 0) return false;
    std::size_t pad = 0;
    while (pad < 2 && value[value.size() - 1 - pad] == '=') ++pad;
    for (std::size_t i = 0; i + pad < value.size(); ++i) {
        if (kBase64Alphabet.find(value[i]) == std::string_view::npos) return false;
    }
    return true;
}

std::optional<std::string> decode_base64(std::string_view value) {
    if (!plausible_base64(value)) return std::nullopt;
    std::string out;
    std::uint32_t buf = 0;
    int bits = 0;
    for (char c : value) {
        if (c == '=') break;
        buf = (buf << 6) | static_cast<std::uint32_t>(kBase64Alphabet.find(c));
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buf >> bits) & 0xff));
        }
    }
    return out;
}

std::vector<std::string> keyword_tokens(std::string_view text, bool split_camel) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (!std::isalnum(c)) {
            flush();
            continue;
        }
        if (split_camel && i > 0) {
            const auto p = static_cast<unsigned char>(text[i - 1]);
            const bool lower_to_upper = std::islower(p) && std::isupper(c);
            const bool acronym_end = std::isupper(p) && std::isupper(c) && i + 1 < text.size() &&
                                     std::islower(static_cast<unsigned char>(text[i + 1]));
            const bool digit_edge = std::isdigit(p) != std::isdigit(c) && std::isalnum(p);
            if (lower_to_upper || acronym_end || digit_edge) flush();
        }
        cur.push_back(static_cast<char>(std::tolower(c)));
    }
    flush();
    return out;
}

namespace {

using Hit = std::pair<PiCategory, std::string>;

bool contains_run(const std::vector<std::string>& tokens, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > tokens.size()) return false;
    return std::search(tokens.begin(), tokens.end(), needle.begin(), needle.end()) != tokens.end();
}

void scan_keywords(const PiRules& rules, const std::vector<std::string>& tokens, std::string_view source,
                   std::set<Hit>& hits) {
    const auto& compiled = rules.compiled();
    for (std::size_t i = 0; i < rules.keywords().size(); ++i) {
        if (contains_run(tokens, compiled.keyword_tokens[i])) {
            hits.insert({rules.keywords()[i].category, "keyword:" + rules.keywords()[i].term + "@" + std::string(source)});
        }
    }
}

bool lat_lon_ok(const boost::smatch& m) {
    if (m.size() < 3) return false;
    double lat = std::strtod(m[1].str().c_str(), nullptr);
    double lon = std::strtod(m[2].str().c_str(), nullptr);
    return std::abs(lat) <= 90.0 && std::abs(lon) <= 180.0;
}

void scan_regexes(const PiRules& rules, const std::string& text, std::string_view suffix, std::set<Hit>& hits) {
    const auto& compiled = rules.compiled();
    for (std::size_t i = 0; i < rules.regexes().size(); ++i) {
        const auto& rule = rules.regexes()[i];
        const auto& re = compiled.regexes[i];
        bool fired = false;
        auto begin = boost::sregex_iterator(text.begin(), text.end(), re, boost::match_single_line);
        for (auto it = begin; it != boost::sregex_iterator(); ++it) {
            if (!rule.validate_lat_lon || lat_lon_ok(*it)) {
                fired = true;
                break;
            }
        }
        if (fired) hits.insert({rule.category, "regex:" + rule.name + std::string(suffix)});
    }
}

std::string printable(std::string_view bytes) {
    std::string out(bytes);
    for (auto& c : out) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x20 || u == 0x7f) c = ' ';
    }
    return out;
}

}  // namespace

PiLabel detect_pi(const CookieInstance& cookie, std::string_view purpose_text, const PurposeDatabase& db,
                  const PiRules& rules, double entropy_threshold) {
    std::set<Hit> hits;

    std::vector<std::string> value_texts{cookie.value};
    const std::string unescaped = url_decode(cookie.value, false);
    if (unescaped != cookie.value) value_texts.push_back(unescaped);

    // (1) Base64
    std::optional<std::string> decoded;
    for (const auto& v : value_texts) {
        if (auto d = decode_base64(v)) {
            decoded = printable(*d);
            break;
        }
    }

    // (2) regexes
    for (const auto& v : value_texts) scan_regexes(rules, v, "", hits);
    std::set<Hit> decoded_hits;
    if (decoded) scan_regexes(rules, *decoded, "@base64", decoded_hits);

    // (3) keywords
    scan_keywords(rules, keyword_tokens(cookie.name, true), "name", hits);
    for (const auto& v : value_texts) scan_keywords(rules, keyword_tokens(v, false), "value", hits);
    if (decoded) scan_keywords(rules, keyword_tokens(*decoded, false), "base64", decoded_hits);
    scan_keywords(rules, keyword_tokens(purpose_text, false), "purpose", hits);
    if (const auto* entry = db.lookup(cookie.name, cookie.domain)) {
        scan_keywords(rules, keyword_tokens(entry->purpose, false), "purpose_db", hits);
        if (entry->category_hint) {
            hits.insert({*entry->category_hint, "purpose_db:" + std::string(to_string(*entry->category_hint))});
        }
    }
    if (!decoded_hits.empty()) {
        hits.insert(decoded_hits.begin(), decoded_hits.end());
        hits.insert({decoded_hits.begin()->first, "base64_decode"});
    }

    // (4) entropy
    if (entropy_estimate(cookie.value, entropy_threshold).high_entropy) hits.insert({PiCategory::Tracker, "high_entropy"});

    PiLabel label;
    std::set<std::string> signals;
    for (const auto& [cat, sig] : hits) {
        if (pi_priority(cat) > pi_priority(label.category)) label.category = cat;
        signals.insert(sig);
    }
    label.signals.assign(signals.begin(), signals.end());
    return label;
}

PiLabel PiDetector::label(const CookieInstance& cookie, std::string_view purpose_text) const {
    return detect_pi(cookie, purpose_text, db_, *rules_, threshold_);
}

PiLabel PiDetector::label(const CookieClassification& cls) const {
    CookieInstance c;
    c.name = cls.key.name;
    c.domain = cls.key.domain;
    c.path = cls.key.path;
    c.value = cls.sample_value;
    return label(c, cls.purpose_text);
}

CookieFilter PiDetector::likely_pi_filter() const {
    return [this](const CookieClassification& cls) { return label(cls).likely_pi(); };
}

PiLabels label_corpus(const CorpusReport& report, const PiDetector& detector) {
    PiLabels labels;
    for (const auto& s : report.sites) {
        if (!s.audited()) continue;
        for (const auto& c : s.union_cookies) labels.insert_or_assign(CookieRef{s.region, s.site, c.key}, detector.label(c));
    }
    return labels;
}

PiBreakdown summarize_pi(const CorpusReport& report, const PiLabels& labels) {
    PiBreakdown out;
    for (const auto& s : report.sites) {
        if (out.regions.empty() || out.regions.back().region != s.region) {
            out.regions.push_back(PiRow{});
            out.regions.back().region = s.region;
        }
        if (!s.audited()) continue;
        auto& row = out.regions.back();
        std::set<CookieKey> keys;
        for (const auto& c : s.union_cookies) keys.insert(c.key);
        for (const auto& key : keys) {
            auto it = labels.find(CookieRef{s.region, s.site, key});
            if (it == labels.end()) {
                throw audit_error(errc::invariant_violation, "no PI label for " + to_string(key) + " on " + s.site + " (" + s.region + ")");
            }
            ++row.cookies;
            ++row.counts[index_of(it->second.category)];
            ++out.total_cookies;
            if (it->second.likely_pi()) ++out.likely_pi_cookies;
        }
    }
    for (auto& row : out.regions) {
        if (row.cookies == 0) continue;
        for (auto c : kAllPiCategories) {
            row.pct[index_of(c)] = 100.0 * static_cast<double>(row.counts[index_of(c)]) / static_cast<double>(row.cookies);
        }
    }
    if (out.total_cookies > 0) {
        out.likely_pi_fraction = static_cast<double>(out.likely_pi_cookies) / static_cast<double>(out.total_cookies);
    }
    return out;
}

}  // namespace cookieaudit
