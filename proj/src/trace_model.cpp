#include "cookieaudit/trace_model.hpp"

#include "cookieaudit/declaration_matcher.hpp"
#include "cookieaudit/domain.hpp"
#include "cookieaudit/error.hpp"
#include "cookieaudit/record_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace cookieaudit {

std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::PreConsent: return "pre_consent";
        case Phase::PostReject: return "post_reject";
        case Phase::SubpageVisit: return "subpage_visit";
    }
    return "pre_consent";
}

std::string_view to_string(Cmp c) noexcept {
    switch (c) {
        case Cmp::OneTrust: return "onetrust";
        case Cmp::Cookiebot: return "cookiebot";
        case Cmp::Other: return "other";
    }
    return "other";
}

std::string_view to_string(ConsentChoice c) noexcept {
    return c == ConsentChoice::Consent ? "consent" : "not_consent";
}

std::string_view to_string(Party p) noexcept { return p == Party::FirstParty ? "first_party" : "third_party"; }

std::string_view to_string(MergeMode m) noexcept { return m == MergeMode::Union ? "union" : "mean"; }

std::optional<Phase> parse_phase(std::string_view s) noexcept {
    if (s == "pre_consent") return Phase::PreConsent;
    if (s == "post_reject") return Phase::PostReject;
    if (s == "subpage_visit") return Phase::SubpageVisit;
    return std::nullopt;
}

std::optional<Cmp> parse_cmp(std::string_view s) noexcept {
    if (s == "onetrust" || s == "cookiepro") return Cmp::OneTrust;
    if (s == "cookiebot") return Cmp::Cookiebot;
    if (s == "other") return Cmp::Other;
    return std::nullopt;
}

std::optional<ConsentChoice> parse_consent_choice(std::string_view s) noexcept {
    if (s == "consent") return ConsentChoice::Consent;
    if (s == "not_consent") return ConsentChoice::NotConsent;
    return std::nullopt;
}

std::optional<MergeMode> parse_merge_mode(std::string_view s) noexcept {
    if (s == "union") return MergeMode::Union;
    if (s == "mean") return MergeMode::Mean;
    return std::nullopt;
}

std::string to_string(const CookieKey& key) { return key.name + "@" + key.domain + key.path; }

std::string canonical_banner_key(std::string_view key) {
    std::string out = canonical_banner_value(key);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
    return out;
}

std::string canonical_banner_value(std::string_view value) {
    std::string out;
    bool pending_space = false;
    for (char c : value) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

void BannerConfig::set(std::string_view key, std::string_view value) {
    std::string k = canonical_banner_key(key);
    if (k.empty()) throw audit_error(errc::invariant_violation, "banner parameter with empty name");
    if (!params.emplace(k, canonical_banner_value(value)).second) {
        throw audit_error(errc::invariant_violation, "duplicate banner parameter '" + k + "'");
    }
}

void BannerConfig::set_multi(std::string_view key, const std::vector<std::string>& values) {
    std::vector<std::string> members;
    for (const auto& v : values) {
        std::string c = canonical_banner_value(v);
        if (!c.empty()) members.push_back(std::move(c));
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::string joined;
    for (const auto& m : members) {
        if (!joined.empty()) joined += kMultiValueSeparator;
        joined += m;
    }
    set(key, joined);
}

namespace {

[[noreturn]] void invariant(const std::string& what) { throw audit_error(errc::invariant_violation, what); }

[[noreturn]] void schema(const Record& rec, const std::string& what) {
    throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": " + what);
}

template <typename T, typename Parser>
T require_enum(const Record& rec, std::string_view field, Parser parse) {
    std::string raw = require_string(rec, field);
    auto v = parse(raw);
    if (!v) schema(rec, rec.kind + " record field '" + std::string(field) + "' has unknown value '" + raw + "'");
    return *v;
}

std::string scalar_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

CrawlTrace build_trace(const std::vector<Record>& records) {
    CrawlTrace trace;
    bool have_meta = false;
    std::vector<std::pair<const Record*, CookieInstance>> cookies;
    std::unordered_map<std::string, std::size_t> request_index;

    for (const auto& rec : records) {
        if (rec.kind == "meta") {
            if (have_meta) schema(rec, "more than one meta record");
            have_meta = true;
            const auto& version = require_field(rec, "trace_version");
            if (!version.is_number_integer() || version.get<int>() != kTraceVersion) {
                schema(rec, "unsupported trace_version " + version.dump());
            }
            trace.site = normalize_domain(require_string(rec, "site"));
            trace.region = require_string(rec, "region");
            trace.iteration = static_cast<int>(require_int(rec, "iteration"));
            if (auto seed = rec.body.find("subpage_seed"); seed != rec.body.end() && !seed->is_null()) {
                if (!seed->is_number_unsigned()) schema(rec, "meta record field 'subpage_seed' must be unsigned");
                trace.subpage_seed = seed->get<std::uint64_t>();
            }
        } else if (rec.kind == "request") {
            RequestRecord r;
            r.request_id = require_string(rec, "request_id");
            r.url = require_string(rec, "url");
            r.method = optional_string(rec, "method", "GET");
            r.initiator_frame = optional_string(rec, "initiator_frame");
            r.page_url = optional_string(rec, "page_url");
            if (!request_index.emplace(r.request_id, trace.requests.size()).second) {
                invariant("duplicate request_id '" + r.request_id + "'");
            }
            trace.requests.push_back(std::move(r));
        } else if (rec.kind == "cookie") {
            CookieInstance c;
            c.request_id = require_string(rec, "request_id");
            c.name = require_string(rec, "name");
            c.domain = normalize_domain(require_string(rec, "domain"));
            c.path = optional_string(rec, "path", "/");
            c.value = optional_string(rec, "value");
            c.observed_at = require_int(rec, "observed_at");
            c.phase = require_enum<Phase>(rec, "phase", parse_phase);
            cookies.emplace_back(&rec, std::move(c));
        } else if (rec.kind == "declaration") {
            CmpDeclaration d;
            d.name_pattern = require_string(rec, "name_pattern");
            d.host = normalize_domain(require_string(rec, "host"));
            d.category_id = require_string(rec, "category_id");
            d.purpose_text = optional_string(rec, "purpose_text");
            d.declared_duration = optional_string(rec, "declared_duration");
            trace.declarations.push_back(std::move(d));
        } else if (rec.kind == "category") {
            CategoryDeclaration c;
            c.category_id = require_string(rec, "category_id");
            c.label = optional_string(rec, "label", c.category_id);
            c.rejectable = require_bool(rec, "rejectable");
            c.consent_choice = require_enum<ConsentChoice>(rec, "consent_choice", parse_consent_choice);
            trace.categories.push_back(std::move(c));
        } else if (rec.kind == "snapshot") {
            ConsentStateSnapshot s;
            s.cmp = require_enum<Cmp>(rec, "cmp", parse_cmp);
            s.raw_value = optional_string(rec, "raw_value");
            s.consent_cookie_domain = normalize_domain(optional_string(rec, "consent_cookie_domain"));
            s.captured_at = require_int(rec, "captured_at");
            s.page_url = optional_string(rec, "page_url");
            trace.snapshots.push_back(std::move(s));
        } else if (rec.kind == "banner") {
            const auto& params = require_field(rec, "params");
            if (!params.is_object()) schema(rec, "banner record field 'params' must be an object");
            for (const auto& [key, value] : params.items()) {
                if (value.is_array()) {
                    std::vector<std::string> members;
                    for (const auto& m : value) members.push_back(scalar_to_string(m));
                    trace.banner.set_multi(key, members);
                } else if (value.is_object() || value.is_null()) {
                    schema(rec, "banner parameter '" + key + "' must be a scalar or a list");
                } else {
                    trace.banner.set(key, scalar_to_string(value));
                }
            }
        } else if (rec.kind == "subpage") {
            trace.subpages_visited.push_back(require_string(rec, "url"));
        } else {
            schema(rec, "unknown record kind '" + rec.kind + "'");
        }
    }
    if (!have_meta) throw audit_error(errc::schema_violation, "missing meta record (field 'trace_version')");

    for (auto& [rec, cookie] : cookies) {
        auto it = request_index.find(cookie.request_id);
        if (it == request_index.end()) {
            invariant("cookie '" + cookie.name + "' references unknown request_id '" + cookie.request_id + "'");
        }
        trace.requests[it->second].attached_cookies.push_back(std::move(cookie));
    }
    validate_trace(trace);
    return trace;
}

}  // namespace

void validate_trace(const CrawlTrace& trace) {
    if (trace.site.empty() || !is_valid_host(trace.site)) invariant("site '" + trace.site + "' is not a valid host");
    if (trace.region.empty()) invariant("region is empty");
    if (trace.iteration < 1) invariant("iteration must be >= 1, got " + std::to_string(trace.iteration));

    std::unordered_set<std::string> request_ids;
    for (const auto& r : trace.requests) {
        if (!request_ids.insert(r.request_id).second) invariant("duplicate request_id '" + r.request_id + "'");
        for (const auto& c : r.attached_cookies) {
            if (c.name.empty()) invariant("cookie with empty name on request '" + r.request_id + "'");
            if (c.domain != normalize_domain(c.domain) || !is_valid_host(c.domain)) {
                invariant("cookie '" + c.name + "' has invalid domain '" + c.domain + "'");
            }
            if (c.request_id != r.request_id) {
                invariant("cookie '" + c.name + "' attached to request '" + r.request_id + "' carries request_id '" +
                          c.request_id + "'");
            }
        }
    }

    std::unordered_set<std::string> category_ids;
    for (const auto& c : trace.categories) {
        if (c.category_id.empty()) invariant("category with empty category_id");
        if (!category_ids.insert(c.category_id).second) invariant("duplicate category '" + c.category_id + "'");
        if (!c.rejectable && c.consent_choice != ConsentChoice::Consent) {
            invariant("category '" + c.category_id + "' is always active but records not_consent");
        }
    }
    for (const auto& d : trace.declarations) {
        if (d.name_pattern.empty()) invariant("declaration with empty name_pattern");
        if (!category_ids.contains(d.category_id)) {
            invariant("declaration '" + d.name_pattern + "' references unknown category '" + d.category_id + "'");
        }
    }
    for (const auto& s : trace.snapshots) {
        if (s.cmp != Cmp::Other && s.raw_value.empty()) {
            invariant(std::string("empty raw_value in ") + std::string(to_string(s.cmp)) + " snapshot");
        }
        if (!s.consent_cookie_domain.empty() && !is_valid_host(s.consent_cookie_domain)) {
            invariant("snapshot consent_cookie_domain '" + s.consent_cookie_domain + "' is not a valid host");
        }
    }

    const std::string scope = consent_scope_domain(trace);
    for (const auto& url : trace.subpages_visited) {
        bool ok = false;
        try {
            ok = in_scope(scope, url);
        } catch (const audit_error&) {
            invariant("subpage '" + url + "' is not a valid URL");
        }
        if (!ok) invariant("subpage '" + url + "' lies outside the consent scope '" + scope + "'");
    }
}

CrawlTrace parse_trace(std::string_view document) { return build_trace(read_records(document)); }

CrawlTrace parse_trace(std::istream& in) { return build_trace(read_records(in)); }

CrawlTrace parse_trace_file(const std::string& path) { return build_trace(read_record_file(path)); }

std::string serialize_trace(const CrawlTrace& trace) {
    using oj = nlohmann::ordered_json;
    std::ostringstream out;

    oj meta;
    meta["kind"] = "meta";
    meta["trace_version"] = kTraceVersion;
    meta["site"] = trace.site;
    meta["region"] = trace.region;
    meta["iteration"] = trace.iteration;
    if (trace.subpage_seed) meta["subpage_seed"] = *trace.subpage_seed;
    write_record(out, meta);

    for (const auto& c : trace.categories) {
        write_record(out, oj{{"kind", "category"},
                             {"category_id", c.category_id},
                             {"label", c.label},
                             {"rejectable", c.rejectable},
                             {"consent_choice", to_string(c.consent_choice)}});
    }
    for (const auto& d : trace.declarations) {
        write_record(out, oj{{"kind", "declaration"},
                             {"name_pattern", d.name_pattern},
                             {"host", d.host},
                             {"category_id", d.category_id},
                             {"purpose_text", d.purpose_text},
                             {"declared_duration", d.declared_duration}});
    }
    for (const auto& s : trace.snapshots) {
        write_record(out, oj{{"kind", "snapshot"},
                             {"cmp", to_string(s.cmp)},
                             {"raw_value", s.raw_value},
                             {"consent_cookie_domain", s.consent_cookie_domain},
                             {"captured_at", s.captured_at},
                             {"page_url", s.page_url}});
    }
    if (!trace.banner.params.empty()) {
        oj params = oj::object();
        for (const auto& [k, v] : trace.banner.params) params[k] = v;
        write_record(out, oj{{"kind", "banner"}, {"params", params}});
    }
    for (const auto& r : trace.requests) {
        write_record(out, oj{{"kind", "request"},
                             {"request_id", r.request_id},
                             {"url", r.url},
                             {"method", r.method},
                             {"initiator_frame", r.initiator_frame},
                             {"page_url", r.page_url}});
        for (const auto& c : r.attached_cookies) {
            write_record(out, oj{{"kind", "cookie"},
                                 {"request_id", c.request_id},
                                 {"name", c.name},
                                 {"domain", c.domain},
                                 {"path", c.path},
                                 {"value", c.value},
                                 {"observed_at", c.observed_at},
                                 {"phase", to_string(c.phase)}});
        }
    }
    for (const auto& url : trace.subpages_visited) write_record(out, oj{{"kind", "subpage"}, {"url", url}});
    return out.str();
}

const ConsentStateSnapshot* latest_snapshot(const CrawlTrace& trace) {
    const ConsentStateSnapshot* best = nullptr;
    for (const auto& s : trace.snapshots) {
        if (!best || s.captured_at >= best->captured_at) best = &s;
    }
    return best;
}

std::string consent_scope_domain(const CrawlTrace& trace) {
    const auto* snap = latest_snapshot(trace);
    if (snap && !snap->consent_cookie_domain.empty()) return snap->consent_cookie_domain;
    return trace.site;
}

Party derive_party(std::string_view cookie_domain, std::string_view site) {
    const auto& psl = PublicSuffixList::bundled();
    std::string domain = normalize_domain(cookie_domain);
    if (!is_valid_host(domain)) throw audit_error(errc::unparsable_domain, "'" + std::string(cookie_domain) + "'");
    auto cookie_reg = psl.registered_domain(domain);
    if (!cookie_reg) {
        throw audit_error(errc::unparsable_domain, "'" + domain + "' has no registered domain (public suffix)");
    }
    std::string site_norm = normalize_domain(site);
    auto site_reg = psl.registered_domain(site_norm);
    return *cookie_reg == site_reg.value_or(site_norm) ? Party::FirstParty : Party::ThirdParty;
}

Party derive_party(const CookieInstance& cookie, std::string_view site) { return derive_party(cookie.domain, site); }

MergedAudit merge_iterations(std::vector<std::shared_ptr<const CrawlTrace>> traces, MergeMode mode) {
    if (traces.empty()) throw audit_error(errc::empty_input, "merge_iterations requires at least one trace");
    for (const auto& t : traces) {
        if (!t) throw audit_error(errc::empty_input, "null trace in merge input");
        if (t->site != traces.front()->site || t->region != traces.front()->region) {
            throw audit_error(errc::mixed_keys, "cannot merge (" + t->site + ", " + t->region + ") with (" +
                                                    traces.front()->site + ", " + traces.front()->region + ")");
        }
    }
    std::stable_sort(traces.begin(), traces.end(),
                     [](const auto& a, const auto& b) { return a->iteration < b->iteration; });
    std::vector<std::shared_ptr<const CrawlTrace>> unique;
    for (auto& t : traces) {
        if (!unique.empty() && unique.back()->iteration == t->iteration) {
            if (*unique.back() != *t) {
                throw audit_error(errc::duplicate_iteration,
                                  t->site + "/" + t->region + " iteration " + std::to_string(t->iteration));
            }
            continue;
        }
        unique.push_back(std::move(t));
    }

    MergedAudit merged;
    merged.site = unique.front()->site;
    merged.region = unique.front()->region;
    merged.mode = mode;
    double total = 0.0;
    for (const auto& t : unique) {
        std::set<CookieKey> keys;
        for (const auto& r : t->requests) {
            for (const auto& c : r.attached_cookies) keys.insert(c.key());
        }
        total += static_cast<double>(keys.size());
        merged.cookie_union.insert(keys.begin(), keys.end());
    }
    merged.mean_cookie_count = total / static_cast<double>(unique.size());
    merged.iterations = std::move(unique);
    return merged;
}

MergedAudit merge_iterations(const std::vector<CrawlTrace>& traces, MergeMode mode) {
    std::vector<std::shared_ptr<const CrawlTrace>> shared;
    shared.reserve(traces.size());
    for (const auto& t : traces) shared.push_back(std::make_shared<const CrawlTrace>(t));
    return merge_iterations(std::move(shared), mode);
}

MergedAudit merge_audits(const MergedAudit& a, const MergedAudit& b) {
    auto all = a.iterations;
    all.insert(all.end(), b.iterations.begin(), b.iterations.end());
    return merge_iterations(std::move(all), a.mode);
}

}  // namespace cookieaudit
