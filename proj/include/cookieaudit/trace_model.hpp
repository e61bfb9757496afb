#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

/// Crawl stage during which a cookie was transmitted. Recorded by the harness.
enum class Phase { PreConsent, PostReject, SubpageVisit };
enum class Cmp { OneTrust, Cookiebot, Other };
enum class ConsentChoice { Consent, NotConsent };
enum class Party { FirstParty, ThirdParty };
enum class MergeMode { Union, Mean };

std::string_view to_string(Phase p) noexcept;
std::string_view to_string(Cmp c) noexcept;
std::string_view to_string(ConsentChoice c) noexcept;
std::string_view to_string(Party p) noexcept;
std::string_view to_string(MergeMode m) noexcept;
std::optional<Phase> parse_phase(std::string_view s) noexcept;
std::optional<Cmp> parse_cmp(std::string_view s) noexcept;
std::optional<ConsentChoice> parse_consent_choice(std::string_view s) noexcept;
std::optional<MergeMode> parse_merge_mode(std::string_view s) noexcept;

/// Cookie identity: two cookies are equivalent iff name, domain and path agree.
struct CookieKey {
    std::string name;
    std::string domain;
    std::string path;

    auto operator<=>(const CookieKey&) const = default;
};

std::string to_string(const CookieKey& key);

struct CookieInstance {
    std::string name;
    std::string domain;  // normalized: lowercase, no leading dot
    std::string path;
    std::string value;
    std::int64_t observed_at{};  // ms since epoch
    std::string request_id;
    Phase phase{Phase::PreConsent};

    CookieKey key() const { return {name, domain, path}; }
    bool operator==(const CookieInstance&) const = default;
};

struct RequestRecord {
    std::string request_id;
    std::string url;
    std::string method;
    std::vector<CookieInstance> attached_cookies;
    std::string initiator_frame;
    /// Top-level page being visited when the request was issued; empty means
    /// the site homepage.
    std::string page_url;

    bool operator==(const RequestRecord&) const = default;
};

struct CmpDeclaration {
    std::string name_pattern;
    std::string host;  // normalized
    std::string category_id;
    std::string purpose_text;
    std::string declared_duration;

    bool operator==(const CmpDeclaration&) const = default;
};

struct CategoryDeclaration {
    std::string category_id;
    std::string label;
    bool rejectable{true};  // false = always active
    ConsentChoice consent_choice{ConsentChoice::Consent};

    bool operator==(const CategoryDeclaration&) const = default;
};

struct ConsentStateSnapshot {
    Cmp cmp{Cmp::Other};
    std::string raw_value;
    std::string consent_cookie_domain;  // normalized
    std::int64_t captured_at{};
    std::string page_url;

    bool operator==(const ConsentStateSnapshot&) const = default;
};

/// Banner/UI parameters with canonical keys (trimmed, lowercase) and values
/// (trimmed, internal whitespace collapsed, case preserved). Unordered
/// multi-valued parameters are stored as their sorted, de-duplicated members
/// joined by kMultiValueSeparator.
struct BannerConfig {
    static constexpr char kMultiValueSeparator = '|';

    std::map<std::string, std::string> params;

    /// Throws invariant_violation when the canonical key already exists.
    void set(std::string_view key, std::string_view value);
    void set_multi(std::string_view key, const std::vector<std::string>& values);

    bool operator==(const BannerConfig&) const = default;
};

std::string canonical_banner_key(std::string_view key);
std::string canonical_banner_value(std::string_view value);

struct CrawlTrace {
    std::string site;    // registered domain
    std::string region;  // e.g. "EU", "US-MI"
    int iteration{1};
    std::optional<std::uint64_t> subpage_seed;
    std::vector<RequestRecord> requests;
    std::vector<CmpDeclaration> declarations;
    std::vector<CategoryDeclaration> categories;
    std::vector<ConsentStateSnapshot> snapshots;
    BannerConfig banner;
    std::vector<std::string> subpages_visited;

    bool operator==(const CrawlTrace&) const = default;
};

inline constexpr int kTraceVersion = 1;

/// Parses a line-delimited trace document and normalizes domains.
/// Errors: malformed_trace (with byte offset), schema_violation (names the
/// field), invariant_violation.
CrawlTrace parse_trace(std::string_view document);
CrawlTrace parse_trace(std::istream& in);
CrawlTrace parse_trace_file(const std::string& path);

/// Writes the trace in the same format parse_trace reads. Output is
/// deterministic for a given trace.
std::string serialize_trace(const CrawlTrace& trace);

/// Checks every invariant of an in-memory trace; throws invariant_violation.
void validate_trace(const CrawlTrace& trace);

/// Most recent snapshot by capture time (later records win ties).
const ConsentStateSnapshot* latest_snapshot(const CrawlTrace& trace);

/// Domain that bounds the consent scope: the consent cookie's domain when a
/// snapshot exists, otherwise the site itself.
std::string consent_scope_domain(const CrawlTrace& trace);

/// FirstParty iff the cookie domain's registered domain equals the site's.
/// Throws unparsable_domain.
Party derive_party(std::string_view cookie_domain, std::string_view site);
Party derive_party(const CookieInstance& cookie, std::string_view site);

/// All iterations of one site measured from one region.
struct MergedAudit {
    std::string site;
    std::string region;
    MergeMode mode{MergeMode::Union};
    std::vector<std::shared_ptr<const CrawlTrace>> iterations;  // sorted by iteration
    std::set<CookieKey> cookie_union;
    double mean_cookie_count{};

    /// Cookie count under the configured mode.
    double cookie_count() const {
        return mode == MergeMode::Union ? static_cast<double>(cookie_union.size()) : mean_cookie_count;
    }
};

/// Errors: empty_input, mixed_keys, duplicate_iteration (same iteration
/// number with different content; identical duplicates collapse).
MergedAudit merge_iterations(std::vector<std::shared_ptr<const CrawlTrace>> traces, MergeMode mode);
MergedAudit merge_iterations(const std::vector<CrawlTrace>& traces, MergeMode mode);
MergedAudit merge_audits(const MergedAudit& a, const MergedAudit& b);

}  // namespace cookieaudit
