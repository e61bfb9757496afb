#pragma once

#include "cookieaudit/consent_decoder.hpp"
#include "cookieaudit/trace_model.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

enum class Outcome { Compliant = 0, IgnoredRejection = 1, Undeclared = 2, WrongCategory = 3 };

inline constexpr std::size_t kOutcomeCount = 4;
inline constexpr std::array<Outcome, kOutcomeCount> kAllOutcomes{Outcome::Compliant, Outcome::IgnoredRejection,
                                                                 Outcome::Undeclared, Outcome::WrongCategory};
inline constexpr std::array<Outcome, 3> kViolationOutcomes{Outcome::IgnoredRejection, Outcome::Undeclared,
                                                           Outcome::WrongCategory};

std::string_view to_string(Outcome o) noexcept;
/// Human-readable name as used in report tables.
std::string_view display_name(Outcome o) noexcept;
constexpr std::size_t index_of(Outcome o) noexcept { return static_cast<std::size_t>(o); }

/// Membership truth table: (in A_c, in R_c) -> outcome.
constexpr Outcome classify_membership(bool approved, bool rejected) noexcept {
    if (approved) return rejected ? Outcome::WrongCategory : Outcome::Compliant;
    return rejected ? Outcome::IgnoredRejection : Outcome::Undeclared;
}

Outcome classify_cookie(const CookieKey& key, const ConsentSets& sets);

struct Evidence {
    std::string category_id;
    ConsentChoice choice{ConsentChoice::Consent};

    bool operator==(const Evidence&) const = default;
};

struct CookieClassification {
    CookieKey key;
    Outcome outcome{Outcome::Undeclared};
    Party party{Party::ThirdParty};
    std::vector<Evidence> evidence;
    Phase phase_first_seen{Phase::PreConsent};
    std::string sample_value;   // value of the latest counted transmission
    std::string purpose_text;   // first non-empty purpose among matched declarations
};

struct OutcomeCounts {
    std::array<std::size_t, kOutcomeCount> total{};
    std::array<std::size_t, kOutcomeCount> third_party{};

    std::size_t operator[](Outcome o) const { return total[index_of(o)]; }
    std::size_t sum() const;
};

struct SiteAuditReport {
    std::string site;
    std::string region;
    int iteration{1};
    Cmp cmp{Cmp::Other};
    /// False when the reject-all choice could not be confirmed; nothing is
    /// classified in that case.
    bool consent_recorded{true};
    std::vector<CookieClassification> cookies;  // sorted by key
    OutcomeCounts counts;
    std::array<bool, kOutcomeCount> has_outcome{};
    bool compliant_site{true};
    /// Cookie keys seen only before consent was set; informational.
    std::size_t pre_consent_only{0};
    /// Keys whose every counted transmission happened outside the consent scope.
    std::size_t out_of_scope{0};
    std::vector<std::string> diagnostics;
};

/// Classifies the distinct in-scope cookie keys transmitted after rejection
/// (PostReject and SubpageVisit phases).
SiteAuditReport classify_site(const CrawlTrace& trace);

using CookieFilter = std::function<bool(const CookieClassification&)>;

/// Keeps only cookies accepted by `keep`, recomputing counts and flags.
SiteAuditReport filter_report(const SiteAuditReport& report, const CookieFilter& keep);

/// One (site, region) after merging its iterations.
struct SiteSummary {
    std::string site;
    std::string region;
    std::size_t iterations{0};
    std::size_t iterations_classified{0};
    /// Distinct (key, outcome) pairs over classified iterations.
    std::vector<CookieClassification> union_cookies;
    OutcomeCounts union_counts;
    std::array<bool, kOutcomeCount> has_outcome{};
    double mean_cookie_count{0};
    double mean_first_party{0};
    double mean_third_party{0};
    std::array<double, kOutcomeCount> mean_outcome{};
    std::array<double, kOutcomeCount> mean_outcome_third_party{};
    BannerConfig banner;  // from the highest iteration
    std::vector<SiteAuditReport> reports;
    std::vector<std::string> diagnostics;

    bool audited() const { return iterations_classified > 0; }
    bool has_violation() const;
};

/// One row group of the corpus table: per violation type, cookie count
/// (union semantics, summed over sites) and share of audited sites with at
/// least one such cookie.
struct RegionRow {
    std::string region;
    std::size_t sites{0};
    std::size_t sites_audited{0};
    std::array<std::size_t, kOutcomeCount> cookies{};
    std::array<std::size_t, kOutcomeCount> sites_with{};
    std::array<double, kOutcomeCount> pct_sites{};
    std::size_t sites_with_any_violation{0};
    double pct_any_violation{0};
};

struct CorpusReport {
    std::vector<SiteSummary> sites;  // sorted by (region, site)
    std::vector<RegionRow> regions;  // sorted by region
};

SiteSummary summarize_site(const MergedAudit& merged, const CookieFilter& keep = {});
CorpusReport classify_corpus(const std::vector<MergedAudit>& merged, const CookieFilter& keep = {});

}  // namespace cookieaudit
