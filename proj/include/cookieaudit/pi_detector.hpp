#pragma once

#include "cookieaudit/declaration_matcher.hpp"
#include "cookieaudit/entropy.hpp"
#include "cookieaudit/trace_model.hpp"
#include "cookieaudit/violation_classifier.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

enum class PiCategory { Tracker, Location, IpAddress, Language, UnlikelyPI };

inline constexpr std::size_t kPiCategoryCount = 5;
/// Table row order.
inline constexpr std::array<PiCategory, kPiCategoryCount> kAllPiCategories{
    PiCategory::Tracker, PiCategory::Location, PiCategory::IpAddress, PiCategory::Language, PiCategory::UnlikelyPI};

std::string_view to_string(PiCategory c) noexcept;
std::string_view display_name(PiCategory c) noexcept;
std::optional<PiCategory> parse_pi_category(std::string_view s) noexcept;
constexpr std::size_t index_of(PiCategory c) noexcept { return static_cast<std::size_t>(c); }
/// Higher wins: IpAddress > Location > Language > Tracker > UnlikelyPI.
int pi_priority(PiCategory c) noexcept;

struct PiLabel {
    PiCategory category{PiCategory::UnlikelyPI};
    std::vector<std::string> signals;  // sorted, unique

    bool likely_pi() const noexcept { return category != PiCategory::UnlikelyPI; }
    bool operator==(const PiLabel&) const = default;
};

struct PiRegexRule {
    std::string name;
    PiCategory category{PiCategory::Tracker};
    std::string pattern;
    bool validate_lat_lon{false};
};

struct PiKeywordRule {
    std::string term;  // lowercase, space-separated tokens
    PiCategory category{PiCategory::Tracker};
};

/// Regexes and keywords driving detection. Loaded from the versioned
/// line-delimited rules file.
class PiRules {
public:
    static PiRules parse(std::string_view document);
    static const PiRules& bundled();

    int version() const noexcept { return version_; }
    const std::vector<PiRegexRule>& regexes() const noexcept { return regexes_; }
    const std::vector<PiKeywordRule>& keywords() const noexcept { return keywords_; }

    PiRules with_keywords(std::vector<PiKeywordRule> keywords) const;

    struct Compiled;
    const Compiled& compiled() const noexcept { return *compiled_; }

private:
    int version_{1};
    std::vector<PiRegexRule> regexes_;
    std::vector<PiKeywordRule> keywords_;
    std::shared_ptr<const Compiled> compiled_;

    void compile();
};

struct PurposeEntry {
    NamePattern name_pattern{""};
    std::string host;  // empty = any host
    std::string purpose;
    std::optional<PiCategory> category_hint;
};

/// Local snapshot of a cookie-purpose database. Lookup: entries with a host
/// that matches beat host-less ones; within a tier, file order.
class PurposeDatabase {
public:
    static PurposeDatabase parse(std::string_view document);
    static PurposeDatabase load(const std::string& path);

    void add(PurposeEntry entry);
    const PurposeEntry* lookup(std::string_view name, std::string_view domain) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<PurposeEntry> entries_;
};

/// Plausibly Base64: length >= 8, length % 4 == 0, standard alphabet with at
/// most two trailing '='.
bool plausible_base64(std::string_view value);
std::optional<std::string> decode_base64(std::string_view value);

/// Lowercase word tokens. With `split_camel`, "userId" -> {"user", "id"}.
std::vector<std::string> keyword_tokens(std::string_view text, bool split_camel);

PiLabel detect_pi(const CookieInstance& cookie, std::string_view purpose_text, const PurposeDatabase& db,
                  const PiRules& rules = PiRules::bundled(), double entropy_threshold = kDefaultEntropyThreshold);

/// Bundles rules, database and threshold for repeated labeling.
class PiDetector {
public:
    PiDetector() : rules_(&PiRules::bundled()) {}
    PiDetector(const PiRules& rules, PurposeDatabase db, double entropy_threshold)
        : rules_(&rules), db_(std::move(db)), threshold_(entropy_threshold) {}

    PiLabel label(const CookieInstance& cookie, std::string_view purpose_text) const;
    /// Uses the classification's key, sample value and purpose text.
    PiLabel label(const CookieClassification& cls) const;
    /// Filter keeping only likely-PI cookies.
    CookieFilter likely_pi_filter() const;

private:
    const PiRules* rules_;
    PurposeDatabase db_;
    double threshold_{kDefaultEntropyThreshold};
};

/// Identifies a cookie within one audited (region, site).
struct CookieRef {
    std::string region;
    std::string site;
    CookieKey key;

    auto operator<=>(const CookieRef&) const = default;
};

using PiLabels = std::map<CookieRef, PiLabel>;

/// Labels every distinct union cookie of every audited site.
PiLabels label_corpus(const CorpusReport& report, const PiDetector& detector);

struct PiRow {
    std::string region;
    std::size_t cookies{0};
    std::array<std::size_t, kPiCategoryCount> counts{};
    std::array<double, kPiCategoryCount> pct{};
};

struct PiBreakdown {
    std::vector<PiRow> regions;  // sorted by region
    std::size_t total_cookies{0};
    std::size_t likely_pi_cookies{0};
    double likely_pi_fraction{0};
};

/// Per-region share of cookies in each category, counting each distinct
/// key once per audited site. Throws invariant_violation when a cookie has
/// no label.
PiBreakdown summarize_pi(const CorpusReport& report, const PiLabels& labels);

}  // namespace cookieaudit
