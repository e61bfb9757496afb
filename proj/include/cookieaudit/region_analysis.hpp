#pragma once

#include "cookieaudit/trace_model.hpp"
#include "cookieaudit/violation_classifier.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

inline constexpr std::string_view kDefaultBaselineRegion = "EU";

struct RegionDelta {
    std::string site;
    std::string region;
    std::string baseline_region;
    double delta_cookie_count{0};
    std::array<double, kOutcomeCount> delta_outcome{};  // indexed by Outcome
};

struct SiteDeltas {
    std::vector<RegionDelta> deltas;  // sorted by (site, region); baseline rows included
    std::vector<std::string> diagnostics;
};

/// Per-site cookie and per-outcome counts of each region minus the
/// baseline's. Mean mode uses per-iteration means, Union mode the union over
/// iterations. Sites without a classified baseline audit are skipped with a
/// diagnostic. Throws missing_baseline when no site has the baseline region.
SiteDeltas site_deltas(const CorpusReport& corpus, std::string_view baseline = kDefaultBaselineRegion,
                       MergeMode mode = MergeMode::Mean);

/// Parameters present in exactly one config or with unequal canonical values,
/// sorted.
std::vector<std::string> differing_parameters(const BannerConfig& a, const BannerConfig& b);

struct BannerDiff {
    std::string site;
    std::string region_a;  // region_a <= region_b
    std::string region_b;
    std::vector<std::string> differing_parameters;
    std::size_t count{0};

    bool operator==(const BannerDiff&) const = default;
};

BannerDiff banner_diff(const BannerConfig& a, const BannerConfig& b, std::string site = {}, std::string region_a = {},
                       std::string region_b = {});

struct RegionMatrix {
    std::vector<std::string> regions;  // sorted
    std::vector<std::vector<std::size_t>> counts;
    std::vector<BannerDiff> diffs;  // every compared (site, pair), sorted
};

/// Entry (i, j) sums banner_diff counts over sites present in both regions,
/// each parameter weighted equally. Throws single_region.
RegionMatrix pairwise_region_matrix(const CorpusReport& corpus);

inline constexpr std::string_view kParamRejectAllPresent = "reject_all_present";
inline constexpr std::string_view kParamConsentLifetime = "consent_lifetime";
inline constexpr std::string_view kParamConsentModel = "consent_model";
inline constexpr std::string_view kAbsentValue = "(absent)";

struct ParameterHistogram {
    std::string parameter;
    std::vector<std::string> regions;                        // sorted
    std::vector<std::string> values;                         // sorted, kAbsentValue included when seen
    std::map<std::string, std::map<std::string, std::size_t>> counts;  // region -> value -> sites
};

ParameterHistogram parameter_histogram(const CorpusReport& corpus, std::string_view parameter);
/// Histograms for reject_all_present, consent_lifetime and consent_model.
std::vector<ParameterHistogram> banner_histograms(const CorpusReport& corpus);

}  // namespace cookieaudit
