#include "cookieaudit/region_analysis.hpp"

#include "cookieaudit/error.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace cookieaudit {

namespace {

struct SiteValues {
    double cookies{0};
    std::array<double, kOutcomeCount> outcome{};
};

SiteValues values_of(const SiteSummary& s, MergeMode mode) {
    SiteValues v;
    if (mode == MergeMode::Mean) {
        v.cookies = s.mean_cookie_count;
        v.outcome = s.mean_outcome;
    } else {
        std::set<CookieKey> keys;
        for (const auto& c : s.union_cookies) keys.insert(c.key);
        v.cookies = static_cast<double>(keys.size());
        for (auto o : kAllOutcomes) v.outcome[index_of(o)] = static_cast<double>(s.union_counts.total[index_of(o)]);
    }
    return v;
}

}  // namespace

SiteDeltas site_deltas(const CorpusReport& corpus, std::string_view baseline, MergeMode mode) {
    std::map<std::string, const SiteSummary*> base;
    for (const auto& s : corpus.sites) {
        if (s.region == baseline) base.emplace(s.site, &s);
    }
    if (base.empty()) throw audit_error(errc::missing_baseline, "baseline region '" + std::string(baseline) + "' has no sites");

    SiteDeltas out;
    for (const auto& s : corpus.sites) {
        auto it = base.find(s.site);
        if (it == base.end()) {
            out.diagnostics.push_back("site " + s.site + " (" + s.region + "): no baseline audit, skipped");
            continue;
        }
        if (!it->second->audited()) {
            if (s.region == baseline) out.diagnostics.push_back("site " + s.site + ": baseline audit has no classified iteration, skipped");
            continue;
        }
        if (!s.audited()) {
            out.diagnostics.push_back("site " + s.site + " (" + s.region + "): no classified iteration, skipped");
            continue;
        }
        const auto a = values_of(s, mode);
        const auto b = values_of(*it->second, mode);
        RegionDelta d;
        d.site = s.site;
        d.region = s.region;
        d.baseline_region = std::string(baseline);
        d.delta_cookie_count = a.cookies - b.cookies;
        for (std::size_t i = 0; i < kOutcomeCount; ++i) d.delta_outcome[i] = a.outcome[i] - b.outcome[i];
        out.deltas.push_back(std::move(d));
    }
    std::sort(out.deltas.begin(), out.deltas.end(), [](const RegionDelta& x, const RegionDelta& y) {
        return std::tie(x.site, x.region) < std::tie(y.site, y.region);
    });
    return out;
}

std::vector<std::string> differing_parameters(const BannerConfig& a, const BannerConfig& b) {
    std::vector<std::string> out;
    auto ia = a.params.begin();
    auto ib = b.params.begin();
    while (ia != a.params.end() || ib != b.params.end()) {
        if (ib == b.params.end() || (ia != a.params.end() && ia->first < ib->first)) {
            out.push_back(ia++->first);
        } else if (ia == a.params.end() || ib->first < ia->first) {
            out.push_back(ib++->first);
        } else {
            if (ia->second != ib->second) out.push_back(ia->first);
            ++ia;
            ++ib;
        }
    }
    return out;
}

BannerDiff banner_diff(const BannerConfig& a, const BannerConfig& b, std::string site, std::string region_a,
                       std::string region_b) {
    BannerDiff d;
    d.site = std::move(site);
    if (region_b < region_a) std::swap(region_a, region_b);
    d.region_a = std::move(region_a);
    d.region_b = std::move(region_b);
    d.differing_parameters = differing_parameters(a, b);
    d.count = d.differing_parameters.size();
    return d;
}

RegionMatrix pairwise_region_matrix(const CorpusReport& corpus) {
    RegionMatrix m;
    std::map<std::string, std::map<std::string, const SiteSummary*>> by_site;  // site -> region -> summary
    std::set<std::string> regions;
    for (const auto& s : corpus.sites) {
        regions.insert(s.region);
        by_site[s.site][s.region] = &s;
    }
    if (regions.size() < 2) throw audit_error(errc::single_region, "pairwise comparison needs at least 2 regions");
    m.regions.assign(regions.begin(), regions.end());
    const std::size_t n = m.regions.size();
    m.counts.assign(n, std::vector<std::size_t>(n, 0));
    for (const auto& [site, per_region] : by_site) {
        for (std::size_t i = 0; i < n; ++i) {
            auto a = per_region.find(m.regions[i]);
            if (a == per_region.end()) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                auto b = per_region.find(m.regions[j]);
                if (b == per_region.end()) continue;
                auto d = banner_diff(a->second->banner, b->second->banner, site, m.regions[i], m.regions[j]);
                m.counts[i][j] += d.count;
                m.counts[j][i] += d.count;
                m.diffs.push_back(std::move(d));
            }
        }
    }
    std::sort(m.diffs.begin(), m.diffs.end(), [](const BannerDiff& x, const BannerDiff& y) {
        return std::tie(x.region_a, x.region_b, x.site) < std::tie(y.region_a, y.region_b, y.site);
    });
    return m;
}

ParameterHistogram parameter_histogram(const CorpusReport& corpus, std::string_view parameter) {
    ParameterHistogram h;
    h.parameter = canonical_banner_key(parameter);
    std::set<std::string> regions, values;
    for (const auto& s : corpus.sites) {
        regions.insert(s.region);
        auto it = s.banner.params.find(h.parameter);
        const std::string value = it == s.banner.params.end() ? std::string(kAbsentValue) : it->second;
        values.insert(value);
        ++h.counts[s.region][value];
    }
    h.regions.assign(regions.begin(), regions.end());
    h.values.assign(values.begin(), values.end());
    return h;
}

std::vector<ParameterHistogram> banner_histograms(const CorpusReport& corpus) {
    return {parameter_histogram(corpus, kParamRejectAllPresent), parameter_histogram(corpus, kParamConsentLifetime),
            parameter_histogram(corpus, kParamConsentModel)};
}

}  // namespace cookieaudit
