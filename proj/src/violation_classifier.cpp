#include "cookieaudit/violation_classifier.hpp"

#include "cookieaudit/declaration_matcher.hpp"
#include "cookieaudit/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace cookieaudit {

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::Compliant: return "compliant";
        case Outcome::IgnoredRejection: return "ignored_rejection";
        case Outcome::Undeclared: return "undeclared";
        case Outcome::WrongCategory: return "wrong_category";
    }
    return "undeclared";
}

std::string_view display_name(Outcome o) noexcept {
    switch (o) {
        case Outcome::Compliant: return "Compliant Cookie Use";
        case Outcome::IgnoredRejection: return "Ignored Cookie Rejection";
        case Outcome::Undeclared: return "Undeclared Cookies";
        case Outcome::WrongCategory: return "Wrong Cookie Category";
    }
    return "";
}

Outcome classify_cookie(const CookieKey& key, const ConsentSets& sets) {
    return classify_membership(sets.approved.contains(key), sets.rejected.contains(key));
}

std::size_t OutcomeCounts::sum() const { return std::accumulate(total.begin(), total.end(), std::size_t{0}); }

bool SiteSummary::has_violation() const {
    return std::any_of(kViolationOutcomes.begin(), kViolationOutcomes.end(),
                       [&](Outcome o) { return has_outcome[index_of(o)]; });
}

namespace {

void recount(SiteAuditReport& report) {
    report.counts = {};
    for (const auto& c : report.cookies) {
        ++report.counts.total[index_of(c.outcome)];
        if (c.party == Party::ThirdParty) ++report.counts.third_party[index_of(c.outcome)];
    }
    for (auto o : kAllOutcomes) report.has_outcome[index_of(o)] = report.counts.total[index_of(o)] > 0;
    report.compliant_site = std::none_of(kViolationOutcomes.begin(), kViolationOutcomes.end(),
                                         [&](Outcome o) { return report.has_outcome[index_of(o)]; });
}

struct KeyObservation {
    std::int64_t first_seen_at{};
    Phase first_phase{Phase::PreConsent};
    bool seen{false};
    bool post_phase{false};
    bool counted{false};
    std::int64_t sample_at{};
    std::string sample_value;
};

}  // namespace

SiteAuditReport classify_site(const CrawlTrace& trace) {
    SiteAuditReport report;
    report.site = trace.site;
    report.region = trace.region;
    report.iteration = trace.iteration;

    CategoryChoices choices;
    bool declarations_absent = false;
    const auto* snap = latest_snapshot(trace);
    if (snap) {
        report.cmp = snap->cmp;
        if (snap->cmp == Cmp::Other) {
            declarations_absent = true;
            report.diagnostics.push_back("UnsupportedCmp: declarations ignored, all cookies are undeclared candidates");
        } else {
            try {
                choices = complete_choices(decode_snapshot(*snap), trace.categories);
            } catch (const audit_error& e) {
                report.consent_recorded = false;
                report.diagnostics.push_back(std::string("ConsentNotRecorded: ") + e.what());
                return report;
            }
            auto check = verify_reject_all(choices, trace.categories);
            if (!check.recorded) {
                report.consent_recorded = false;
                std::string msg = "ConsentNotRecorded: reject-all not reflected for";
                for (const auto& id : check.mismatched_categories) msg += " " + id;
                report.diagnostics.push_back(msg);
                return report;
            }
        }
    } else if (!trace.declarations.empty() || !trace.categories.empty()) {
        report.consent_recorded = false;
        report.diagnostics.push_back("ConsentNotRecorded: no consent cookie snapshot captured");
        return report;
    } else {
        declarations_absent = true;
    }

    const std::string scope = consent_scope_domain(trace);
    std::map<CookieKey, KeyObservation> observed;
    std::set<std::string> bad_pages;
    for (const auto& req : trace.requests) {
        bool page_in_scope = true;
        if (!req.page_url.empty()) {
            try {
                page_in_scope = in_scope(scope, req.page_url);
            } catch (const audit_error&) {
                page_in_scope = false;
                bad_pages.insert(req.page_url);
            }
        }
        for (const auto& c : req.attached_cookies) {
            auto& obs = observed[c.key()];
            if (!obs.seen || c.observed_at < obs.first_seen_at ||
                (c.observed_at == obs.first_seen_at && c.phase < obs.first_phase)) {
                obs.first_seen_at = c.observed_at;
                obs.first_phase = c.phase;
            }
            obs.seen = true;
            if (c.phase == Phase::PreConsent) continue;
            obs.post_phase = true;
            if (!page_in_scope) continue;
            if (!obs.counted || c.observed_at > obs.sample_at ||
                (c.observed_at == obs.sample_at && c.value > obs.sample_value)) {
                obs.sample_at = c.observed_at;
                obs.sample_value = c.value;
            }
            obs.counted = true;
        }
    }
    for (const auto& page : bad_pages) report.diagnostics.push_back("UnparsableUrl: page '" + page + "' treated as out of scope");

    std::vector<CookieKey> counted;
    for (const auto& [key, obs] : observed) {
        if (!obs.post_phase) ++report.pre_consent_only;
        else if (!obs.counted) ++report.out_of_scope;
        else counted.push_back(key);
    }

    static const std::vector<CmpDeclaration> kNoDeclarations;
    const auto& declarations = declarations_absent ? kNoDeclarations : trace.declarations;
    DeclarationMap decl_map = map_declarations(declarations, counted);
    ConsentSets sets = build_consent_sets(choices, decl_map);

    for (const auto& key : counted) {
        const auto& obs = observed.at(key);
        CookieClassification cls;
        cls.key = key;
        cls.outcome = classify_cookie(key, sets);
        try {
            cls.party = derive_party(key.domain, trace.site);
        } catch (const audit_error& e) {
            cls.party = Party::ThirdParty;
            report.diagnostics.push_back(std::string(e.what()) + " (cookie " + to_string(key) + " counted as third party)");
        }
        for (const auto& cat : decl_map.categories.at(key)) cls.evidence.push_back({cat, choices.at(cat)});
        for (auto idx : decl_map.declarations.at(key)) {
            if (!declarations[idx].purpose_text.empty()) {
                cls.purpose_text = declarations[idx].purpose_text;
                break;
            }
        }
        cls.phase_first_seen = obs.first_phase;
        cls.sample_value = obs.sample_value;
        report.cookies.push_back(std::move(cls));
    }
    recount(report);
    return report;
}

SiteAuditReport filter_report(const SiteAuditReport& report, const CookieFilter& keep) {
    SiteAuditReport out = report;
    if (!keep) return out;
    std::erase_if(out.cookies, [&](const CookieClassification& c) { return !keep(c); });
    recount(out);
    return out;
}

SiteSummary summarize_site(const MergedAudit& merged, const CookieFilter& keep) {
    SiteSummary s;
    s.site = merged.site;
    s.region = merged.region;
    s.iterations = merged.iterations.size();

    std::map<std::pair<CookieKey, Outcome>, CookieClassification> unioned;
    for (const auto& trace : merged.iterations) {
        SiteAuditReport r = filter_report(classify_site(*trace), keep);
        for (const auto& d : r.diagnostics) {
            s.diagnostics.push_back("iteration " + std::to_string(r.iteration) + ": " + d);
        }
        if (r.consent_recorded) {
            ++s.iterations_classified;
            s.mean_cookie_count += static_cast<double>(r.counts.sum());
            for (auto o : kAllOutcomes) {
                s.mean_outcome[index_of(o)] += static_cast<double>(r.counts.total[index_of(o)]);
                s.mean_outcome_third_party[index_of(o)] += static_cast<double>(r.counts.third_party[index_of(o)]);
                s.mean_third_party += static_cast<double>(r.counts.third_party[index_of(o)]);
            }
            for (const auto& c : r.cookies) unioned.insert_or_assign({c.key, c.outcome}, c);
        }
        s.reports.push_back(std::move(r));
    }
    if (s.iterations_classified > 0) {
        const auto n = static_cast<double>(s.iterations_classified);
        s.mean_cookie_count /= n;
        s.mean_third_party /= n;
        for (auto o : kAllOutcomes) {
            s.mean_outcome[index_of(o)] /= n;
            s.mean_outcome_third_party[index_of(o)] /= n;
        }
        s.mean_first_party = s.mean_cookie_count - s.mean_third_party;
    }
    for (auto& [_, c] : unioned) {
        ++s.union_counts.total[index_of(c.outcome)];
        if (c.party == Party::ThirdParty) ++s.union_counts.third_party[index_of(c.outcome)];
        s.union_cookies.push_back(std::move(c));
    }
    for (auto o : kAllOutcomes) s.has_outcome[index_of(o)] = s.union_counts.total[index_of(o)] > 0;
    if (!merged.iterations.empty()) s.banner = merged.iterations.back()->banner;
    return s;
}

CorpusReport classify_corpus(const std::vector<MergedAudit>& merged, const CookieFilter& keep) {
    CorpusReport report;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& m : merged) {
        if (!seen.emplace(m.region, m.site).second) {
            throw audit_error(errc::mixed_keys, "more than one merged audit for (" + m.site + ", " + m.region + ")");
        }
        report.sites.push_back(summarize_site(m, keep));
    }
    std::sort(report.sites.begin(), report.sites.end(), [](const SiteSummary& a, const SiteSummary& b) {
        return std::tie(a.region, a.site) < std::tie(b.region, b.site);
    });

    for (const auto& s : report.sites) {
        if (report.regions.empty() || report.regions.back().region != s.region) {
            report.regions.push_back(RegionRow{});
            report.regions.back().region = s.region;
        }
        auto& row = report.regions.back();
        ++row.sites;
        if (!s.audited()) continue;
        ++row.sites_audited;
        for (auto o : kAllOutcomes) {
            row.cookies[index_of(o)] += s.union_counts.total[index_of(o)];
            if (s.has_outcome[index_of(o)]) ++row.sites_with[index_of(o)];
        }
        if (s.has_violation()) ++row.sites_with_any_violation;
    }
    for (auto& row : report.regions) {
        if (row.sites_audited == 0) continue;
        const auto n = static_cast<double>(row.sites_audited);
        for (auto o : kAllOutcomes) row.pct_sites[index_of(o)] = 100.0 * static_cast<double>(row.sites_with[index_of(o)]) / n;
        row.pct_any_violation = 100.0 * static_cast<double>(row.sites_with_any_violation) / n;
    }
    return report;
}

}  // namespace cookieaudit
