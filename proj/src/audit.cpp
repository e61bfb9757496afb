#include "cookieaudit/audit.hpp"

#include "cookieaudit/record_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace cookieaudit {

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0) return "0";  // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

class Csv {
public:
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ += ',';
            out_ += csv_escape(fields[i]);
        }
        out_ += '\n';
    }
    const std::string& str() const { return out_; }

private:
    std::string out_;
};

std::string dump_records(const std::vector<nlohmann::ordered_json>& records) {
    std::ostringstream out;
    for (const auto& r : records) write_record(out, r);
    return out.str();
}

nlohmann::ordered_json error_record(const FileError& e) {
    nlohmann::ordered_json j;
    j["kind"] = "error";
    j["file"] = e.file;
    j["code"] = to_string(e.code);
    j["message"] = e.message;
    if (e.byte_offset) j["byte_offset"] = *e.byte_offset;
    return j;
}

nlohmann::ordered_json diagnostic_record(std::string_view scope, std::string_view message) {
    nlohmann::ordered_json j;
    j["kind"] = "diagnostic";
    j["scope"] = scope;
    j["message"] = message;
    return j;
}

const std::array<std::pair<Outcome, std::string_view>, 3> kStatMeasurements{{
    {Outcome::IgnoredRejection, "Ignored Reject"},
    {Outcome::Undeclared, "Undeclared"},
    {Outcome::WrongCategory, "Wrong Categ."},
}};

// Per-site value for the statistics table; outcome empty = all cookies.
double site_value(const SiteSummary& s, std::optional<Outcome> outcome, Party party, MergeMode mode) {
    if (mode == MergeMode::Mean) {
        if (!outcome) return party == Party::FirstParty ? s.mean_first_party : s.mean_third_party;
        const auto i = index_of(*outcome);
        return party == Party::ThirdParty ? s.mean_outcome_third_party[i] : s.mean_outcome[i] - s.mean_outcome_third_party[i];
    }
    std::set<CookieKey> keys;
    for (const auto& c : s.union_cookies) {
        if (c.party != party) continue;
        if (outcome && c.outcome != *outcome) continue;
        keys.insert(c.key);
    }
    return static_cast<double>(keys.size());
}

struct StatCell {
    std::optional<stats::TestResult> levene;
    std::optional<stats::TestResult> kruskal;
    std::string note;
};

StatCell run_tests(const stats::Groups& groups, const AuditConfig& cfg) {
    StatCell cell;
    try {
        cell.levene = stats::levene(groups, cfg.levene_center);
    } catch (const audit_error& e) {
        cell.note = std::string("levene: ") + e.what();
    }
    try {
        cell.kruskal = stats::kruskal_wallis(groups, cfg.tie_correction);
    } catch (const audit_error& e) {
        cell.note += (cell.note.empty() ? "" : "; ") + std::string("kruskal_wallis: ") + e.what();
    }
    return cell;
}

// Right-aligned columns always keep one separating space.
std::string pad(std::string s, std::size_t width, bool right = false) {
    if (right && s.size() + 1 > width) return " " + s;
    if (s.size() >= width) return s;
    return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}


// Fills banner_matrix.csv and banner_histograms.csv; returns the reason
// the matrix was skipped, if any.
std::optional<std::string> add_banner_outputs(const CorpusReport& corpus, AuditOutputs& out,
                                              std::vector<nlohmann::ordered_json>& records) {
    std::optional<std::string> skipped;
    try {
        const auto m = pairwise_region_matrix(corpus);
        Csv csv;
        std::vector<std::string> header{"region"};
        header.insert(header.end(), m.regions.begin(), m.regions.end());
        csv.row(header);
        for (std::size_t i = 0; i < m.regions.size(); ++i) {
            std::vector<std::string> row{m.regions[i]};
            for (auto v : m.counts[i]) row.push_back(std::to_string(v));
            csv.row(row);
        }
        out.files["banner_matrix.csv"] = csv.str();
        for (const auto& d : m.diffs) {
            nlohmann::ordered_json j;
            j["kind"] = "banner_diff";
            j["site"] = d.site;
            j["region_a"] = d.region_a;
            j["region_b"] = d.region_b;
            j["count"] = d.count;
            j["parameters"] = d.differing_parameters;
            records.push_back(j);
        }
    } catch (const audit_error& e) {
        skipped = e.what();
    }
    Csv csv;
    std::set<std::string> regions;
    for (const auto& s : corpus.sites) regions.insert(s.region);
    std::vector<std::string> header{"parameter", "value"};
    header.insert(header.end(), regions.begin(), regions.end());
    csv.row(header);
    for (const auto& h : banner_histograms(corpus)) {
        for (const auto& v : h.values) {
            std::vector<std::string> row{h.parameter, v};
            for (const auto& r : regions) {
                std::size_t n = 0;
                if (auto ri = h.counts.find(r); ri != h.counts.end()) {
                    if (auto vi = ri->second.find(v); vi != ri->second.end()) n = vi->second;
                }
                row.push_back(std::to_string(n));
            }
            csv.row(row);
        }
    }
    out.files["banner_histograms.csv"] = csv.str();
    return skipped;
}

}  // namespace

std::string outcome_legend() {
    std::ostringstream out;
    out << "Outcome definitions (c = cookie identified by name, domain, path; A_c = approved, R_c = rejected)\n";
    const std::array<std::array<std::string_view, 3>, 4> rows{{
        {"Compliant Cookie Use", "cookie used consistently with the consent choice", "c in A_c and c not in R_c"},
        {"Ignored Cookie Rejection", "cookie used inconsistently with the consent choice", "c not in A_c and c in R_c"},
        {"Undeclared Cookies", "cookie used without appearing in the cookie library", "c not in A_c and c not in R_c"},
        {"Wrong Cookie Category", "cookie in both a rejected and an accepted category", "c in A_c and c in R_c"},
    }};
    for (const auto& r : rows) {
        out << "  " << pad(std::string(r[0]), 26) << pad(std::string(r[1]), 54) << r[2] << "\n";
    }
    return out.str();
}

void validate_config(const AuditConfig& c) {
    if (c.top_k < 1) throw audit_error(errc::usage_error, "top_k must be >= 1");
    if (!(c.entropy_threshold > 0) || std::isinf(c.entropy_threshold)) {
        throw audit_error(errc::usage_error, "entropy_threshold must be a positive number");
    }
    if (c.baseline_region.empty()) throw audit_error(errc::usage_error, "baseline_region must not be empty");
    if (c.output_dir.empty()) throw audit_error(errc::usage_error, "output_dir must not be empty");
}

void apply_config_json(AuditConfig& c, std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw audit_error(errc::usage_error, std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw audit_error(errc::usage_error, "config file must hold a JSON object");
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& k = it.key();
            const auto& v = it.value();
            if (k == "trace_dir") c.trace_dir = v.get<std::string>();
            else if (k == "baseline_region") c.baseline_region = v.get<std::string>();
            else if (k == "merge_mode") {
                auto m = parse_merge_mode(v.get<std::string>());
                if (!m) throw audit_error(errc::usage_error, "merge_mode must be 'union' or 'mean'");
                c.merge_mode = *m;
            } else if (k == "pi_filter") c.pi_filter = v.get<bool>();
            else if (k == "entropy_threshold") c.entropy_threshold = v.get<double>();
            else if (k == "top_k") c.top_k = v.get<int>();
            else if (k == "output_dir") c.output_dir = v.get<std::string>();
            else if (k == "purpose_db") c.purpose_db = v.get<std::string>();
            else if (k == "levene_center") {
                auto s = v.get<std::string>();
                if (s == "mean") c.levene_center = stats::LeveneCenter::Mean;
                else if (s == "median") c.levene_center = stats::LeveneCenter::Median;
                else throw audit_error(errc::usage_error, "levene_center must be 'mean' or 'median'");
            } else if (k == "tie_correction") c.tie_correction = v.get<bool>();
            else throw audit_error(errc::usage_error, "unknown config key '" + k + "'");
        }
    } catch (const nlohmann::json::type_error& e) {
        throw audit_error(errc::usage_error, std::string("config file: ") + e.what());
    }
}

void apply_config_file(AuditConfig& c, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw audit_error(errc::io_error, "cannot open config file '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    apply_config_json(c, s.str());
}

std::vector<std::string> list_trace_files(const std::string& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw audit_error(errc::io_error, "'" + dir + "' is not a directory");
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".jsonl" || ext == ".trace") out.push_back(entry.path().string());
    }
    if (ec) throw audit_error(errc::io_error, "cannot list '" + dir + "': " + ec.message());
    std::sort(out.begin(), out.end());
    return out;
}

LoadedCorpus load_corpus(const std::string& dir, MergeMode mode) {
    LoadedCorpus corpus;
    const auto files = list_trace_files(dir);
    corpus.trace_files = files.size();
    std::map<std::pair<std::string, std::string>, std::vector<std::shared_ptr<const CrawlTrace>>> groups;
    std::map<std::pair<std::string, std::string>, std::string> first_file;
    for (const auto& f : files) {
        const std::string name = fs::path(f).filename().string();
        try {
            auto t = std::make_shared<const CrawlTrace>(parse_trace_file(f));
            auto key = std::make_pair(t->region, t->site);
            first_file.emplace(key, name);
            groups[key].push_back(std::move(t));
        } catch (const audit_error& e) {
            corpus.errors.push_back({name, e.code(), e.what(), e.byte_offset()});
        }
    }
    for (auto& [key, traces] : groups) {
        try {
            corpus.audits.push_back(merge_iterations(std::move(traces), mode));
        } catch (const audit_error& e) {
            corpus.errors.push_back({first_file[key], e.code(), e.what(), e.byte_offset()});
        }
    }
    return corpus;
}

AuditOutputs run_audit(const AuditConfig& config) {
    try {
        validate_config(config);
        return run_audit(config, load_corpus(config.trace_dir, config.merge_mode));
    } catch (const audit_error& e) {
        AuditOutputs out;
        out.fatal = true;
        const auto code = e.code() == errc::io_error ? errc::no_traces : e.code();
        out.files["errors.jsonl"] = dump_records({error_record({config.trace_dir, code, e.what(), std::nullopt})});
        out.diagnostics.push_back(e.what());
        return out;
    }
}

AuditOutputs run_audit(const AuditConfig& config, const LoadedCorpus& corpus) {
    AuditOutputs out;
    std::vector<nlohmann::ordered_json> errors;
    for (const auto& e : corpus.errors) errors.push_back(error_record(e));

    auto fatal = [&](errc code, const std::string& msg) {
        out.fatal = true;
        errors.push_back(error_record({config.trace_dir, code, std::string(to_string(code)) + ": " + msg, std::nullopt}));
        out.diagnostics.push_back(msg);
        out.files["errors.jsonl"] = dump_records(errors);
        return out;
    };
    if (corpus.audits.empty()) {
        return fatal(errc::no_traces, corpus.trace_files == 0 ? "no trace files in " + config.trace_dir
                                                              : "none of the trace files could be used");
    }

    PurposeDatabase db;
    if (!config.purpose_db.empty()) {
        try {
            db = PurposeDatabase::load(config.purpose_db);
        } catch (const audit_error& e) {
            return fatal(e.code(), e.what());
        }
    }
    const PiDetector detector(PiRules::bundled(), db, config.entropy_threshold);

    const CorpusReport all = classify_corpus(corpus.audits);
    const PiLabels labels = label_corpus(all, detector);
    const PiBreakdown pi = summarize_pi(all, labels);
    const CorpusReport reported = config.pi_filter ? classify_corpus(corpus.audits, detector.likely_pi_filter()) : all;

    std::vector<nlohmann::ordered_json> records;
    {
        nlohmann::ordered_json meta;
        meta["kind"] = "audit_meta";
        meta["trace_files"] = corpus.trace_files;
        meta["site_audits"] = corpus.audits.size();
        meta["baseline_region"] = config.baseline_region;
        meta["merge_mode"] = to_string(config.merge_mode);
        meta["pi_filter"] = config.pi_filter;
        meta["entropy_threshold"] = config.entropy_threshold;
        meta["top_k"] = config.top_k;
        meta["levene_center"] = to_string(config.levene_center);
        meta["tie_correction"] = config.tie_correction;
        meta["banner_diff_weighting"] = "equal";
        records.push_back(meta);
    }

    for (const auto& s : all.sites) {
        for (const auto& d : s.diagnostics) errors.push_back(diagnostic_record(s.site + "@" + s.region, d));
    }

    // sites.csv
    {
        Csv csv;
        std::vector<std::string> header{"region", "site", "iterations", "iterations_classified", "cookies"};
        for (auto o : kAllOutcomes) header.push_back(std::string(to_string(o)));
        for (auto o : kAllOutcomes) header.push_back(std::string(to_string(o)) + "_third_party");
        for (auto h : {"mean_cookies", "mean_first_party", "mean_third_party"}) header.push_back(h);
        for (auto o : kAllOutcomes) header.push_back("mean_" + std::string(to_string(o)));
        header.push_back("has_violation");
        csv.row(header);
        for (const auto& s : reported.sites) {
            std::set<CookieKey> keys;
            for (const auto& c : s.union_cookies) keys.insert(c.key);
            std::vector<std::string> row{s.region, s.site, std::to_string(s.iterations),
                                         std::to_string(s.iterations_classified), std::to_string(keys.size())};
            for (auto o : kAllOutcomes) row.push_back(std::to_string(s.union_counts.total[index_of(o)]));
            for (auto o : kAllOutcomes) row.push_back(std::to_string(s.union_counts.third_party[index_of(o)]));
            row.push_back(format_number(s.mean_cookie_count));
            row.push_back(format_number(s.mean_first_party));
            row.push_back(format_number(s.mean_third_party));
            for (auto o : kAllOutcomes) row.push_back(format_number(s.mean_outcome[index_of(o)]));
            row.push_back(s.audited() ? (s.has_violation() ? "true" : "false") : "");
            csv.row(row);

            nlohmann::ordered_json j;
            j["kind"] = "site";
            j["region"] = s.region;
            j["site"] = s.site;
            j["iterations"] = s.iterations;
            j["iterations_classified"] = s.iterations_classified;
            j["outcomes"] = nlohmann::ordered_json::object();
            for (auto o : kAllOutcomes) j["outcomes"][std::string(to_string(o))] = s.union_counts.total[index_of(o)];
            j["mean_cookies"] = s.mean_cookie_count;
            records.push_back(j);
        }
        out.files["sites.csv"] = csv.str();
    }

    // cookies.csv: every classified cookie with its PI label
    {
        std::set<std::tuple<std::string, std::string, CookieKey, Outcome>> kept;
        for (const auto& s : reported.sites) {
            for (const auto& c : s.union_cookies) kept.insert({s.region, s.site, c.key, c.outcome});
        }
        Csv csv;
        csv.row({"region", "site", "name", "domain", "path", "outcome", "party", "first_seen", "categories",
                 "pi_category", "pi_signals", "reported"});
        for (const auto& s : all.sites) {
            for (const auto& c : s.union_cookies) {
                const auto& label = labels.at(CookieRef{s.region, s.site, c.key});
                std::string cats, sigs;
                for (const auto& e : c.evidence) cats += (cats.empty() ? "" : ";") + e.category_id + "=" + std::string(to_string(e.choice));
                for (const auto& sg : label.signals) sigs += (sigs.empty() ? "" : ";") + sg;
                const bool rep = kept.contains({s.region, s.site, c.key, c.outcome});
                csv.row({s.region, s.site, c.key.name, c.key.domain, c.key.path, std::string(to_string(c.outcome)),
                         std::string(to_string(c.party)), std::string(to_string(c.phase_first_seen)), cats,
                         std::string(to_string(label.category)), sigs, rep ? "true" : "false"});
                nlohmann::ordered_json j;
                j["kind"] = "cookie";
                j["region"] = s.region;
                j["site"] = s.site;
                j["name"] = c.key.name;
                j["domain"] = c.key.domain;
                j["path"] = c.key.path;
                j["outcome"] = to_string(c.outcome);
                j["party"] = to_string(c.party);
                j["pi_category"] = to_string(label.category);
                j["reported"] = rep;
                records.push_back(j);
            }
        }
        out.files["cookies.csv"] = csv.str();
    }

    // corpus.csv
    {
        Csv csv;
        csv.row({"region", "outcome", "cookies", "pct_websites", "sites_audited"});
        for (const auto& r : reported.regions) {
            for (auto o : kAllOutcomes) {
                csv.row({r.region, std::string(to_string(o)), std::to_string(r.cookies[index_of(o)]),
                         pct(r.pct_sites[index_of(o)]), std::to_string(r.sites_audited)});
            }
            csv.row({r.region, "any_violation", "", pct(r.pct_any_violation), std::to_string(r.sites_audited)});
            nlohmann::ordered_json j;
            j["kind"] = "region_row";
            j["region"] = r.region;
            j["sites"] = r.sites;
            j["sites_audited"] = r.sites_audited;
            for (auto o : kAllOutcomes) {
                j["cookies"][std::string(to_string(o))] = r.cookies[index_of(o)];
                j["pct_websites"][std::string(to_string(o))] = r.pct_sites[index_of(o)];
            }
            j["pct_any_violation"] = r.pct_any_violation;
            records.push_back(j);
        }
        out.files["corpus.csv"] = csv.str();
    }

    // pi_breakdown.csv: categories as rows, regions as columns
    {
        Csv csv;
        std::vector<std::string> header{"category"};
        for (const auto& r : pi.regions) header.push_back(r.region);
        csv.row(header);
        for (auto c : kAllPiCategories) {
            std::vector<std::string> row{std::string(display_name(c))};
            for (const auto& r : pi.regions) row.push_back(pct(r.pct[index_of(c)]));
            csv.row(row);
        }
        std::vector<std::string> totals{"cookies"};
        for (const auto& r : pi.regions) totals.push_back(std::to_string(r.cookies));
        csv.row(totals);
        out.files["pi_breakdown.csv"] = csv.str();
        for (const auto& r : pi.regions) {
            nlohmann::ordered_json j;
            j["kind"] = "pi_row";
            j["region"] = r.region;
            j["cookies"] = r.cookies;
            for (auto c : kAllPiCategories) j["pct"][std::string(to_string(c))] = r.pct[index_of(c)];
            records.push_back(j);
        }
        nlohmann::ordered_json j;
        j["kind"] = "pi_summary";
        j["cookies"] = pi.total_cookies;
        j["likely_pi"] = pi.likely_pi_cookies;
        j["likely_pi_fraction"] = pi.likely_pi_fraction;
        records.push_back(j);
    }

    // region_deltas.csv
    {
        Csv csv;
        std::vector<std::string> header{"site", "region", "baseline_region", "delta_cookies"};
        for (auto o : kAllOutcomes) header.push_back("delta_" + std::string(to_string(o)));
        csv.row(header);
        try {
            const auto deltas = site_deltas(reported, config.baseline_region, config.merge_mode);
            for (const auto& d : deltas.deltas) {
                std::vector<std::string> row{d.site, d.region, d.baseline_region, format_number(d.delta_cookie_count)};
                for (auto o : kAllOutcomes) row.push_back(format_number(d.delta_outcome[index_of(o)]));
                csv.row(row);
                nlohmann::ordered_json j;
                j["kind"] = "delta";
                j["site"] = d.site;
                j["region"] = d.region;
                j["baseline_region"] = d.baseline_region;
                j["delta_cookies"] = d.delta_cookie_count;
                for (auto o : kAllOutcomes) j["delta_outcomes"][std::string(to_string(o))] = d.delta_outcome[index_of(o)];
                records.push_back(j);
            }
            for (const auto& d : deltas.diagnostics) errors.push_back(diagnostic_record("region_deltas", d));
        } catch (const audit_error& e) {
            errors.push_back(diagnostic_record("region_deltas", e.what()));
        }
        out.files["region_deltas.csv"] = csv.str();
    }

    if (auto diag = add_banner_outputs(reported, out, records)) errors.push_back(diagnostic_record("banner_matrix", *diag));

    // stats.csv: one row per measurement, first- and third-party tests
    std::vector<std::pair<std::string, std::array<StatCell, 2>>> stat_rows;
    {
        std::map<std::string, std::vector<const SiteSummary*>> by_region;
        for (const auto& s : reported.sites) {
            if (s.audited()) by_region[s.region].push_back(&s);
        }
        auto groups_for = [&](std::optional<Outcome> o, Party p) {
            stats::Groups g;
            for (const auto& [region, sites] : by_region) {
                std::vector<double> v;
                for (const auto* s : sites) v.push_back(site_value(*s, o, p, config.merge_mode));
                g.push_back(std::move(v));
            }
            return g;
        };
        stat_rows.push_back({"Mean Cookies", {run_tests(groups_for(std::nullopt, Party::FirstParty), config),
                                              run_tests(groups_for(std::nullopt, Party::ThirdParty), config)}});
        for (const auto& [o, name] : kStatMeasurements) {
            stat_rows.push_back({std::string(name), {run_tests(groups_for(o, Party::FirstParty), config),
                                                     run_tests(groups_for(o, Party::ThirdParty), config)}});
        }
        Csv csv;
        csv.row({"measurement", "first_party_levene_w", "first_party_levene_p", "first_party_h", "first_party_h_p",
                 "third_party_levene_w", "third_party_levene_p", "third_party_h", "third_party_h_p"});
        for (const auto& [name, cells] : stat_rows) {
            std::vector<std::string> row{name};
            for (std::size_t pi = 0; pi < cells.size(); ++pi) {
                const auto& c = cells[pi];
                row.push_back(c.levene ? format_number(c.levene->statistic) : "NA");
                row.push_back(c.levene ? format_number(c.levene->p_value) : "NA");
                row.push_back(c.kruskal ? format_number(c.kruskal->statistic) : "NA");
                row.push_back(c.kruskal ? format_number(c.kruskal->p_value) : "NA");
                if (!c.note.empty()) errors.push_back(diagnostic_record("stats:" + name + (pi == 0 ? ":first_party" : ":third_party"), c.note));
            }
            csv.row(row);
            nlohmann::ordered_json j;
            j["kind"] = "stat";
            j["measurement"] = name;
            const std::array<std::string, 2> parties{"first_party", "third_party"};
            for (std::size_t i = 0; i < 2; ++i) {
                auto& pj = j[parties[i]];
                pj["levene_w"] = cells[i].levene ? nlohmann::ordered_json(cells[i].levene->statistic) : nlohmann::ordered_json(nullptr);
                pj["levene_p"] = cells[i].levene ? nlohmann::ordered_json(cells[i].levene->p_value) : nlohmann::ordered_json(nullptr);
                pj["h"] = cells[i].kruskal ? nlohmann::ordered_json(cells[i].kruskal->statistic) : nlohmann::ordered_json(nullptr);
                pj["h_p"] = cells[i].kruskal ? nlohmann::ordered_json(cells[i].kruskal->p_value) : nlohmann::ordered_json(nullptr);
            }
            records.push_back(j);
        }
        out.files["stats.csv"] = csv.str();
    }

    // report.txt
    {
        std::ostringstream r;
        std::set<std::string> regions;
        for (const auto& s : all.sites) regions.insert(s.region);
        r << "Cookie consent audit\n";
        r << "trace files: " << corpus.trace_files << ", site audits: " << corpus.audits.size()
          << ", regions: " << regions.size() << ", file errors: " << corpus.errors.size() << "\n";
        r << "merge mode: " << to_string(config.merge_mode) << " (corpus table: union over iterations)"
          << ", baseline region: " << config.baseline_region << "\n";
        r << "PI filter: " << (config.pi_filter ? "on" : "off") << ", entropy threshold: "
          << format_number(config.entropy_threshold) << " bits\n";
        r << "Levene centering: " << to_string(config.levene_center)
          << ", Kruskal-Wallis tie correction: " << (config.tie_correction ? "on" : "off")
          << ", banner diffs weight each parameter equally\n\n";
        r << outcome_legend() << "\n";

        r << "Detected cookie outcomes" << (config.pi_filter ? " (likely-PI cookies)" : "") << "\n";
        r << "  " << pad("Outcome", 26);
        for (const auto& row : reported.regions) r << pad(row.region + " #", 10, true) << pad("%sites", 9, true);
        r << "\n";
        for (auto o : kAllOutcomes) {
            r << "  " << pad(std::string(display_name(o)), 26);
            for (const auto& row : reported.regions) {
                r << pad(std::to_string(row.cookies[index_of(o)]), 10, true)
                  << pad(pct(row.pct_sites[index_of(o)]), 9, true);
            }
            r << "\n";
        }
        r << "  " << pad("Any violation", 26);
        for (const auto& row : reported.regions) r << pad("", 10) << pad(pct(row.pct_any_violation), 9, true);
        r << "\n\n";

        r << "Cookies by personal-information category (% of cookies)\n  " << pad("Category", 16);
        for (const auto& row : pi.regions) r << pad(row.region, 10, true);
        r << "\n";
        for (auto c : kAllPiCategories) {
            r << "  " << pad(std::string(display_name(c)), 16);
            for (const auto& row : pi.regions) r << pad(pct(row.pct[index_of(c)]), 10, true);
            r << "\n";
        }
        r << "  likely PI overall: " << pct(100.0 * pi.likely_pi_fraction) << "% of " << pi.total_cookies << " cookies\n\n";

        r << "Statistical tests across regions (Levene p; H (p))\n";
        r << "  " << pad("Measurement", 16) << pad("1st Levene", 16, true) << pad("1st H-Test (p)", 30, true)
          << pad("3rd Levene", 16, true) << pad("3rd H-Test (p)", 30, true) << "\n";
        for (const auto& [name, cells] : stat_rows) {
            r << "  " << pad(name, 16);
            for (const auto& c : cells) {
                r << pad(c.levene ? format_number(c.levene->p_value) : "NA", 16, true);
                std::string h = c.kruskal ? format_number(c.kruskal->statistic) + " (" + format_number(c.kruskal->p_value) + ")" : "NA";
                r << pad(h, 30, true);
            }
            r << "\n";
        }
        out.files["report.txt"] = r.str();
    }

    out.files["audit.jsonl"] = dump_records(records);
    out.files["errors.jsonl"] = dump_records(errors);
    return out;
}

AuditOutputs run_region_diff(const AuditConfig& config, const LoadedCorpus& corpus) {
    AuditOutputs out;
    std::vector<nlohmann::ordered_json> errors;
    for (const auto& e : corpus.errors) errors.push_back(error_record(e));
    std::set<std::string> regions;
    for (const auto& a : corpus.audits) regions.insert(a.region);
    if (corpus.audits.empty() || regions.size() < 2) {
        const auto code = corpus.audits.empty() ? errc::no_traces : errc::single_region;
        const std::string msg = corpus.audits.empty() ? "no usable traces in " + config.trace_dir
                                                      : "banner comparison needs at least two regions";
        errors.push_back(error_record({config.trace_dir, code, std::string(to_string(code)) + ": " + msg, std::nullopt}));
        out.fatal = true;
        out.diagnostics.push_back(msg);
        out.files["errors.jsonl"] = dump_records(errors);
        return out;
    }
    std::vector<nlohmann::ordered_json> records;
    const auto report = classify_corpus(corpus.audits);
    if (auto diag = add_banner_outputs(report, out, records)) errors.push_back(diagnostic_record("banner_matrix", *diag));
    out.files["banner_diffs.jsonl"] = dump_records(records);
    out.files["errors.jsonl"] = dump_records(errors);
    return out;
}

void write_outputs(const AuditOutputs& outputs, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw audit_error(errc::io_error, "cannot create '" + dir + "': " + ec.message());
    for (const auto& [name, content] : outputs.files) {
        const auto path = fs::path(dir) / name;
        const auto tmp = fs::path(dir) / (name + ".tmp");
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw audit_error(errc::io_error, "cannot write '" + tmp.string() + "'");
            f << content;
            if (!f) throw audit_error(errc::io_error, "write failed for '" + tmp.string() + "'");
        }
        fs::rename(tmp, path, ec);
        if (ec) throw audit_error(errc::io_error, "cannot rename into '" + path.string() + "': " + ec.message());
    }
}

}  // namespace cookieaudit
