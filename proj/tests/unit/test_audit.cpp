#include "cookieaudit/audit.hpp"
#include "cookieaudit/error.hpp"
#include "cookieaudit/record_io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace cookieaudit;
using cookieaudit::testing::fixture;
using cookieaudit::testing::TempDir;
using cookieaudit::testing::TraceBuilder;

namespace {

AuditConfig config_for(const std::string& rel) {
    AuditConfig c;
    c.trace_dir = fixture(rel);
    return c;
}

std::vector<Record> error_records(const AuditOutputs& out) { return read_records(out.files.at("errors.jsonl")); }

}  // namespace

TEST(AuditConfig, Validation) {
    AuditConfig c;
    EXPECT_NO_THROW(validate_config(c));
    auto bad = [](auto mutate) {
        AuditConfig c;
        mutate(c);
        try {
            validate_config(c);
        } catch (const audit_error& e) {
            return e.code();
        }
        return errc::io_error;
    };
    EXPECT_EQ(bad([](AuditConfig& c) { c.top_k = 0; }), errc::usage_error);
    EXPECT_EQ(bad([](AuditConfig& c) { c.entropy_threshold = 0; }), errc::usage_error);
    EXPECT_EQ(bad([](AuditConfig& c) { c.baseline_region.clear(); }), errc::usage_error);
}

TEST(AuditConfig, JsonFile) {
    AuditConfig c;
    apply_config_json(c, R"({"baseline_region":"UK","merge_mode":"union","pi_filter":false,"top_k":3,
                             "levene_center":"median","tie_correction":false,"entropy_threshold":45.5})");
    EXPECT_EQ(c.baseline_region, "UK");
    EXPECT_EQ(c.merge_mode, MergeMode::Union);
    EXPECT_FALSE(c.pi_filter);
    EXPECT_EQ(c.top_k, 3);
    EXPECT_EQ(c.levene_center, stats::LeveneCenter::Median);
    EXPECT_FALSE(c.tie_correction);
    EXPECT_DOUBLE_EQ(c.entropy_threshold, 45.5);
    EXPECT_THROW(apply_config_json(c, R"({"bogus":1})"), audit_error);
    EXPECT_THROW(apply_config_json(c, R"({"top_k":"five"})"), audit_error);
    EXPECT_THROW(apply_config_json(c, R"({"merge_mode":"median"})"), audit_error);
}

TEST(AuditFormat, CsvAndNumbers) {
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(1.5), "1.5");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(AuditLegend, NamesEveryOutcome) {
    auto legend = outcome_legend();
    for (auto o : kAllOutcomes) EXPECT_NE(legend.find(display_name(o)), std::string::npos);
    EXPECT_NE(legend.find("c in A_c and c not in R_c"), std::string::npos);
}

TEST(RunAudit, EmptyDirectoryIsFatal) {
    auto out = run_audit(config_for("empty"));
    EXPECT_TRUE(out.fatal);
    auto errs = error_records(out);
    ASSERT_FALSE(errs.empty());
    EXPECT_EQ(errs[0].body.at("code"), "NoTraces");

    auto missing = run_audit(config_for("does-not-exist"));
    EXPECT_TRUE(missing.fatal);
}

TEST(RunAudit, ThreeSiteCorpusOutputs) {
    auto out = run_audit(config_for("corpus3"));
    ASSERT_FALSE(out.fatal) << out.files.at("errors.jsonl");
    for (const char* f : {"sites.csv", "cookies.csv", "corpus.csv", "pi_breakdown.csv", "region_deltas.csv",
                          "banner_matrix.csv", "banner_histograms.csv", "stats.csv", "report.txt", "audit.jsonl",
                          "errors.jsonl"}) {
        EXPECT_TRUE(out.files.count(f)) << f;
    }
    const auto& report = out.files.at("report.txt");
    EXPECT_NE(report.find("A_c"), std::string::npos);
    EXPECT_NE(report.find("Unlikely P.I."), std::string::npos);
    EXPECT_NE(report.find("baseline"), std::string::npos);

    std::set<std::string> kinds;
    for (const auto& r : read_records(out.files.at("audit.jsonl"))) kinds.insert(r.kind);
    for (const char* k : {"audit_meta", "site", "cookie", "region_row", "pi_row", "delta", "banner_diff"}) {
        EXPECT_TRUE(kinds.count(k)) << k;
    }
    EXPECT_EQ(out.files.at("corpus.csv").rfind("region,outcome,cookies,pct_websites,sites_audited\n", 0), 0u);
}

TEST(RunAudit, Deterministic) {
    auto a = run_audit(config_for("corpus3"));
    auto b = run_audit(config_for("corpus3"));
    EXPECT_EQ(a.files, b.files);
}

TEST(RunAudit, BadFileRecordedRunContinues) {
    TempDir dir("audit");
    dir.write("good.jsonl", serialize_trace(TraceBuilder("a.com").cookie("u", "a.com", Phase::PostReject)));
    dir.write("bad.jsonl", "{\"kind\":\"meta\",\"trace_version\":1,\n");
    dir.write("ignored.txt", "not a trace");
    AuditConfig c;
    c.trace_dir = dir.str();
    c.pi_filter = false;
    auto out = run_audit(c);
    EXPECT_FALSE(out.fatal);
    std::vector<Record> errs;
    for (auto& r : error_records(out))
        if (r.kind == "error") errs.push_back(r);
    ASSERT_EQ(errs.size(), 1u) << out.files.at("errors.jsonl");
    EXPECT_EQ(errs[0].body.at("code"), "MalformedTrace");
    EXPECT_TRUE(errs[0].body.contains("byte_offset"));
    EXPECT_NE(out.files.at("cookies.csv").find(",a.com,u,a.com,/,undeclared,"), std::string::npos);
}

TEST(RunAudit, PiFilterOnlyShrinksTables) {
    auto on = config_for("corpus3");
    auto off = on;
    off.pi_filter = false;
    auto a = run_audit(on);
    auto b = run_audit(off);
    auto count_rows = [](const std::string& csv) {
        std::map<std::pair<std::string, std::string>, long> m;
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            auto p1 = line.find(','), p2 = line.find(',', p1 + 1), p3 = line.find(',', p2 + 1);
            if (p3 == p2 + 1) continue;  // any_violation carries no cookie count
            m[{line.substr(0, p1), line.substr(p1 + 1, p2 - p1 - 1)}] = std::stol(line.substr(p2 + 1, p3 - p2 - 1));
        }
        return m;
    };
    auto ra = count_rows(a.files.at("corpus.csv"));
    auto rb = count_rows(b.files.at("corpus.csv"));
    ASSERT_EQ(ra.size(), rb.size());
    for (const auto& [k, v] : ra) EXPECT_LE(v, rb.at(k)) << k.first << " " << k.second;
}

TEST(RegionDiff, SingleRegionFatalTwoRegionsSymmetric) {
    AuditConfig c = config_for("single_region");
    auto single = run_region_diff(c, load_corpus(c.trace_dir, c.merge_mode));
    EXPECT_TRUE(single.fatal);
    EXPECT_EQ(error_records(single)[0].body.at("code"), "SingleRegion");

    c = config_for("corpus3");
    auto out = run_region_diff(c, load_corpus(c.trace_dir, c.merge_mode));
    ASSERT_FALSE(out.fatal);
    EXPECT_TRUE(out.files.count("banner_matrix.csv"));
    EXPECT_TRUE(out.files.count("banner_histograms.csv"));
    EXPECT_NE(out.files.at("banner_histograms.csv").find("reject_all_present"), std::string::npos);
}

TEST(WriteOutputs, WritesEveryFile) {
    TempDir dir("write");
    AuditOutputs o;
    o.files = {{"a.txt", "A"}, {"b.csv", "x,y\n"}};
    write_outputs(o, (dir.path() / "nested").string());
    EXPECT_EQ(cookieaudit::testing::slurp((dir.path() / "nested" / "a.txt").string()), "A");
    EXPECT_EQ(cookieaudit::testing::slurp((dir.path() / "nested" / "b.csv").string()), "x,y\n");
}
