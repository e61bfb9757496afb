// cookieaudit command-line entry point.
#include "cookieaudit/audit.hpp"
#include "cookieaudit/button_detector.hpp"
#include "cookieaudit/record_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cookieaudit;

namespace {

constexpr int kExitFatal = 1;
constexpr int kExitUsage = 2;

bool verbose() {
    const char* v = std::getenv("COOKIEAUDIT_VERBOSE");
    return v && *v && std::string_view(v) != "0";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw audit_error(errc::io_error, "cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Flags are captured into raw storage; anything given on the command line
// overrides the config file, which overrides the defaults.
struct ConfigFlags {
    std::string config_file;
    std::string trace_dir, baseline, merge_mode, output_dir, purpose_db, levene_center;
    bool pi_filter{true};
    bool tie_correction{true};
    double entropy_threshold{};
    int top_k{};
    CLI::App* app{};

    void add_to(CLI::App* cmd, bool with_output) {
        app = cmd;
        cmd->add_option("--config", config_file, "JSON config file");
        cmd->add_option("traces,--traces", trace_dir, "directory of trace files");
        cmd->add_option("--baseline", baseline, "baseline region (default EU)");
        cmd->add_option("--merge-mode", merge_mode, "per-site merge of iterations: mean or union")
            ->check(CLI::IsMember({"mean", "union"}));
        cmd->add_flag("--pi-filter,!--no-pi-filter", pi_filter, "only report cookies likely to carry personal information");
        cmd->add_option("--entropy-threshold", entropy_threshold, "bits above which a value counts as high entropy");
        cmd->add_option("--top-k", top_k, "candidate buttons to try");
        cmd->add_option("--levene-center", levene_center, "mean or median")->check(CLI::IsMember({"mean", "median"}));
        cmd->add_flag("--tie-correction,!--no-tie-correction", tie_correction, "Kruskal-Wallis tie correction");
        cmd->add_option("--purpose-db", purpose_db, "purpose database file");
        if (with_output) cmd->add_option("-o,--out", output_dir, "output directory");
    }

    bool given(const char* name) const { return app->count(name) > 0; }

    AuditConfig resolve() const {
        AuditConfig c;
        if (!config_file.empty()) apply_config_file(c, config_file);
        if (given("traces")) c.trace_dir = trace_dir;
        if (given("--baseline")) c.baseline_region = baseline;
        if (given("--merge-mode")) c.merge_mode = *parse_merge_mode(merge_mode);
        if (given("--pi-filter") || given("--no-pi-filter")) c.pi_filter = pi_filter;
        if (given("--entropy-threshold")) c.entropy_threshold = entropy_threshold;
        if (given("--top-k")) c.top_k = top_k;
        if (given("--levene-center")) {
            c.levene_center = levene_center == "median" ? stats::LeveneCenter::Median : stats::LeveneCenter::Mean;
        }
        if (given("--tie-correction") || given("--no-tie-correction")) c.tie_correction = tie_correction;
        if (given("--purpose-db")) c.purpose_db = purpose_db;
        if (app->get_option_no_throw("--out") && given("--out")) c.output_dir = output_dir;
        if (c.trace_dir.empty()) throw audit_error(errc::usage_error, "no trace directory given");
        validate_config(c);
        return c;
    }
};

void print_diagnostics(const AuditOutputs& out) {
    for (const auto& d : out.diagnostics) std::cerr << "error: " << d << "\n";
    if (!verbose()) return;
    auto it = out.files.find("errors.jsonl");
    if (it != out.files.end()) std::cerr << it->second;
}

int cmd_audit(const ConfigFlags& flags) {
    const auto config = flags.resolve();
    const auto out = run_audit(config);
    print_diagnostics(out);
    write_outputs(out, config.output_dir);
    if (out.fatal) return kExitFatal;
    std::cout << "wrote " << out.files.size() << " files to " << config.output_dir << "\n";
    return 0;
}

int cmd_report(const ConfigFlags& flags) {
    const auto config = flags.resolve();
    const auto out = run_audit(config);
    print_diagnostics(out);
    if (out.fatal) return kExitFatal;
    std::cout << out.files.at("report.txt");
    return 0;
}

int cmd_diff_regions(const ConfigFlags& flags) {
    const auto config = flags.resolve();
    const auto out = run_region_diff(config, load_corpus(config.trace_dir, config.merge_mode));
    print_diagnostics(out);
    write_outputs(out, config.output_dir);
    if (out.fatal) return kExitFatal;
    std::cout << out.files.at("banner_matrix.csv");
    return 0;
}

struct TrainFlags {
    std::string labels, model_out;
    std::uint64_t seed{0};
    int folds{10};
    int trees{100};
};

int cmd_train_buttons(const TrainFlags& f) {
    if (f.folds < 2) throw audit_error(errc::usage_error, "--folds must be at least 2");
    if (f.trees < 1) throw audit_error(errc::usage_error, "--trees must be at least 1");
    const auto data = read_button_labels(slurp(f.labels));
    ForestParams params;
    params.trees = f.trees;
    params.seed = f.seed;

    // Fail on degenerate data before spending time on folds.
    const auto model = train_button_model(data, params);
    const auto cv = cross_validate(group_pages(data), f.folds, params);

    std::cout << "fold";
    for (auto k : cv.ks) std::cout << ",recall@" << k;
    std::cout << "\n";
    for (std::size_t i = 0; i < cv.fold_recall.size(); ++i) {
        std::cout << i + 1;
        for (double r : cv.fold_recall[i]) std::cout << "," << format_number(r);
        std::cout << "\n";
    }
    std::cout << "mean";
    for (double r : cv.mean) std::cout << "," << format_number(r);
    std::cout << "\n";

    const auto text = model.serialize();
    if (!f.model_out.empty()) {
        std::ofstream out(f.model_out, std::ios::binary | std::ios::trunc);
        if (!out || !(out << text)) throw audit_error(errc::io_error, "cannot write '" + f.model_out + "'");
    }
    std::cout << "model_hash," << model.hash() << "\n";
    return 0;
}

int cmd_label_buttons(const std::string& manifest, const std::string& out_path) {
    std::ostringstream out;
    for (const auto& c : flatten_pages(load_page_manifest(manifest))) write_record(out, button_label_record(c));
    if (out_path.empty() || out_path == "-") {
        std::cout << out.str();
    } else {
        std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << out.str())) throw audit_error(errc::io_error, "cannot write '" + out_path + "'");
    }
    return 0;
}

int cmd_rank_buttons(const std::string& model_path, const std::string& html_path,
                     const std::vector<std::string>& frame_args, int top_k) {
    if (top_k < 1) throw audit_error(errc::usage_error, "--top-k must be at least 1");
    const auto model = ButtonModel::load(model_path);
    std::vector<FrameDocument> frames;
    for (const auto& a : frame_args) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw audit_error(errc::usage_error, "--frame expects name=path, got " + a);
        frames.push_back({a.substr(0, eq), slurp(a.substr(eq + 1))});
    }
    const auto ranked = rank(extract_candidates(slurp(html_path), frames), model);
    const auto n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(top_k));
    for (std::size_t i = 0; i < n; ++i) {
        std::cout << i + 1 << "\t" << format_number(ranked[i].probability) << "\t" << ranked[i].candidate.locator << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offline cookie consent compliance audit"};
    app.require_subcommand(1);

    ConfigFlags audit_flags, report_flags, diff_flags;
    audit_flags.add_to(app.add_subcommand("audit", "classify a trace corpus and write all reports"), true);
    report_flags.add_to(app.add_subcommand("report", "print the text report for a trace corpus"), false);
    diff_flags.add_to(app.add_subcommand("diff-regions", "compare banner configurations across regions"), true);

    TrainFlags train;
    auto* train_cmd = app.add_subcommand("train-buttons", "cross-validate and train the banner button model");
    train_cmd->add_option("labels,--labels", train.labels, "labeled candidate file")->required();
    train_cmd->add_option("--seed", train.seed, "random seed");
    train_cmd->add_option("--folds", train.folds, "cross-validation folds");
    train_cmd->add_option("--trees", train.trees, "trees in the forest");
    train_cmd->add_option("-o,--model-out", train.model_out, "where to write the model file");

    std::string manifest, labels_out;
    auto* label_cmd = app.add_subcommand("label-buttons", "extract labeled candidates from a page manifest");
    label_cmd->add_option("manifest,--manifest", manifest, "page manifest")->required();
    label_cmd->add_option("-o,--out", labels_out, "output file (default stdout)");

    std::string model_path, html_path;
    std::vector<std::string> frames;
    int rank_k = 5;
    auto* rank_cmd = app.add_subcommand("rank-buttons", "rank the candidate buttons of a page");
    rank_cmd->add_option("--model", model_path, "model file")->required();
    rank_cmd->add_option("html,--html", html_path, "main frame HTML")->required();
    rank_cmd->add_option("--frame", frames, "additional frame as name=path");
    rank_cmd->add_option("--top-k", rank_k, "candidates to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        const auto* cmd = app.get_subcommands().front();
        const std::string name = cmd->get_name();
        if (name == "audit") return cmd_audit(audit_flags);
        if (name == "report") return cmd_report(report_flags);
        if (name == "diff-regions") return cmd_diff_regions(diff_flags);
        if (name == "train-buttons") return cmd_train_buttons(train);
        if (name == "label-buttons") return cmd_label_buttons(manifest, labels_out);
        if (name == "rank-buttons") return cmd_rank_buttons(model_path, html_path, frames, rank_k);
    } catch (const audit_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == errc::usage_error ? kExitUsage : kExitFatal;
    }
    return kExitUsage;
}
