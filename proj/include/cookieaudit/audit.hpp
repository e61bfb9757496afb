#pragma once

#include "cookieaudit/error.hpp"
#include "cookieaudit/pi_detector.hpp"
#include "cookieaudit/region_analysis.hpp"
#include "cookieaudit/stats.hpp"
#include "cookieaudit/trace_model.hpp"
#include "cookieaudit/violation_classifier.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

struct AuditConfig {
    std::string trace_dir;
    std::string baseline_region{kDefaultBaselineRegion};
    /// Per-site values fed to deltas and tests. The corpus table always
    /// uses the union over iterations.
    MergeMode merge_mode{MergeMode::Mean};
    bool pi_filter{true};
    double entropy_threshold{kDefaultEntropyThreshold};
    int top_k{5};
    std::string output_dir{"audit-out"};
    std::string purpose_db;  // optional path
    stats::LeveneCenter levene_center{stats::LeveneCenter::Mean};
    bool tie_correction{true};
};

/// Throws usage_error naming the offending field.
void validate_config(const AuditConfig& config);

/// Applies a JSON config file's members onto `config`. Unknown members are a
/// usage_error; so are ill-typed values.
void apply_config_file(AuditConfig& config, const std::string& path);
void apply_config_json(AuditConfig& config, std::string_view json_text);

/// A problem tied to one input file; the run continues.
struct FileError {
    std::string file;
    errc code{errc::malformed_trace};
    std::string message;
    std::optional<std::size_t> byte_offset;
};

struct LoadedCorpus {
    std::size_t trace_files{0};
    std::vector<MergedAudit> audits;  // sorted by (region, site)
    std::vector<FileError> errors;
};

/// Files ending in .jsonl or .trace directly under `dir`, in path order.
std::vector<std::string> list_trace_files(const std::string& dir);
/// Parses every trace file and merges iterations per (site, region).
/// Throws io_error when `dir` is not a readable directory.
LoadedCorpus load_corpus(const std::string& dir, MergeMode mode);

/// Everything an audit run produces, keyed by output file name. Contents
/// are deterministic functions of (inputs, config).
struct AuditOutputs {
    std::map<std::string, std::string> files;
    bool fatal{false};
    std::vector<std::string> diagnostics;
};

/// Runs classification, PI labeling, region analysis and statistics over
/// `corpus`. Never throws for data problems; they become diagnostics or
/// fatal errors recorded in errors.jsonl.
AuditOutputs run_audit(const AuditConfig& config, const LoadedCorpus& corpus);
/// load_corpus + run_audit; a missing or empty directory is fatal (NoTraces).
AuditOutputs run_audit(const AuditConfig& config);

/// Pairwise banner matrix and parameter histograms. Fatal SingleRegion when
/// the corpus spans fewer than two regions.
AuditOutputs run_region_diff(const AuditConfig& config, const LoadedCorpus& corpus);

/// Writes each output under `dir`, creating it. Throws io_error.
void write_outputs(const AuditOutputs& outputs, const std::string& dir);

/// Outcome legend: name, definition and set-membership formula.
std::string outcome_legend();

std::string csv_escape(std::string_view field);
/// "%.10g", with "nan"/"inf" spelled out.
std::string format_number(double v);

}  // namespace cookieaudit
