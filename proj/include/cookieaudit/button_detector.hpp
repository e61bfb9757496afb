#pragma once

#include "cookieaudit/random_forest.hpp"
#include "cookieaudit/record_io.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

/// Terms used at featurization. Multi-word terms are stored as their
/// normalized token sequences joined by a single space.
struct Vocabulary {
    int version{1};
    int token_threshold{9};  // n_t
    std::vector<std::string> unigrams;
    std::vector<std::string> bigrams;
    std::vector<std::string> keywords;
    std::vector<std::string> api_terms;  // lowercase substrings

    static Vocabulary parse(std::string_view document);
    static const Vocabulary& bundled();

    nlohmann::ordered_json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);
    /// FNV-1a 64 of the canonical JSON, as 16 hex digits.
    std::string hash() const;

    bool operator==(const Vocabulary&) const = default;
};

/// Lowercase tokens split at non-alphanumerics and camelCase boundaries,
/// with a trailing plural "s" removed from tokens longer than three letters.
std::vector<std::string> tokenize(std::string_view text);

struct CandidateElement {
    std::string tag;  // a, button, div, span
    /// Only aria-label, class, id, href and onclick are kept.
    std::map<std::string, std::string> attributes;
    std::string inner_text;
    bool is_leaf{true};
    bool visible{true};
    /// "#<frame>/html[1]/body[1]/div[2]/button[1]"
    std::string locator;

    std::string attribute(std::string_view name) const;
    bool operator==(const CandidateElement&) const = default;
};

struct FrameDocument {
    std::string name;
    std::string html;
};

inline constexpr std::string_view kMainFrame = "main";

/// Visible a/button/span elements and visible leaf divs of the page and each
/// frame, in document order (main frame first). An element is hidden when it
/// or an ancestor carries `hidden`, aria-hidden="true", or an inline style
/// with display:none, visibility:hidden, or a zero width/height.
/// Throws parse_failure.
std::vector<CandidateElement> extract_candidates(std::string_view html, const std::vector<FrameDocument>& frames = {});

inline constexpr std::size_t kFeatureCount = 17;
using FeatureVector = std::array<double, kFeatureCount>;

/// Names in vector order: G1 (unigram, bigram, keyword counts for
/// aria-label, class, id, text), G2 (token count above n_t for aria-label,
/// text), G3 (consent API in class/id, href, onclick).
const std::array<std::string_view, kFeatureCount>& feature_names();

FeatureVector featurize(const CandidateElement& candidate, const Vocabulary& vocab = Vocabulary::bundled());

struct ButtonModel {
    Vocabulary vocab;
    RandomForest forest;

    double predict(const CandidateElement& candidate) const;

    std::string serialize() const;
    /// Throws schema_violation, including on a vocabulary hash mismatch.
    static ButtonModel deserialize(std::string_view text);
    static ButtonModel load(const std::string& path);
    /// FNV-1a 64 of serialize(), as 16 hex digits.
    std::string hash() const;
};

struct LabeledCandidate {
    std::string page;
    CandidateElement candidate;
    bool label{false};
};

/// Throws degenerate_data when all labels agree.
ButtonModel train_button_model(const std::vector<LabeledCandidate>& data, const ForestParams& params,
                               const Vocabulary& vocab = Vocabulary::bundled());

struct RankedCandidate {
    CandidateElement candidate;
    double probability{0};
};

/// Indices sorted by probability descending; equal probabilities keep input
/// order.
std::vector<std::size_t> rank_order(const std::vector<double>& probabilities);
/// Candidates are expected in document order.
std::vector<RankedCandidate> rank(const std::vector<CandidateElement>& candidates, const ButtonModel& model);

struct EvalPage {
    std::string page;
    std::vector<CandidateElement> candidates;  // document order
    std::set<std::string> gold;                // locators
};

/// Pages in order of first appearance.
std::vector<EvalPage> group_pages(const std::vector<LabeledCandidate>& data);
std::vector<LabeledCandidate> flatten_pages(const std::vector<EvalPage>& pages);

/// Each inner vector marks, in rank order, which candidates are gold.
/// Fraction of pages with a gold candidate in the first k. Throws
/// empty_eval_set.
double recall_at_k(const std::vector<std::vector<bool>>& ranked_relevance, std::size_t k);
/// Pages without gold are skipped. Throws empty_eval_set when none remain.
double recall_at_k(const std::vector<EvalPage>& pages, const ButtonModel& model, std::size_t k);

struct CrossValidation {
    std::vector<std::size_t> ks;
    std::vector<std::vector<double>> fold_recall;  // [fold][k index]
    std::vector<double> mean;                       // [k index]
};

/// Pages are shuffled with params.seed and dealt round-robin into folds;
/// fold f trains with seed params.seed + f. Throws usage_error for fewer
/// than two folds, empty_eval_set for a fold with no gold page.
CrossValidation cross_validate(const std::vector<EvalPage>& pages, int folds, const ForestParams& params,
                               const std::vector<std::size_t>& ks = {1, 3, 5, 10},
                               const Vocabulary& vocab = Vocabulary::bundled());

/// Labels the candidates of one page. Throws invariant_violation when a
/// gold locator matches no candidate.
EvalPage label_page(const std::string& page, std::string_view html, const std::vector<FrameDocument>& frames,
                    const std::set<std::string>& gold);

/// Page manifest: records of kind "page" with page, html (path), optional
/// frames {name: path} and gold [locator]. Paths are relative to the
/// manifest's directory.
std::vector<EvalPage> load_page_manifest(const std::string& path);

nlohmann::ordered_json button_label_record(const LabeledCandidate& c);
LabeledCandidate parse_button_label(const Record& rec);
std::vector<LabeledCandidate> read_button_labels(std::string_view document);

std::string fnv1a64_hex(std::string_view bytes);

}  // namespace cookieaudit
