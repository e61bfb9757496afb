#include "cookieaudit/button_detector.hpp"

#include "cookieaudit/embedded_data.hpp"
#include "cookieaudit/error.hpp"
#include "cookieaudit/html.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cookieaudit {

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() > 3 && cur.back() == 's' && cur[cur.size() - 2] != 's') cur.pop_back();
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (!std::isalnum(c)) {
            flush();
            continue;
        }
        if (i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1]))) {
            const auto p = static_cast<unsigned char>(text[i - 1]);
            const bool lower_to_upper = std::islower(p) && std::isupper(c);
            const bool acronym_end = std::isupper(p) && std::isupper(c) && i + 1 < text.size() &&
                                     std::islower(static_cast<unsigned char>(text[i + 1]));
            if (lower_to_upper || acronym_end) flush();
        }
        cur.push_back(static_cast<char>(std::tolower(c)));
    }
    flush();
    return out;
}

namespace {

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::vector<std::string> normalized_terms(const Record& rec) {
    std::vector<std::string> out;
    const auto& terms = require_field(rec, "terms");
    if (!terms.is_array()) throw audit_error(errc::schema_violation, "'terms' must be an array");
    for (const auto& t : terms) {
        if (!t.is_string()) throw audit_error(errc::schema_violation, "vocabulary terms must be strings");
        auto n = join(tokenize(t.get<std::string>()));
        if (!n.empty() && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

Vocabulary Vocabulary::parse(std::string_view document) {
    Vocabulary v;
    for (const auto& rec : read_records(document)) {
        if (rec.kind == "vocab_meta") {
            v.version = static_cast<int>(require_int(rec, "version"));
            v.token_threshold = static_cast<int>(require_int(rec, "token_threshold"));
        } else if (rec.kind == "vocab_unigrams") {
            v.unigrams = normalized_terms(rec);
        } else if (rec.kind == "vocab_bigrams") {
            v.bigrams = normalized_terms(rec);
        } else if (rec.kind == "vocab_keywords") {
            v.keywords = normalized_terms(rec);
        } else if (rec.kind == "vocab_api") {
            for (const auto& t : require_field(rec, "terms")) v.api_terms.push_back(lower(t.get<std::string>()));
        } else {
            throw audit_error(errc::schema_violation, "unknown record kind '" + rec.kind + "' in vocabulary");
        }
    }
    return v;
}

const Vocabulary& Vocabulary::bundled() {
    static const Vocabulary v = parse(embedded::button_vocab());
    return v;
}

nlohmann::ordered_json Vocabulary::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["token_threshold"] = token_threshold;
    j["unigrams"] = unigrams;
    j["bigrams"] = bigrams;
    j["keywords"] = keywords;
    j["api_terms"] = api_terms;
    return j;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    Vocabulary v;
    try {
        v.version = j.at("version").get<int>();
        v.token_threshold = j.at("token_threshold").get<int>();
        v.unigrams = j.at("unigrams").get<std::vector<std::string>>();
        v.bigrams = j.at("bigrams").get<std::vector<std::string>>();
        v.keywords = j.at("keywords").get<std::vector<std::string>>();
        v.api_terms = j.at("api_terms").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw audit_error(errc::schema_violation, std::string("vocabulary: ") + e.what());
    }
    return v;
}

std::string Vocabulary::hash() const { return fnv1a64_hex(to_json().dump()); }

std::string CandidateElement::attribute(std::string_view name) const {
    auto it = attributes.find(std::string(name));
    return it == attributes.end() ? std::string{} : it->second;
}

namespace {

constexpr std::array<std::string_view, 5> kKeptAttributes{"aria-label", "class", "id", "href", "onclick"};
constexpr std::array<std::string_view, 5> kSkippedSubtrees{"head", "script", "style", "template", "noscript"};

bool zero_size(const std::string& style, std::string_view prop) {
    const std::string needle = std::string(prop) + ":0";
    for (std::size_t at = style.find(needle); at != std::string::npos; at = style.find(needle, at + 1)) {
        if (at > 0 && style[at - 1] != ';') continue;
        const std::size_t after = at + needle.size();
        if (after >= style.size() || (!std::isdigit(static_cast<unsigned char>(style[after])) && style[after] != '.')) {
            return true;
        }
    }
    return false;
}

bool hidden_here(const html::Node& n) {
    if (n.attribute("hidden")) return true;
    if (const auto* a = n.attribute("aria-hidden"); a && lower(*a) == "true") return true;
    if (const auto* s = n.attribute("style")) {
        std::string style;
        for (char c : lower(*s)) {
            if (!std::isspace(static_cast<unsigned char>(c))) style += c;
        }
        if (style.find("display:none") != std::string::npos || style.find("visibility:hidden") != std::string::npos ||
            zero_size(style, "width") || zero_size(style, "height")) {
            return true;
        }
    }
    return false;
}

void walk(const html::Node& n, const std::string& frame, std::vector<CandidateElement>& out) {
    if (!n.is_element()) return;
    if (std::find(kSkippedSubtrees.begin(), kSkippedSubtrees.end(), n.tag) != kSkippedSubtrees.end()) return;
    if (n.parent && hidden_here(n)) return;
    const bool leaf = !n.has_element_children();
    const bool wanted = n.tag == "a" || n.tag == "button" || n.tag == "span" || (n.tag == "div" && leaf);
    if (wanted) {
        CandidateElement c;
        c.tag = n.tag;
        for (auto name : kKeptAttributes) {
            if (const auto* v = n.attribute(name)) c.attributes.emplace(name, *v);
        }
        c.inner_text = html::inner_text(n);
        c.is_leaf = leaf;
        c.visible = true;
        c.locator = "#" + frame + html::element_path(n);
        out.push_back(std::move(c));
    }
    for (const auto& child : n.children) walk(*child, frame, out);
}

}  // namespace

std::vector<CandidateElement> extract_candidates(std::string_view page, const std::vector<FrameDocument>& frames) {
    std::vector<CandidateElement> out;
    auto doc = html::parse(page);
    walk(doc.root, std::string(kMainFrame), out);
    for (const auto& f : frames) {
        auto fdoc = html::parse(f.html);
        walk(fdoc.root, f.name, out);
    }
    return out;
}

const std::array<std::string_view, kFeatureCount>& feature_names() {
    static const std::array<std::string_view, kFeatureCount> names{
        "aria_label_unigrams", "aria_label_bigrams", "aria_label_keywords", "class_unigrams", "class_bigrams",
        "class_keywords",      "id_unigrams",        "id_bigrams",          "id_keywords",    "text_unigrams",
        "text_bigrams",        "text_keywords",      "aria_label_long",     "text_long",      "api_class_id",
        "api_href",            "api_onclick"};
    return names;
}

namespace {

double count_terms(const std::vector<std::string>& tokens, const std::vector<std::string>& terms) {
    double n = 0;
    for (const auto& term : terms) {
        const auto parts = tokenize(term);
        if (parts.empty() || parts.size() > tokens.size()) continue;
        for (std::size_t i = 0; i + parts.size() <= tokens.size(); ++i) {
            if (std::equal(parts.begin(), parts.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) n += 1;
        }
    }
    return n;
}

bool has_api(const std::string& text, const Vocabulary& vocab) {
    const auto l = lower(text);
    return std::any_of(vocab.api_terms.begin(), vocab.api_terms.end(),
                       [&](const std::string& t) { return !t.empty() && l.find(t) != std::string::npos; });
}

}  // namespace

FeatureVector featurize(const CandidateElement& c, const Vocabulary& vocab) {
    FeatureVector f{};
    const std::array<std::string, 4> sources{c.attribute("aria-label"), c.attribute("class"), c.attribute("id"),
                                             c.inner_text};
    std::array<std::size_t, 4> token_counts{};
    for (std::size_t a = 0; a < sources.size(); ++a) {
        const auto tokens = tokenize(sources[a]);
        token_counts[a] = tokens.size();
        f[a * 3 + 0] = count_terms(tokens, vocab.unigrams);
        f[a * 3 + 1] = count_terms(tokens, vocab.bigrams);
        f[a * 3 + 2] = count_terms(tokens, vocab.keywords);
    }
    const auto nt = static_cast<std::size_t>(std::max(vocab.token_threshold, 0));
    f[12] = token_counts[0] > nt ? 1 : 0;
    f[13] = token_counts[3] > nt ? 1 : 0;
    f[14] = has_api(c.attribute("class"), vocab) || has_api(c.attribute("id"), vocab) ? 1 : 0;
    f[15] = has_api(c.attribute("href"), vocab) ? 1 : 0;
    f[16] = has_api(c.attribute("onclick"), vocab) ? 1 : 0;
    return f;
}

double ButtonModel::predict(const CandidateElement& candidate) const {
    const auto f = featurize(candidate, vocab);
    return forest.predict_proba(f);
}

std::string ButtonModel::serialize() const {
    nlohmann::ordered_json j;
    j["format"] = "cookieaudit-button-forest";
    j["version"] = 1;
    j["feature_count"] = kFeatureCount;
    j["feature_names"] = nlohmann::ordered_json::array();
    for (auto n : feature_names()) j["feature_names"].push_back(n);
    j["vocabulary"] = vocab.to_json();
    j["vocabulary_hash"] = vocab.hash();
    j["forest"] = forest.to_json();
    return j.dump() + "\n";
}

ButtonModel ButtonModel::deserialize(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw audit_error(errc::schema_violation, std::string("model file: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    ButtonModel m;
    try {
        if (j.at("format").get<std::string>() != "cookieaudit-button-forest" || j.at("version").get<int>() != 1) {
            throw audit_error(errc::schema_violation, "not a version 1 button model");
        }
        if (j.at("feature_count").get<std::size_t>() != kFeatureCount) {
            throw audit_error(errc::schema_violation, "model expects a different feature count");
        }
        m.vocab = Vocabulary::from_json(j.at("vocabulary"));
        if (m.vocab.hash() != j.at("vocabulary_hash").get<std::string>()) {
            throw audit_error(errc::schema_violation, "vocabulary hash mismatch");
        }
        m.forest = RandomForest::from_json(j.at("forest"));
    } catch (const nlohmann::json::exception& e) {
        throw audit_error(errc::schema_violation, std::string("model file: ") + e.what());
    }
    if (m.forest.n_features() != kFeatureCount) throw audit_error(errc::schema_violation, "forest feature count mismatch");
    return m;
}

ButtonModel ButtonModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw audit_error(errc::io_error, "cannot open model file '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return deserialize(s.str());
}

std::string ButtonModel::hash() const { return fnv1a64_hex(serialize()); }

ButtonModel train_button_model(const std::vector<LabeledCandidate>& data, const ForestParams& params,
                               const Vocabulary& vocab) {
    std::vector<std::vector<double>> x;
    std::vector<bool> y;
    x.reserve(data.size());
    for (const auto& d : data) {
        const auto f = featurize(d.candidate, vocab);
        x.emplace_back(f.begin(), f.end());
        y.push_back(d.label);
    }
    ButtonModel m;
    m.vocab = vocab;
    m.forest = RandomForest::train(x, y, params);
    return m;
}

std::vector<std::size_t> rank_order(const std::vector<double>& probabilities) {
    std::vector<std::size_t> idx(probabilities.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return probabilities[a] > probabilities[b]; });
    return idx;
}

std::vector<RankedCandidate> rank(const std::vector<CandidateElement>& candidates, const ButtonModel& model) {
    std::vector<double> p;
    p.reserve(candidates.size());
    for (const auto& c : candidates) p.push_back(model.predict(c));
    std::vector<RankedCandidate> out;
    out.reserve(candidates.size());
    for (auto i : rank_order(p)) out.push_back({candidates[i], p[i]});
    return out;
}

std::vector<EvalPage> group_pages(const std::vector<LabeledCandidate>& data) {
    std::vector<EvalPage> pages;
    std::map<std::string, std::size_t> index;
    for (const auto& d : data) {
        auto [it, inserted] = index.emplace(d.page, pages.size());
        if (inserted) pages.push_back(EvalPage{d.page, {}, {}});
        auto& page = pages[it->second];
        page.candidates.push_back(d.candidate);
        if (d.label) page.gold.insert(d.candidate.locator);
    }
    return pages;
}

std::vector<LabeledCandidate> flatten_pages(const std::vector<EvalPage>& pages) {
    std::vector<LabeledCandidate> out;
    for (const auto& p : pages) {
        for (const auto& c : p.candidates) out.push_back({p.page, c, p.gold.contains(c.locator)});
    }
    return out;
}

double recall_at_k(const std::vector<std::vector<bool>>& ranked_relevance, std::size_t k) {
    if (ranked_relevance.empty()) throw audit_error(errc::empty_eval_set, "no evaluation pages");
    std::size_t hits = 0;
    for (const auto& page : ranked_relevance) {
        const auto end = page.begin() + static_cast<std::ptrdiff_t>(std::min(k, page.size()));
        if (std::find(page.begin(), end, true) != end) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(ranked_relevance.size());
}

double recall_at_k(const std::vector<EvalPage>& pages, const ButtonModel& model, std::size_t k) {
    std::vector<std::vector<bool>> rel;
    for (const auto& p : pages) {
        if (p.gold.empty()) continue;
        std::vector<bool> r;
        for (const auto& rc : rank(p.candidates, model)) r.push_back(p.gold.contains(rc.candidate.locator));
        rel.push_back(std::move(r));
    }
    return recall_at_k(rel, k);
}

CrossValidation cross_validate(const std::vector<EvalPage>& pages, int folds, const ForestParams& params,
                               const std::vector<std::size_t>& ks, const Vocabulary& vocab) {
    if (folds < 2) throw audit_error(errc::usage_error, "cross-validation needs at least 2 folds");
    if (pages.size() < static_cast<std::size_t>(folds)) {
        throw audit_error(errc::empty_eval_set, "fewer pages than folds");
    }
    std::vector<std::size_t> order(pages.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(params.seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[bounded_random(rng, i)]);

    CrossValidation cv;
    cv.ks = ks;
    cv.mean.assign(ks.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        std::vector<EvalPage> train_pages, test_pages;
        for (std::size_t i = 0; i < order.size(); ++i) {
            (static_cast<int>(i % static_cast<std::size_t>(folds)) == f ? test_pages : train_pages).push_back(pages[order[i]]);
        }
        ForestParams p = params;
        p.seed = params.seed + static_cast<std::uint64_t>(f);
        const auto model = train_button_model(flatten_pages(train_pages), p, vocab);
        std::vector<double> row;
        for (auto k : ks) row.push_back(recall_at_k(test_pages, model, k));
        for (std::size_t i = 0; i < ks.size(); ++i) cv.mean[i] += row[i] / folds;
        cv.fold_recall.push_back(std::move(row));
    }
    return cv;
}

EvalPage label_page(const std::string& page, std::string_view html, const std::vector<FrameDocument>& frames,
                    const std::set<std::string>& gold) {
    EvalPage out{page, extract_candidates(html, frames), {}};
    for (const auto& g : gold) {
        const bool found = std::any_of(out.candidates.begin(), out.candidates.end(),
                                       [&](const CandidateElement& c) { return c.locator == g; });
        if (!found) throw audit_error(errc::invariant_violation, "page " + page + ": gold locator " + g + " is not a candidate");
        out.gold.insert(g);
    }
    return out;
}

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw audit_error(errc::io_error, "cannot open '" + p.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

std::vector<EvalPage> load_page_manifest(const std::string& path) {
    const auto base = std::filesystem::path(path).parent_path();
    std::vector<EvalPage> pages;
    for (const auto& rec : read_record_file(path)) {
        if (rec.kind != "page") {
            throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": expected page, got " + rec.kind);
        }
        const auto page = require_string(rec, "page");
        const auto html = slurp(base / require_string(rec, "html"));
        std::vector<FrameDocument> frames;
        if (rec.body.contains("frames")) {
            const auto& f = rec.body.at("frames");
            if (!f.is_object()) throw audit_error(errc::schema_violation, "'frames' must be an object");
            for (auto it = f.begin(); it != f.end(); ++it) {
                if (!it.value().is_string()) throw audit_error(errc::schema_violation, "frame paths must be strings");
                frames.push_back({it.key(), slurp(base / it.value().get<std::string>())});
            }
        }
        std::set<std::string> gold;
        if (rec.body.contains("gold")) {
            const auto& g = rec.body.at("gold");
            if (!g.is_array()) throw audit_error(errc::schema_violation, "'gold' must be an array");
            for (const auto& v : g) {
                if (!v.is_string()) throw audit_error(errc::schema_violation, "gold locators must be strings");
                gold.insert(v.get<std::string>());
            }
        }
        pages.push_back(label_page(page, html, frames, gold));
    }
    return pages;
}

nlohmann::ordered_json button_label_record(const LabeledCandidate& c) {
    nlohmann::ordered_json j;
    j["kind"] = "button_label";
    j["page"] = c.page;
    j["locator"] = c.candidate.locator;
    j["tag"] = c.candidate.tag;
    j["attributes"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.candidate.attributes) j["attributes"][k] = v;
    j["inner_text"] = c.candidate.inner_text;
    j["is_leaf"] = c.candidate.is_leaf;
    j["label"] = c.label;
    return j;
}

LabeledCandidate parse_button_label(const Record& rec) {
    if (rec.kind != "button_label") {
        throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": expected button_label, got " + rec.kind);
    }
    LabeledCandidate c;
    c.page = require_string(rec, "page");
    c.candidate.locator = require_string(rec, "locator");
    c.candidate.tag = require_string(rec, "tag");
    if (c.candidate.tag != "a" && c.candidate.tag != "button" && c.candidate.tag != "div" && c.candidate.tag != "span") {
        throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": unsupported tag " + c.candidate.tag);
    }
    if (rec.body.contains("attributes")) {
        const auto& attrs = rec.body.at("attributes");
        if (!attrs.is_object()) throw audit_error(errc::schema_violation, "'attributes' must be an object");
        for (auto it = attrs.begin(); it != attrs.end(); ++it) {
            if (!it.value().is_string()) throw audit_error(errc::schema_violation, "attribute values must be strings");
            if (std::find(kKeptAttributes.begin(), kKeptAttributes.end(), it.key()) != kKeptAttributes.end()) {
                c.candidate.attributes.emplace(it.key(), it.value().get<std::string>());
            }
        }
    }
    c.candidate.inner_text = optional_string(rec, "inner_text");
    c.candidate.is_leaf = rec.body.contains("is_leaf") ? require_bool(rec, "is_leaf") : true;
    c.label = require_bool(rec, "label");
    return c;
}

std::vector<LabeledCandidate> read_button_labels(std::string_view document) {
    std::vector<LabeledCandidate> out;
    for (const auto& rec : read_records(document)) out.push_back(parse_button_label(rec));
    return out;
}

}  // namespace cookieaudit
