#include "cookieaudit/button_detector.hpp"
#include "cookieaudit/error.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace cookieaudit;
using cookieaudit::testing::fixture;
using cookieaudit::testing::slurp;

namespace {

constexpr std::size_t kTextKeywords = 11;
constexpr std::size_t kTextLong = 13;
constexpr std::size_t kApiClassId = 14;
constexpr std::size_t kApiOnclick = 16;

CandidateElement text_candidate(std::string text) {
    CandidateElement c;
    c.tag = "button";
    c.inner_text = std::move(text);
    return c;
}

std::vector<LabeledCandidate> small_training_set() {
    std::vector<LabeledCandidate> out;
    const char* pos[] = {"Cookie Settings", "Manage cookies", "Cookie preferences", "Change consent", "Manage preferences"};
    const char* neg[] = {"Home", "About us", "Contact", "Shop now", "Blog", "Careers", "Log in"};
    int page = 0;
    for (auto* p : pos) {
        std::string id = "p" + std::to_string(page++);
        out.push_back({id, text_candidate(p), true});
        for (auto* n : neg) out.push_back({id, text_candidate(n), false});
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].candidate.locator = "#main/x[" + std::to_string(i + 1) + "]";
    return out;
}

}  // namespace

TEST(ExtractCandidates, SingleOneTrustButton) {
    auto c = extract_candidates(R"(<html><body><button id="onetrust-pc-btn-handler">Cookie Settings</button></body></html>)");
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].tag, "button");
    EXPECT_EQ(c[0].attribute("id"), "onetrust-pc-btn-handler");
    EXPECT_EQ(c[0].inner_text, "Cookie Settings");
    EXPECT_EQ(c[0].locator, "#main/html[1]/body[1]/button[1]");
}

TEST(ExtractCandidates, LeafDivsOnlyAndEmptyPage) {
    auto c = extract_candidates("<div><div>x</div></div>");
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].locator, "#main/div[1]/div[1]");
    EXPECT_TRUE(extract_candidates("").empty());
    for (const auto& cand : extract_candidates("<div><span>a</span><a href=#>b</a></div><div>leaf</div>")) {
        if (cand.tag == "div") EXPECT_TRUE(cand.is_leaf);
    }
}

TEST(ExtractCandidates, HiddenElementsSkipped) {
    const char* html = R"(<div style="display: none"><button>A</button></div>
<button hidden>B</button><button aria-hidden="true">C</button><span style="visibility:hidden">D</span>
<a style="width:0px">E</a><button>F</button>)";
    auto c = extract_candidates(html);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].inner_text, "F");
}

TEST(ExtractCandidates, FramesFollowMainDocument) {
    auto c = extract_candidates("<a href='/'>Home</a>", {{"cmp", "<button>Reject</button>"}});
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0].locator.rfind("#main/", 0), 0u);
    EXPECT_EQ(c[1].locator, "#cmp/button[1]");
}

TEST(Featurize, Examples) {
    auto f = featurize(text_candidate("Cookie Settings"));
    EXPECT_GE(f[kTextKeywords], 1.0);
    EXPECT_EQ(f[kTextLong], 0.0);

    std::string para = "We and our partners use cookie technology to personalise content and ads and to analyse our "
                       "traffic across this website";
    auto g = featurize(text_candidate(para));
    EXPECT_EQ(g[kTextLong], 1.0);

    CandidateElement empty;
    empty.tag = "span";
    auto z = featurize(empty);
    EXPECT_TRUE(std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; }));

    CandidateElement api;
    api.tag = "a";
    api.attributes = {{"class", "optanon-show-settings"}, {"onclick", "Cookiebot.renew()"}};
    auto a = featurize(api);
    EXPECT_EQ(a[kApiClassId], 1.0);
    EXPECT_EQ(a[kApiOnclick], 1.0);
    EXPECT_EQ(feature_names().size(), kFeatureCount);
}

TEST(Tokenize, CamelAndPlural) {
    EXPECT_EQ(tokenize("manageCookies"), (std::vector<std::string>{"manage", "cookie"}));
    EXPECT_EQ(tokenize("Cookie-Settings!"), (std::vector<std::string>{"cookie", "setting"}));
    EXPECT_EQ(tokenize("yes"), (std::vector<std::string>{"yes"}));
}

TEST(Rank, OrderAndTies) {
    EXPECT_EQ(rank_order({0.2, 0.9, 0.2, 0.5}), (std::vector<std::size_t>{1, 3, 0, 2}));
    auto data = small_training_set();
    auto model = train_button_model(data, {.trees = 20, .seed = 4});
    auto single = rank({text_candidate("Home")}, model);
    EXPECT_EQ(single.size(), 1u);

    std::vector<CandidateElement> page{text_candidate("Home"), text_candidate("Blog"), text_candidate("Manage cookies"),
                                       text_candidate("Contact")};
    auto ranked = rank(page, model);
    ASSERT_EQ(ranked.size(), page.size());
    EXPECT_EQ(ranked[0].candidate.inner_text, "Manage cookies");
    for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_GE(ranked[i - 1].probability, ranked[i].probability);
}

TEST(RecallAtK, Examples) {
    std::vector<std::vector<bool>> first(10, {true, false, false});
    EXPECT_EQ(recall_at_k(first, 1), 1.0);
    std::vector<std::vector<bool>> fourth(10, {false, false, false, true, false});
    EXPECT_EQ(recall_at_k(fourth, 3), 0.0);
    EXPECT_EQ(recall_at_k(fourth, 5), 1.0);
    try {
        recall_at_k(std::vector<std::vector<bool>>{}, 1);
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::empty_eval_set);
    }
}

TEST(ButtonModel, DeterministicAndSerializable) {
    auto data = small_training_set();
    auto a = train_button_model(data, {.trees = 10, .seed = 3});
    auto b = train_button_model(data, {.trees = 10, .seed = 3});
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    auto back = ButtonModel::deserialize(a.serialize());
    EXPECT_EQ(back.serialize(), a.serialize());
    for (const auto& d : data) EXPECT_DOUBLE_EQ(back.predict(d.candidate), a.predict(d.candidate));

    auto degenerate = data;
    for (auto& d : degenerate) d.label = false;
    EXPECT_THROW(train_button_model(degenerate, {.trees = 3}), audit_error);
}

TEST(ButtonModel, VocabularyHashChecked) {
    auto text = train_button_model(small_training_set(), {.trees = 2, .seed = 1}).serialize();
    auto j = nlohmann::json::parse(text);
    j["vocabulary"]["unigrams"].push_back("zzz");
    try {
        ButtonModel::deserialize(j.dump());
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::schema_violation);
    }
}

TEST(ButtonModel, FixtureModelLoads) {
    auto m = ButtonModel::load(fixture("interfaces/button_model.json"));
    EXPECT_EQ(m.forest.tree_count(), 5u);
    EXPECT_EQ(m.hash(), fnv1a64_hex(m.serialize()));
    EXPECT_EQ(m.vocab, Vocabulary::bundled());
}

TEST(Labels, RecordRoundTrip) {
    auto data = small_training_set();
    std::string doc;
    for (const auto& d : data) doc += button_label_record(d).dump() + "\n";
    auto back = read_button_labels(doc);
    ASSERT_EQ(back.size(), data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        EXPECT_EQ(back[i].candidate, data[i].candidate);
        EXPECT_EQ(back[i].label, data[i].label);
    }
    auto pages = group_pages(back);
    EXPECT_EQ(pages.size(), 5u);
    EXPECT_EQ(pages[0].gold.size(), 1u);
    EXPECT_EQ(flatten_pages(pages).size(), data.size());
}

TEST(Labels, LabelPageRejectsUnknownGold) {
    EXPECT_THROW(label_page("p", "<button>x</button>", {}, {"#main/button[9]"}), audit_error);
    auto p = label_page("p", "<button>x</button>", {}, {"#main/button[1]"});
    EXPECT_EQ(p.gold.size(), 1u);
}

TEST(Labels, FixtureLabelsMatchManifest) {
    auto from_labels = group_pages(read_button_labels(slurp(fixture("buttons/labels.jsonl"))));
    auto from_manifest = load_page_manifest(fixture("buttons/manifest.jsonl"));
    ASSERT_EQ(from_labels.size(), from_manifest.size());
    for (std::size_t i = 0; i < from_labels.size(); ++i) {
        EXPECT_EQ(from_labels[i].page, from_manifest[i].page);
        EXPECT_EQ(from_labels[i].gold, from_manifest[i].gold);
        EXPECT_EQ(from_labels[i].candidates, from_manifest[i].candidates);
    }
}

TEST(CrossValidate, Shape) {
    auto data = small_training_set();
    auto pages = group_pages(data);
    auto cv = cross_validate(pages, 5, {.trees = 5, .seed = 2});
    EXPECT_EQ(cv.ks, (std::vector<std::size_t>{1, 3, 5, 10}));
    EXPECT_EQ(cv.fold_recall.size(), 5u);
    for (const auto& fold : cv.fold_recall)
        for (std::size_t i = 1; i < fold.size(); ++i) EXPECT_GE(fold[i], fold[i - 1]);
    try {
        cross_validate(pages, 1, {});
        FAIL();
    } catch (const audit_error& e) {
        EXPECT_EQ(e.code(), errc::usage_error);
    }
}
