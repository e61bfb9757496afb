#include "cookieaudit/random_forest.hpp"

#include "cookieaudit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cookieaudit {

std::uint64_t bounded_random(std::mt19937_64& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

namespace {

double gini(double pos, double total) {
    if (total <= 0) return 0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

std::uint64_t tree_seed(std::uint64_t seed, std::size_t tree) {
    // splitmix64 step keyed by tree index
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(tree) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Split {
    int feature{-1};
    double threshold{0};
    double impurity{0};
};

}  // namespace

RandomForest RandomForest::train(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                                 const ForestParams& params) {
    if (x.empty() || x.size() != y.size()) {
        throw audit_error(errc::degenerate_data, "training set is empty or labels do not match rows");
    }
    const std::size_t d = x.front().size();
    for (const auto& row : x) {
        if (row.size() != d) throw audit_error(errc::invariant_violation, "feature rows differ in length");
    }
    const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), true));
    if (positives == 0 || positives == y.size()) {
        throw audit_error(errc::degenerate_data, "training labels contain a single class");
    }
    if (params.trees < 1) throw audit_error(errc::invariant_violation, "forest needs at least one tree");
    if (d == 0) throw audit_error(errc::degenerate_data, "rows have no features");

    RandomForest forest;
    forest.params_ = params;
    forest.n_features_ = d;
    std::size_t mtry = params.max_features > 0 ? static_cast<std::size_t>(params.max_features)
                                               : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))));
    mtry = std::clamp<std::size_t>(mtry, 1, d);
    forest.params_.max_features = static_cast<int>(mtry);

    for (int t = 0; t < params.trees; ++t) {
        std::mt19937_64 rng(tree_seed(params.seed, static_cast<std::size_t>(t)));
        std::vector<std::size_t> sample(x.size());
        if (params.bootstrap) {
            for (auto& s : sample) s = bounded_random(rng, x.size());
        } else {
            std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        forest.trees_.push_back(grow(x, y, std::move(sample), mtry, rng));
    }
    return forest;
}

RandomForest::Tree RandomForest::grow(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                                      std::vector<std::size_t> sample, std::size_t max_features,
                                      std::mt19937_64& rng) {
    Tree tree;
    const std::size_t d = x.front().size();
    struct Pending {
        int node;
        std::vector<std::size_t> idx;
    };
    auto new_node = [&] {
        tree.feature.push_back(-1);
        tree.threshold.push_back(0);
        tree.left.push_back(-1);
        tree.right.push_back(-1);
        tree.value.push_back(0);
        return static_cast<int>(tree.feature.size() - 1);
    };
    std::vector<Pending> stack;
    stack.push_back({new_node(), std::move(sample)});
    std::vector<std::size_t> features(d);

    while (!stack.empty()) {
        Pending cur = std::move(stack.back());
        stack.pop_back();
        const auto& idx = cur.idx;
        const double n = static_cast<double>(idx.size());
        double pos = 0;
        for (auto i : idx) pos += y[i] ? 1 : 0;
        tree.value[static_cast<std::size_t>(cur.node)] = pos / n;
        if (pos == 0 || pos == n) continue;

        std::iota(features.begin(), features.end(), std::size_t{0});
        Split best;
        bool found = false;
        std::vector<std::size_t> order(idx);
        // Examine at least max_features features, more if none of them splits.
        for (std::size_t k = 0; k < d && (k < max_features || !found); ++k) {
            const std::size_t j = k + bounded_random(rng, d - k);
            std::swap(features[k], features[j]);
            const std::size_t f = features[k];
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a][f] < x[b][f]; });
            double left_pos = 0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                left_pos += y[order[i]] ? 1 : 0;
                const double lo = x[order[i]][f], hi = x[order[i + 1]][f];
                if (!(lo < hi)) continue;
                const double ln = static_cast<double>(i + 1), rn = n - ln;
                const double imp = (ln * gini(left_pos, ln) + rn * gini(pos - left_pos, rn)) / n;
                if (!found || imp < best.impurity) {
                    best = {static_cast<int>(f), lo + (hi - lo) / 2.0, imp};
                    found = true;
                }
            }
        }
        if (!found) continue;

        std::vector<std::size_t> left, right;
        for (auto i : idx) (x[i][static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right).push_back(i);
        const auto node = static_cast<std::size_t>(cur.node);
        tree.feature[node] = best.feature;
        tree.threshold[node] = best.threshold;
        const int l = new_node();
        const int r = new_node();
        tree.left[node] = l;
        tree.right[node] = r;
        stack.push_back({r, std::move(right)});
        stack.push_back({l, std::move(left)});
    }
    return tree;
}

double RandomForest::predict_proba(std::span<const double> x) const {
    if (x.size() != n_features_) {
        throw audit_error(errc::invariant_violation, "expected " + std::to_string(n_features_) + " features, got " +
                                                         std::to_string(x.size()));
    }
    double sum = 0;
    for (const auto& t : trees_) {
        std::size_t node = 0;
        while (t.feature[node] >= 0) {
            node = static_cast<std::size_t>(x[static_cast<std::size_t>(t.feature[node])] <= t.threshold[node] ? t.left[node]
                                                                                                            : t.right[node]);
        }
        sum += t.value[node];
    }
    return trees_.empty() ? 0.0 : sum / static_cast<double>(trees_.size());
}

std::size_t RandomForest::node_count() const {
    std::size_t n = 0;
    for (const auto& t : trees_) n += t.feature.size();
    return n;
}

nlohmann::ordered_json RandomForest::to_json() const {
    nlohmann::ordered_json j;
    j["trees"] = params_.trees;
    j["seed"] = params_.seed;
    j["max_features"] = params_.max_features;
    j["bootstrap"] = params_.bootstrap;
    j["criterion"] = "gini";
    j["n_features"] = n_features_;
    auto& arr = j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& t : trees_) {
        nlohmann::ordered_json tj;
        tj["feature"] = t.feature;
        tj["threshold"] = t.threshold;
        tj["left"] = t.left;
        tj["right"] = t.right;
        tj["value"] = t.value;
        arr.push_back(std::move(tj));
    }
    return j;
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
    RandomForest f;
    try {
        f.params_.trees = j.at("trees").get<int>();
        f.params_.seed = j.at("seed").get<std::uint64_t>();
        f.params_.max_features = j.at("max_features").get<int>();
        f.params_.bootstrap = j.at("bootstrap").get<bool>();
        if (j.at("criterion").get<std::string>() != "gini") {
            throw audit_error(errc::schema_violation, "unsupported split criterion");
        }
        f.n_features_ = j.at("n_features").get<std::size_t>();
        for (const auto& tj : j.at("nodes")) {
            Tree t;
            t.feature = tj.at("feature").get<std::vector<int>>();
            t.threshold = tj.at("threshold").get<std::vector<double>>();
            t.left = tj.at("left").get<std::vector<int>>();
            t.right = tj.at("right").get<std::vector<int>>();
            t.value = tj.at("value").get<std::vector<double>>();
            const auto n = t.feature.size();
            if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.value.size() != n) {
                throw audit_error(errc::schema_violation, "tree arrays differ in length");
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (t.feature[i] < 0) continue;
                if (static_cast<std::size_t>(t.feature[i]) >= f.n_features_ || t.left[i] <= static_cast<int>(i) ||
                    t.right[i] <= static_cast<int>(i) || static_cast<std::size_t>(t.left[i]) >= n ||
                    static_cast<std::size_t>(t.right[i]) >= n) {
                    throw audit_error(errc::schema_violation, "tree node " + std::to_string(i) + " is malformed");
                }
            }
            f.trees_.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw audit_error(errc::schema_violation, std::string("forest: ") + e.what());
    }
    if (f.trees_.size() != static_cast<std::size_t>(f.params_.trees)) {
        throw audit_error(errc::schema_violation, "forest tree count does not match its header");
    }
    return f;
}

}  // namespace cookieaudit
