#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cookieaudit {

struct ForestParams {
    int trees{100};
    std::uint64_t seed{0};
    int max_features{0};  // 0 = floor(sqrt(n_features))
    bool bootstrap{true};

    bool operator==(const ForestParams&) const = default;
};

/// Uniform integer in [0, n) by rejection; the same on every platform,
/// unlike std::uniform_int_distribution.
std::uint64_t bounded_random(std::mt19937_64& rng, std::uint64_t n);

/// Binary random forest: Gini impurity, bootstrap samples, a random feature
/// subset per split, trees grown until pure.
class RandomForest {
public:
    /// Throws degenerate_data for empty or single-class input and
    /// invariant_violation for ragged rows.
    static RandomForest train(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                              const ForestParams& params);

    /// Mean over trees of the leaf's positive fraction.
    double predict_proba(std::span<const double> x) const;

    const ForestParams& params() const noexcept { return params_; }
    std::size_t n_features() const noexcept { return n_features_; }
    std::size_t tree_count() const noexcept { return trees_.size(); }
    std::size_t node_count() const;

    nlohmann::ordered_json to_json() const;
    /// Throws schema_violation.
    static RandomForest from_json(const nlohmann::json& j);

    bool operator==(const RandomForest&) const = default;

private:
    struct Tree {
        std::vector<int> feature;  // -1 at leaves
        std::vector<double> threshold;
        std::vector<int> left;
        std::vector<int> right;
        std::vector<double> value;

        bool operator==(const Tree&) const = default;
    };

    ForestParams params_;
    std::size_t n_features_{0};
    std::vector<Tree> trees_;

    static Tree grow(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                     std::vector<std::size_t> sample, std::size_t max_features, std::mt19937_64& rng);
};

}  // namespace cookieaudit
