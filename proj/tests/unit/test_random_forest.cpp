#include "cookieaudit/error.hpp"
#include "cookieaudit/random_forest.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cookieaudit;

namespace {

void toy(std::vector<std::vector<double>>& x, std::vector<bool>& y, std::uint64_t seed, int n = 80) {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        double a = static_cast<double>(bounded_random(rng, 1000)) / 100.0;
        double b = static_cast<double>(bounded_random(rng, 1000)) / 100.0;
        x.push_back({a, b});
        y.push_back(a + 0.5 * b > 7.0);
    }
}

}  // namespace

TEST(RandomForest, SeparableToyFitsTrainingSet) {
    std::vector<std::vector<double>> x;
    std::vector<bool> y;
    toy(x, y, 1);
    auto f = RandomForest::train(x, y, {.trees = 25, .seed = 3, .max_features = 0, .bootstrap = false});
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(f.predict_proba(x[i]) > 0.5, y[i]) << i;
}

TEST(RandomForest, DeterministicGivenSeed) {
    std::vector<std::vector<double>> x;
    std::vector<bool> y;
    toy(x, y, 2);
    ForestParams p{.trees = 15, .seed = 99};
    auto a = RandomForest::train(x, y, p);
    auto b = RandomForest::train(x, y, p);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
    p.seed = 100;
    EXPECT_NE(RandomForest::train(x, y, p).to_json().dump(), a.to_json().dump());
}

TEST(RandomForest, JsonRoundTrip) {
    std::vector<std::vector<double>> x;
    std::vector<bool> y;
    toy(x, y, 3, 40);
    auto f = RandomForest::train(x, y, {.trees = 7, .seed = 5});
    auto g = RandomForest::from_json(nlohmann::json::parse(f.to_json().dump()));
    EXPECT_EQ(f, g);
    for (const auto& row : x) EXPECT_DOUBLE_EQ(f.predict_proba(row), g.predict_proba(row));
    EXPECT_THROW(RandomForest::from_json(nlohmann::json::object()), audit_error);
}

TEST(RandomForest, ProbabilitiesInUnitInterval) {
    std::vector<std::vector<double>> x;
    std::vector<bool> y;
    toy(x, y, 4);
    auto f = RandomForest::train(x, y, {.trees = 10, .seed = 1});
    EXPECT_EQ(f.tree_count(), 10u);
    EXPECT_EQ(f.n_features(), 2u);
    for (double a = -5; a < 15; a += 0.7)
        for (double b = -5; b < 15; b += 0.9) {
            double p = f.predict_proba(std::vector<double>{a, b});
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
        }
}

TEST(RandomForest, DegenerateInput) {
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const audit_error& e) {
            return e.code();
        }
        return errc::io_error;
    };
    EXPECT_EQ(code([] { RandomForest::train({{1}, {2}}, {true, true}, {}); }), errc::degenerate_data);
    EXPECT_EQ(code([] { RandomForest::train({}, {}, {}); }), errc::degenerate_data);
    EXPECT_EQ(code([] { RandomForest::train({{1, 2}, {3}}, {true, false}, {}); }), errc::invariant_violation);
}

TEST(BoundedRandom, StaysInRangeAndIsReproducible) {
    std::mt19937_64 a(7), b(7);
    for (int i = 0; i < 1000; ++i) {
        auto v = bounded_random(a, 13);
        EXPECT_LT(v, 13u);
        EXPECT_EQ(v, bounded_random(b, 13));
    }
}
