#include "cookieaudit/entropy.hpp"

#include "cookieaudit/embedded_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace cookieaudit {

namespace {

constexpr double kMinSubmatchLog2 = 5.643856189774724;  // log2(50)
constexpr std::size_t kMaxRepeatPeriod = 32;
constexpr int kReferenceYear = 2017;
constexpr int kMinYearSpace = 20;

bool is_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

double log2_binomial(int n, int k) {
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::log(2.0);
}

double log2_uppercase_variations(std::string_view word) {
    int up = 0, low = 0;
    for (unsigned char c : word) {
        if (is_upper(c)) ++up;
        else if (is_lower(c)) ++low;
    }
    if (up == 0) return 0;
    if (low == 0) return 1;
    const bool first_only = is_upper(static_cast<unsigned char>(word.front())) && up == 1;
    const bool last_only = is_upper(static_cast<unsigned char>(word.back())) && up == 1;
    if (first_only || last_only) return 1;
    double sum = 0;
    for (int i = 1; i <= std::min(up, low); ++i) sum += std::exp2(log2_binomial(up + low, i));
    return std::log2(sum);
}

void dictionary_matches(std::string_view v, const FrequencyDictionary& dict, std::vector<PatternMatch>& out) {
    const std::size_t max_len = dict.max_word_length();
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t len = 3; len <= max_len && i + len <= v.size(); ++len) {
            auto token = v.substr(i, len);
            std::string low = lower(token);
            double best = std::numeric_limits<double>::infinity();
            if (auto r = dict.rank(low)) best = std::log2(static_cast<double>(r));
            std::string rev(low.rbegin(), low.rend());
            if (rev != low) {
                if (auto r = dict.rank(rev)) best = std::min(best, std::log2(static_cast<double>(r)) + 1.0);
            }
            if (!std::isfinite(best)) continue;
            double g = std::max(best + log2_uppercase_variations(token), kMinSubmatchLog2);
            out.push_back({PatternKind::Dictionary, i, i + len, g});
        }
    }
}

void sequence_matches(std::string_view v, std::vector<PatternMatch>& out) {
    if (v.size() < 3) return;
    auto emit = [&](std::size_t b, std::size_t e, int delta) {
        if (e - b < 3 || delta == 0 || std::abs(delta) > 5) return;
        const unsigned char first = static_cast<unsigned char>(v[b]);
        double base;
        if (std::string_view("aAzZ019").find(static_cast<char>(first)) != std::string_view::npos) base = 4;
        else if (is_digit(first)) base = 10;
        else base = 26;
        double g = std::log2(base) + std::log2(static_cast<double>(e - b)) + (delta < 0 ? 1.0 : 0.0);
        out.push_back({PatternKind::Sequence, b, e, std::max(g, kMinSubmatchLog2)});
    };
    std::size_t start = 0;
    int delta = static_cast<unsigned char>(v[1]) - static_cast<unsigned char>(v[0]);
    for (std::size_t i = 2; i < v.size(); ++i) {
        int d = static_cast<unsigned char>(v[i]) - static_cast<unsigned char>(v[i - 1]);
        if (d != delta) {
            emit(start, i, delta);
            start = i - 1;
            delta = d;
        }
    }
    emit(start, v.size(), delta);
}

void repeat_matches(std::string_view v, const FrequencyDictionary& dict, std::vector<PatternMatch>& out) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 1; p <= kMaxRepeatPeriod && i + 2 * p <= n; ++p) {
            // a run already starting one character earlier dominates this one
            if (i > 0 && v[i - 1] == v[i - 1 + p]) continue;
            std::size_t k = 1;
            while (i + (k + 1) * p <= n && v.compare(i + k * p, p, v, i, p) == 0) ++k;
            if (k < 2) continue;
            double unit = entropy_estimate(v.substr(i, p), std::numeric_limits<double>::infinity(), dict).bits;
            double g = unit + std::log2(static_cast<double>(k));
            out.push_back({PatternKind::Repeat, i, i + k * p, std::max(g, kMinSubmatchLog2)});
        }
    }
}

int expand_year(int y) {
    if (y > 99) return y;
    return y > 50 ? 1900 + y : 2000 + y;
}

bool valid_year(int y, int digits) {
    return digits <= 2 || (y >= 1000 && y <= 2050);
}

// Returns the year of a plausible (day, month, year) reading, or -1.
int date_year(int a, int a_digits, int b, int c, int c_digits) {
    auto dm_ok = [](int x, int y) {
        return (x >= 1 && x <= 31 && y >= 1 && y <= 12) || (y >= 1 && y <= 31 && x >= 1 && x <= 12);
    };
    if (valid_year(c, c_digits) && dm_ok(a, b) && a_digits <= 2) return expand_year(c);
    if (valid_year(a, a_digits) && dm_ok(b, c) && c_digits <= 2) return expand_year(a);
    return -1;
}

double date_log2(int year, bool separator) {
    double space = std::max(std::abs(year - kReferenceYear), kMinYearSpace);
    double g = std::log2(space * 365.0) + (separator ? 2.0 : 0.0);
    return std::max(g, kMinSubmatchLog2);
}

void date_matches(std::string_view v, std::vector<PatternMatch>& out) {
    const std::size_t n = v.size();
    static constexpr std::size_t kSplits[9][2][2] = {
        {}, {}, {}, {},
        {{1, 2}, {2, 3}},
        {{1, 3}, {2, 3}},
        {{1, 2}, {2, 4}},
        {{1, 3}, {2, 3}},
        {{2, 4}, {4, 6}},
    };
    auto to_int = [&](std::size_t b, std::size_t e) {
        int x = 0;
        for (std::size_t i = b; i < e; ++i) x = x * 10 + (v[i] - '0');
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        // digit-only forms
        for (std::size_t len = 4; len <= 8 && i + len <= n; ++len) {
            if (!std::all_of(v.begin() + i, v.begin() + i + len, [](char c) { return is_digit(c); })) break;
            int best_year = -1;
            std::vector<std::pair<std::size_t, std::size_t>> splits{{kSplits[len][0][0], kSplits[len][0][1]},
                                                                    {kSplits[len][1][0], kSplits[len][1][1]}};
            if (len == 6) splits.push_back({4, 5});
            if (len == 7) {
                splits.push_back({4, 5});
                splits.push_back({4, 6});
            }
            for (auto [k, l] : splits) {
                int y = date_year(to_int(i, i + k), static_cast<int>(k), to_int(i + k, i + l), to_int(i + l, i + len),
                                  static_cast<int>(len - l));
                if (y < 0) continue;
                if (best_year < 0 || std::abs(y - kReferenceYear) < std::abs(best_year - kReferenceYear)) best_year = y;
            }
            if (best_year >= 0) out.push_back({PatternKind::Date, i, i + len, date_log2(best_year, false)});
        }
        // separated forms: d{1,4} s d{1,2} s d{1,4}
        std::size_t a_end = i;
        while (a_end < n && a_end - i < 4 && is_digit(v[a_end])) ++a_end;
        if (a_end == i || a_end >= n || (a_end < n && is_digit(v[a_end]))) continue;
        const char sep = v[a_end];
        if (std::string_view(" /\\_.-").find(sep) == std::string_view::npos) continue;
        std::size_t b_beg = a_end + 1, b_end = b_beg;
        while (b_end < n && b_end - b_beg < 2 && is_digit(v[b_end])) ++b_end;
        if (b_end == b_beg || b_end >= n || v[b_end] != sep) continue;
        std::size_t c_beg = b_end + 1, c_end = c_beg;
        while (c_end < n && c_end - c_beg < 4 && is_digit(v[c_end])) ++c_end;
        if (c_end == c_beg || (c_end < n && is_digit(v[c_end]))) continue;
        int y = date_year(to_int(i, a_end), static_cast<int>(a_end - i), to_int(b_beg, b_end), to_int(c_beg, c_end),
                          static_cast<int>(c_end - c_beg));
        if (y >= 0) out.push_back({PatternKind::Date, i, c_end, date_log2(y, true)});
    }
}

}  // namespace

void FrequencyDictionary::add_ranked_list(std::string_view text) {
    std::size_t rank = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        if (line.empty()) continue;
        ++rank;
        std::string w = lower(line);
        max_len_ = std::max(max_len_, w.size());
        auto [it, inserted] = ranks_.emplace(std::move(w), rank);
        if (!inserted) it->second = std::min(it->second, rank);
    }
}

std::size_t FrequencyDictionary::rank(std::string_view word) const {
    auto it = ranks_.find(std::string(word));
    return it == ranks_.end() ? 0 : it->second;
}

const FrequencyDictionary& FrequencyDictionary::bundled() {
    static const FrequencyDictionary dict = [] {
        FrequencyDictionary d;
        d.add_ranked_list(embedded::dict_english());
        d.add_ranked_list(embedded::dict_passwords());
        d.add_ranked_list(embedded::dict_tv_film());
        return d;
    }();
    return dict;
}

std::string_view to_string(PatternKind k) noexcept {
    switch (k) {
        case PatternKind::Bruteforce: return "bruteforce";
        case PatternKind::Dictionary: return "dictionary";
        case PatternKind::Sequence: return "sequence";
        case PatternKind::Repeat: return "repeat";
        case PatternKind::Date: return "date";
    }
    return "bruteforce";
}

std::size_t bruteforce_cardinality(std::string_view value) {
    bool lo = false, up = false, dg = false, sym = false, other = false;
    for (unsigned char c : value) {
        if (is_lower(c)) lo = true;
        else if (is_upper(c)) up = true;
        else if (is_digit(c)) dg = true;
        else if (c >= 0x20 && c < 0x7f) sym = true;
        else other = true;
    }
    return (lo ? 26 : 0) + (up ? 26 : 0) + (dg ? 10 : 0) + (sym ? 33 : 0) + (other ? 100 : 0);
}

std::vector<PatternMatch> find_patterns(std::string_view value, const FrequencyDictionary& dict) {
    std::vector<PatternMatch> out;
    dictionary_matches(value, dict, out);
    sequence_matches(value, out);
    repeat_matches(value, dict, out);
    date_matches(value, out);
    return out;
}

EntropyEstimate entropy_estimate(std::string_view value, double threshold) {
    return entropy_estimate(value, threshold, FrequencyDictionary::bundled());
}

EntropyEstimate entropy_estimate(std::string_view value, double threshold, const FrequencyDictionary& dict) {
    EntropyEstimate est;
    const std::size_t n = value.size();
    if (n == 0) return est;

    auto matches = find_patterns(value, dict);
    std::vector<std::vector<const PatternMatch*>> ending(n + 1);
    for (const auto& m : matches) ending[m.end].push_back(&m);

    const double char_bits = std::log2(static_cast<double>(bruteforce_cardinality(value)));
    std::vector<double> best(n + 1, std::numeric_limits<double>::infinity());
    std::vector<const PatternMatch*> via(n + 1, nullptr);
    best[0] = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        best[i] = best[i - 1] + char_bits;
        for (const auto* m : ending[i]) {
            double c = best[m->begin] + m->log2_guesses;
            if (c < best[i]) {
                best[i] = c;
                via[i] = m;
            }
        }
    }
    est.bits = best[n];
    est.high_entropy = est.bits >= threshold;
    for (std::size_t i = n; i > 0;) {
        if (via[i]) {
            est.sequence.push_back(*via[i]);
            i = via[i]->begin;
        } else {
            est.sequence.push_back({PatternKind::Bruteforce, i - 1, i, char_bits});
            --i;
        }
    }
    std::reverse(est.sequence.begin(), est.sequence.end());
    return est;
}

}  // namespace cookieaudit
