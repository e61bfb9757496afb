#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cookieaudit {

inline constexpr double kDefaultEntropyThreshold = 60.0;

/// Word -> frequency rank (1 = most common). Lookups are lowercase.
class FrequencyDictionary {
public:
    /// One word per line, most frequent first. Later duplicates are ignored.
    void add_ranked_list(std::string_view text);
    /// 0 when absent.
    std::size_t rank(std::string_view word) const;
    std::size_t size() const noexcept { return ranks_.size(); }
    std::size_t max_word_length() const noexcept { return max_len_; }

    /// English, common-password and TV/film lists merged (best rank wins).
    static const FrequencyDictionary& bundled();

private:
    std::unordered_map<std::string, std::size_t> ranks_;
    std::size_t max_len_{0};
};

enum class PatternKind { Bruteforce, Dictionary, Sequence, Repeat, Date };

std::string_view to_string(PatternKind k) noexcept;

struct PatternMatch {
    PatternKind kind{PatternKind::Bruteforce};
    std::size_t begin{0};
    std::size_t end{0};  // exclusive
    double log2_guesses{0};
};

/// Size of the union of character classes present: lowercase 26, uppercase
/// 26, digits 10, ASCII symbols 33, any other byte 100.
std::size_t bruteforce_cardinality(std::string_view value);

/// Candidate patterns (dictionary words of length >= 3, sequences, repeats,
/// dates) found anywhere in the value.
std::vector<PatternMatch> find_patterns(std::string_view value, const FrequencyDictionary& dict);

struct EntropyEstimate {
    double bits{0};
    bool high_entropy{false};
    /// Minimum-guess cover of the value; uncovered characters appear as
    /// single-character Bruteforce entries.
    std::vector<PatternMatch> sequence;
};

/// Minimum over covers of the value of the summed log2 guesses, where each
/// uncovered character costs log2(bruteforce_cardinality(value)).
EntropyEstimate entropy_estimate(std::string_view value, double threshold = kDefaultEntropyThreshold);
EntropyEstimate entropy_estimate(std::string_view value, double threshold, const FrequencyDictionary& dict);

}  // namespace cookieaudit
