#pragma once

#include "cookieaudit/declaration_matcher.hpp"
#include "cookieaudit/trace_model.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

using CategoryChoices = std::map<std::string, ConsentChoice>;

// Cookiebot's fixed category ids.
inline constexpr std::string_view kCookiebotNecessary = "Necessary";
inline constexpr std::string_view kCookiebotPreferences = "Preferences";
inline constexpr std::string_view kCookiebotStatistics = "Statistics";
inline constexpr std::string_view kCookiebotMarketing = "Marketing";
inline constexpr std::string_view kCookiebotUnclassified = "Unclassified";

/// Decodes an OptanonConsent value (also used for CookiePro). Only the
/// "groups" field is interpreted; other fields are ignored.
/// Throws decode_error.
CategoryChoices decode_onetrust(std::string_view raw);

/// Decodes a CookieConsent value. Necessary and Unclassified are always
/// Consent. Throws decode_error naming the missing or malformed field.
CategoryChoices decode_cookiebot(std::string_view raw);

/// Dispatches on the snapshot's CMP; Cmp::Other yields an empty map.
CategoryChoices decode_snapshot(const ConsentStateSnapshot& snapshot);

/// Adds an entry for every declared category absent from `decoded`:
/// always-active categories default to Consent, rejectable ones to NotConsent.
CategoryChoices complete_choices(CategoryChoices decoded, const std::vector<CategoryDeclaration>& categories);

/// State expected once every rejectable category has been rejected.
CategoryChoices expected_after_reject_all(const std::vector<CategoryDeclaration>& categories);

struct RejectAllCheck {
    bool recorded{true};
    std::vector<std::string> mismatched_categories;
};

/// Compares completed choices with expected_after_reject_all.
RejectAllCheck verify_reject_all(const CategoryChoices& completed, const std::vector<CategoryDeclaration>& categories);

/// Approved (A_c) and rejected (R_c) cookie sets. Overlap is allowed.
struct ConsentSets {
    std::set<CookieKey> approved;
    std::set<CookieKey> rejected;
};

/// A cookie is approved iff one of its matched categories has Consent and
/// rejected iff one has NotConsent. Throws unknown_category.
ConsentSets build_consent_sets(const CategoryChoices& choices, const DeclarationMap& decl_map);

/// Percent-decoding; `plus_as_space` applies form encoding.
std::string url_decode(std::string_view in, bool plus_as_space = true);

}  // namespace cookieaudit
