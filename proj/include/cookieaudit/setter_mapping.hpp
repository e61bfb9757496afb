#pragma once

#include "cookieaudit/trace_model.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

/// How the crawler drives one CMP banner layout: CSS selectors for the
/// controls it clicks. Stored as "setter" records.
struct ConsentSetterMapping {
    std::string cmp_id;  // e.g. "onetrust", "cookiebot", or a layout name
    std::string open_menu;
    std::map<std::string, std::string> category_toggles;  // category id -> selector
    std::string reject_all;                                // may be empty when toggles are used
    std::string confirm;

    bool operator==(const ConsentSetterMapping&) const = default;
};

/// Throws schema_violation for missing fields, invariant_violation for a
/// mapping that can neither reject all nor toggle a category, or a duplicate
/// cmp_id.
std::vector<ConsentSetterMapping> parse_setter_mappings(std::string_view document);
nlohmann::ordered_json setter_record(const ConsentSetterMapping& m);
std::string serialize_setter_mappings(const std::vector<ConsentSetterMapping>& mappings);

}  // namespace cookieaudit
