#include "cookieaudit/setter_mapping.hpp"

#include "cookieaudit/error.hpp"
#include "cookieaudit/record_io.hpp"

#include <set>
#include <sstream>

namespace cookieaudit {

std::vector<ConsentSetterMapping> parse_setter_mappings(std::string_view document) {
    std::vector<ConsentSetterMapping> out;
    std::set<std::string> ids;
    for (const auto& rec : read_records(document)) {
        if (rec.kind != "setter") {
            throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": unknown record kind '" + rec.kind + "'");
        }
        ConsentSetterMapping m;
        m.cmp_id = require_string(rec, "cmp");
        m.open_menu = require_string(rec, "open_menu");
        m.reject_all = optional_string(rec, "reject_all");
        m.confirm = require_string(rec, "confirm");
        if (rec.body.contains("category_toggles")) {
            const auto& t = rec.body.at("category_toggles");
            if (!t.is_object()) throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": 'category_toggles' must be an object");
            for (auto it = t.begin(); it != t.end(); ++it) {
                if (!it.value().is_string() || it.value().get<std::string>().empty()) {
                    throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": toggle for '" + it.key() + "' must be a non-empty selector");
                }
                m.category_toggles.emplace(it.key(), it.value().get<std::string>());
            }
        }
        if (m.cmp_id.empty() || m.open_menu.empty() || m.confirm.empty()) {
            throw audit_error(errc::schema_violation, "line " + std::to_string(rec.line) + ": empty selector or cmp id");
        }
        if (m.reject_all.empty() && m.category_toggles.empty()) {
            throw audit_error(errc::invariant_violation, "setter '" + m.cmp_id + "' has neither reject_all nor category toggles");
        }
        if (!ids.insert(m.cmp_id).second) {
            throw audit_error(errc::invariant_violation, "duplicate setter for '" + m.cmp_id + "'");
        }
        out.push_back(std::move(m));
    }
    return out;
}

nlohmann::ordered_json setter_record(const ConsentSetterMapping& m) {
    nlohmann::ordered_json j;
    j["kind"] = "setter";
    j["cmp"] = m.cmp_id;
    j["open_menu"] = m.open_menu;
    j["category_toggles"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.category_toggles) j["category_toggles"][k] = v;
    if (!m.reject_all.empty()) j["reject_all"] = m.reject_all;
    j["confirm"] = m.confirm;
    return j;
}

std::string serialize_setter_mappings(const std::vector<ConsentSetterMapping>& mappings) {
    std::ostringstream out;
    for (const auto& m : mappings) write_record(out, setter_record(m));
    return out.str();
}

}  // namespace cookieaudit
