#include "cookieaudit/declaration_matcher.hpp"

#include "cookieaudit/domain.hpp"

#include <cctype>

namespace cookieaudit {

namespace {

bool is_wildcard(char c) { return c == 'x' || c == '#'; }

}  // namespace

NamePattern::NamePattern(std::string raw) : raw_(std::move(raw)) {
    trailing_run_ = !raw_.empty() && raw_.back() == '#';
    for (char c : raw_) has_wildcards_ = has_wildcards_ || is_wildcard(c);
}

bool NamePattern::matches(std::string_view name) const noexcept {
    if (name.empty() || raw_.empty()) return false;
    const std::size_t fixed = trailing_run_ ? raw_.size() - 1 : raw_.size();
    if (trailing_run_) {
        if (name.size() <= fixed) return false;
    } else if (name.size() != fixed) {
        return false;
    }
    for (std::size_t i = 0; i < fixed; ++i) {
        if (!is_wildcard(raw_[i]) && raw_[i] != name[i]) return false;
    }
    for (std::size_t i = fixed; i < name.size(); ++i) {
        if (!std::isalnum(static_cast<unsigned char>(name[i]))) return false;
    }
    return true;
}

bool match_name(const NamePattern& pattern, std::string_view name) noexcept { return pattern.matches(name); }

bool match_domain(std::string_view declared, std::string_view cookie_domain) noexcept {
    if (declared.empty() || cookie_domain.empty()) return false;
    if (declared == cookie_domain) return true;
    return cookie_domain.size() > declared.size() && cookie_domain.ends_with(declared) &&
           cookie_domain[cookie_domain.size() - declared.size() - 1] == '.';
}

bool match_declared_host(std::string_view declared, std::string_view cookie_domain) {
    if (match_domain(declared, cookie_domain)) return true;
    if (declared.empty() || declared.find('.') != std::string_view::npos) return false;
    auto registered = PublicSuffixList::bundled().registered_domain(cookie_domain);
    if (!registered) return false;
    return std::string_view(*registered).substr(0, registered->find('.')) == declared;
}

bool in_scope(std::string_view consent_cookie_domain, std::string_view page_url) {
    return match_domain(consent_cookie_domain, url_host(page_url));
}

bool DeclarationMap::undeclared(const CookieKey& key) const {
    auto it = categories.find(key);
    return it == categories.end() || it->second.empty();
}

DeclarationMap map_declarations(const std::vector<CmpDeclaration>& declarations,
                                const std::vector<CookieKey>& cookies) {
    std::vector<NamePattern> patterns;
    patterns.reserve(declarations.size());
    for (const auto& d : declarations) patterns.emplace_back(d.name_pattern);

    DeclarationMap out;
    for (const auto& key : cookies) {
        auto& cats = out.categories[key];
        auto& idx = out.declarations[key];
        for (std::size_t i = 0; i < declarations.size(); ++i) {
            if (patterns[i].matches(key.name) && match_declared_host(declarations[i].host, key.domain)) {
                cats.insert(declarations[i].category_id);
                idx.push_back(i);
            }
        }
    }
    return out;
}

DeclarationMap map_declarations(const CrawlTrace& trace) {
    std::vector<CookieKey> keys;
    for (const auto& req : trace.requests) {
        for (const auto& c : req.attached_cookies) keys.push_back(c.key());
    }
    return map_declarations(trace.declarations, keys);
}

}  // namespace cookieaudit
