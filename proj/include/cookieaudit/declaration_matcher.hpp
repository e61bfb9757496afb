#pragma once

#include "cookieaudit/trace_model.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit {

/// Declared cookie name with CMP-library wildcards. Every `x` or `#` matches
/// exactly one character, except a pattern-final `#`, which matches any
/// non-empty alphanumeric string. All other characters match literally and
/// case-sensitively.
class NamePattern {
public:
    explicit NamePattern(std::string raw);

    const std::string& raw() const noexcept { return raw_; }
    bool has_wildcards() const noexcept { return has_wildcards_; }
    bool matches(std::string_view name) const noexcept;

private:
    std::string raw_;
    bool trailing_run_{false};
    bool has_wildcards_{false};
};

bool match_name(const NamePattern& pattern, std::string_view name) noexcept;

/// Both arguments normalized. True iff equal or `cookie_domain` ends with
/// "." + `declared`.
bool match_domain(std::string_view declared, std::string_view cookie_domain) noexcept;

/// Host rule used for declarations: match_domain, plus dot-less hosts
/// ("facebook") matching any cookie whose registered domain's first label
/// equals them.
bool match_declared_host(std::string_view declared, std::string_view cookie_domain);

/// True iff the page host equals the consent cookie's domain or is a
/// subdomain of it. Throws unparsable_url.
bool in_scope(std::string_view consent_cookie_domain, std::string_view page_url);

/// Categories (and declaration indices) matched by each observed cookie key.
/// Keys with no match are present with an empty set (undeclared candidates).
struct DeclarationMap {
    std::map<CookieKey, std::set<std::string>> categories;
    std::map<CookieKey, std::vector<std::size_t>> declarations;

    bool undeclared(const CookieKey& key) const;
};

DeclarationMap map_declarations(const CrawlTrace& trace);
DeclarationMap map_declarations(const std::vector<CmpDeclaration>& declarations,
                                const std::vector<CookieKey>& cookies);

}  // namespace cookieaudit
