#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

namespace cookieaudit {

/// Lowercases, strips leading dots and a trailing dot.
std::string normalize_domain(std::string_view domain);

/// Syntactic host check on a normalized host: DNS labels or an IP literal.
bool is_valid_host(std::string_view host);
bool is_ip_literal(std::string_view host);

/// Host component of an absolute URL, normalized. Throws unparsable_url.
std::string url_host(std::string_view url);

/// Public suffix list with the standard wildcard and exception rules.
class PublicSuffixList {
public:
    /// The bundled snapshot (ICANN section only).
    static const PublicSuffixList& bundled();

    static PublicSuffixList parse(std::string_view text, bool include_private = false);

    /// Longest matching public suffix; the default rule "*" applies when
    /// nothing matches. Empty for an empty host.
    std::string public_suffix(std::string_view host) const;

    /// Public suffix plus one label; nullopt when the host is itself a
    /// public suffix. IP literals are their own registered domain.
    std::optional<std::string> registered_domain(std::string_view host) const;

    std::size_t rule_count() const noexcept { return rules_.size() + wildcards_.size() + exceptions_.size(); }

private:
    std::unordered_set<std::string> rules_;
    std::unordered_set<std::string> wildcards_;   // stored without the "*."
    std::unordered_set<std::string> exceptions_;  // stored without the "!"
};

}  // namespace cookieaudit
