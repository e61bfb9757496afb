#include "cookieaudit/domain.hpp"

#include "cookieaudit/embedded_data.hpp"
#include "cookieaudit/error.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace cookieaudit {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::vector<std::string_view> split_labels(std::string_view host) {
    std::vector<std::string_view> labels;
    std::size_t start = 0;
    while (true) {
        auto dot = host.find('.', start);
        labels.push_back(host.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return labels;
}

std::string join_from(const std::vector<std::string_view>& labels, std::size_t from) {
    std::string out;
    for (std::size_t i = from; i < labels.size(); ++i) {
        if (!out.empty()) out += '.';
        out += labels[i];
    }
    return out;
}

bool is_ipv4(std::string_view host) {
    auto labels = split_labels(host);
    if (labels.size() != 4) return false;
    for (auto l : labels) {
        if (l.empty() || l.size() > 3) return false;
        if (!std::all_of(l.begin(), l.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
        if (std::stoi(std::string(l)) > 255) return false;
    }
    return true;
}

bool is_ipv6(std::string_view host) {
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    if (host.find(':') == std::string_view::npos || host.size() > 45) return false;
    return std::all_of(host.begin(), host.end(),
                       [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) || c == ':' || c == '.'; });
}

}  // namespace

std::string normalize_domain(std::string_view domain) {
    std::size_t b = domain.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    std::size_t e = domain.find_last_not_of(" \t");
    domain = domain.substr(b, e - b + 1);
    while (!domain.empty() && domain.front() == '.') domain.remove_prefix(1);
    if (!domain.empty() && domain.back() == '.') domain.remove_suffix(1);
    std::string out(domain);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

bool is_ip_literal(std::string_view host) { return is_ipv4(host) || is_ipv6(host); }

bool is_valid_host(std::string_view host) {
    if (host.empty() || host.size() > 253) return false;
    if (is_ip_literal(host)) return true;
    for (auto label : split_labels(host)) {
        if (label.empty() || label.size() > 63) return false;
        if (label.front() == '-' || label.back() == '-') return false;
        for (char c : label) {
            bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
            if (!ok) return false;
        }
    }
    return true;
}

std::string url_host(std::string_view url) {
    auto fail = [&](std::string_view why) -> std::string {
        throw audit_error(errc::unparsable_url, std::string(why) + ": '" + std::string(url) + "'");
    };
    auto sep = url.find("://");
    if (sep == std::string_view::npos || sep == 0) return fail("missing scheme");
    for (std::size_t i = 0; i < sep; ++i) {
        char c = url[i];
        bool ok = std::isalpha(static_cast<unsigned char>(c)) ||
                  (i > 0 && (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.'));
        if (!ok) return fail("bad scheme");
    }
    std::string_view rest = url.substr(sep + 3);
    std::string_view authority = rest.substr(0, rest.find_first_of("/?#"));
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);

    std::string_view host;
    std::string_view port;
    if (!authority.empty() && authority.front() == '[') {
        auto close = authority.find(']');
        if (close == std::string_view::npos) return fail("unterminated IPv6 literal");
        host = authority.substr(0, close + 1);
        std::string_view tail = authority.substr(close + 1);
        if (!tail.empty()) {
            if (tail.front() != ':') return fail("junk after host");
            port = tail.substr(1);
        }
    } else {
        auto colon = authority.find(':');
        host = authority.substr(0, colon);
        if (colon != std::string_view::npos) port = authority.substr(colon + 1);
    }
    if (!std::all_of(port.begin(), port.end(), [](char c) { return c >= '0' && c <= '9'; })) return fail("bad port");
    std::string normalized = normalize_domain(host);
    if (!is_valid_host(normalized)) return fail("invalid host");
    return normalized;
}

const PublicSuffixList& PublicSuffixList::bundled() {
    static const PublicSuffixList list = parse(embedded::public_suffix_list());
    return list;
}

PublicSuffixList PublicSuffixList::parse(std::string_view text, bool include_private) {
    PublicSuffixList psl;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.rfind("//", 0) == 0) {
            if (!include_private && line.find("===BEGIN PRIVATE DOMAINS===") != std::string_view::npos) break;
            continue;
        }
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) continue;
        line = line.substr(b);
        line = line.substr(0, line.find_first_of(" \t\r"));
        std::string rule = normalize_domain(line);
        if (rule.rfind("!", 0) == 0) {
            psl.exceptions_.insert(rule.substr(1));
        } else if (rule.rfind("*.", 0) == 0) {
            psl.wildcards_.insert(rule.substr(2));
        } else if (!rule.empty()) {
            psl.rules_.insert(rule);
        }
    }
    return psl;
}

std::string PublicSuffixList::public_suffix(std::string_view host) const {
    if (host.empty()) return {};
    auto labels = split_labels(host);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::string candidate = join_from(labels, i);
        if (exceptions_.contains(candidate)) return join_from(labels, i + 1);
        if (rules_.contains(candidate)) return candidate;
        if (i + 1 < labels.size() && wildcards_.contains(join_from(labels, i + 1))) return candidate;
    }
    return std::string(labels.back());
}

std::optional<std::string> PublicSuffixList::registered_domain(std::string_view host) const {
    if (host.empty()) return std::nullopt;
    if (is_ip_literal(host)) return std::string(host);
    std::string suffix = public_suffix(host);
    if (suffix.size() >= host.size()) return std::nullopt;
    // host = "<...>.<label>.<suffix>"
    std::string_view head = host.substr(0, host.size() - suffix.size() - 1);
    auto dot = head.rfind('.');
    std::string_view label = dot == std::string_view::npos ? head : head.substr(dot + 1);
    if (label.empty()) return std::nullopt;
    return std::string(label) + "." + suffix;
}

}  // namespace cookieaudit
