#include "cookieaudit/html.hpp"

#include "cookieaudit/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>

namespace cookieaudit::html {

namespace {

constexpr std::array<std::string_view, 14> kVoid{"area", "base", "br",   "col",  "embed",  "hr",    "img",
                                                 "input", "link", "meta", "param", "source", "track", "wbr"};
// Raw text: content is not parsed as markup.
constexpr std::array<std::string_view, 5> kRawText{"script", "style", "textarea", "title", "xmp"};
// Opening one of these closes an open element of the same tag on top of the stack.
constexpr std::array<std::string_view, 8> kSelfNesting{"p", "li", "option", "tr", "td", "th", "dt", "dd"};

template <std::size_t N>
bool in(const std::array<std::string_view, N>& set, std::string_view tag) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) { stack_.push_back(&doc_.root); }

    Document run() {
        doc_.root.tag = "#document";
        while (pos_ < src_.size()) {
            if (src_[pos_] == '<') {
                markup();
            } else {
                auto next = src_.find('<', pos_);
                if (next == std::string_view::npos) next = src_.size();
                add_text(src_.substr(pos_, next - pos_));
                pos_ = next;
            }
        }
        return std::move(doc_);
    }

private:
    std::string_view src_;
    std::size_t pos_{0};
    Document doc_;
    std::vector<Node*> stack_;

    [[noreturn]] void fail(const std::string& what) const {
        throw audit_error(errc::parse_failure, what, pos_);
    }

    Node* top() { return stack_.back(); }

    void add_text(std::string_view raw, bool decode = true) {
        if (raw.empty()) return;
        auto node = std::make_unique<Node>();
        node->type = Node::Type::Text;
        node->text = decode ? decode_entities(raw) : std::string(raw);
        node->parent = top();
        top()->children.push_back(std::move(node));
    }

    void markup() {
        auto rest = src_.substr(pos_);
        if (rest.starts_with("<!--")) {
            auto end = src_.find("-->", pos_ + 4);
            if (end == std::string_view::npos) fail("unterminated comment");
            pos_ = end + 3;
            return;
        }
        if (rest.starts_with("<!") || rest.starts_with("<?")) {
            auto end = src_.find('>', pos_);
            pos_ = end == std::string_view::npos ? src_.size() : end + 1;
            return;
        }
        if (rest.size() >= 2 && rest[1] == '/') {
            end_tag();
            return;
        }
        if (rest.size() >= 2 && std::isalpha(static_cast<unsigned char>(rest[1]))) {
            start_tag();
            return;
        }
        add_text("<", false);
        ++pos_;
    }

    std::string read_name() {
        std::size_t b = pos_;
        while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>' && src_[pos_] != '/' &&
               (pos_ == b || src_[pos_] != '=')) {
            ++pos_;
        }
        return lower(src_.substr(b, pos_ - b));
    }

    void skip_space() {
        while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
    }

    void end_tag() {
        pos_ += 2;
        std::string name = read_name();
        auto close = src_.find('>', pos_);
        if (close == std::string_view::npos) fail("input ends inside an end tag");
        pos_ = close + 1;
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (stack_[i]->tag == name) {
                stack_.resize(i);
                return;
            }
        }
    }

    void start_tag() {
        ++pos_;
        auto node = std::make_unique<Node>();
        node->tag = read_name();
        bool self_closing = false;
        for (;;) {
            skip_space();
            if (pos_ >= src_.size()) fail("input ends inside a start tag");
            if (src_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (src_[pos_] == '/') {
                ++pos_;
                if (pos_ < src_.size() && src_[pos_] == '>') {
                    self_closing = true;
                    ++pos_;
                    break;
                }
                continue;
            }
            std::string name = read_name();
            if (name.empty()) {
                ++pos_;
                continue;
            }
            skip_space();
            std::string value;
            if (pos_ < src_.size() && src_[pos_] == '=') {
                ++pos_;
                skip_space();
                if (pos_ >= src_.size()) fail("input ends inside a start tag");
                const char q = src_[pos_];
                if (q == '"' || q == '\'') {
                    auto end = src_.find(q, pos_ + 1);
                    if (end == std::string_view::npos) fail("input ends inside a quoted attribute value");
                    value = decode_entities(src_.substr(pos_ + 1, end - pos_ - 1));
                    pos_ = end + 1;
                } else {
                    std::size_t b = pos_;
                    while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>') ++pos_;
                    value = decode_entities(src_.substr(b, pos_ - b));
                }
            }
            node->attributes.emplace(std::move(name), std::move(value));  // first occurrence wins
        }

        if (in(kSelfNesting, node->tag) && top()->tag == node->tag) stack_.pop_back();
        Node* raw = node.get();
        node->parent = top();
        top()->children.push_back(std::move(node));
        if (self_closing || is_void_element(raw->tag)) return;
        if (in(kRawText, raw->tag)) {
            raw_text(raw);
            return;
        }
        stack_.push_back(raw);
    }

    void raw_text(Node* element) {
        const std::string closing = "</" + element->tag;
        std::size_t end = pos_;
        for (;;) {
            end = src_.find("</", end);
            if (end == std::string_view::npos) break;
            if (lower(src_.substr(end, closing.size())) == closing) break;
            end += 2;
        }
        if (end == std::string_view::npos) end = src_.size();
        stack_.push_back(element);
        add_text(src_.substr(pos_, end - pos_), element->tag == "textarea" || element->tag == "title");
        stack_.pop_back();
        pos_ = end;
        if (pos_ < src_.size()) {
            auto close = src_.find('>', pos_);
            pos_ = close == std::string_view::npos ? src_.size() : close + 1;
        }
    }
};

// Named references that show up in banner copy; the rest stay literal.
std::uint32_t named_codepoint(std::string_view name) {
    static const std::map<std::string_view, std::uint32_t> kNamed{
        {"Auml", 0xC4}, {"Ouml", 0xD6}, {"Uuml", 0xDC}, {"aacute", 0xE1}, {"acirc", 0xE2},
        {"agrave", 0xE0}, {"auml", 0xE4}, {"ccedil", 0xE7}, {"copy", 0xA9}, {"eacute", 0xE9},
        {"ecirc", 0xEA}, {"egrave", 0xE8}, {"euml", 0xEB}, {"euro", 0x20AC}, {"hellip", 0x2026},
        {"iacute", 0xED}, {"icirc", 0xEE}, {"laquo", 0xAB}, {"ldquo", 0x201C}, {"lsquo", 0x2018},
        {"mdash", 0x2014}, {"middot", 0xB7}, {"ndash", 0x2013}, {"ntilde", 0xF1}, {"oacute", 0xF3},
        {"ocirc", 0xF4}, {"ouml", 0xF6}, {"raquo", 0xBB}, {"rdquo", 0x201D}, {"reg", 0xAE},
        {"rsquo", 0x2019}, {"szlig", 0xDF}, {"trade", 0x2122}, {"uacute", 0xFA}, {"ucirc", 0xFB},
        {"ugrave", 0xF9}, {"uuml", 0xFC}};
    auto it = kNamed.find(name);
    return it == kNamed.end() ? 0 : it->second;
}

}  // namespace

bool Node::has_element_children() const {
    return std::any_of(children.begin(), children.end(), [](const auto& c) { return c->is_element(); });
}

const std::string* Node::attribute(std::string_view name) const {
    auto it = attributes.find(std::string(name));
    return it == attributes.end() ? nullptr : &it->second;
}

bool is_void_element(std::string_view tag) noexcept { return in(kVoid, tag); }

Document parse(std::string_view source) { return Parser(source).run(); }

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '&') {
            out.push_back(text[i]);
            continue;
        }
        auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back('&');
            continue;
        }
        auto ent = text.substr(i + 1, semi - i - 1);
        if (!ent.empty() && ent[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = ent.size() > 1;
            bool hex = ok && (ent[1] == 'x' || ent[1] == 'X');
            for (std::size_t k = hex ? 2 : 1; ok && k < ent.size(); ++k) {
                const auto c = static_cast<unsigned char>(ent[k]);
                if (hex && std::isxdigit(c)) cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(c) ? c - '0' : std::tolower(c) - 'a' + 10);
                else if (!hex && std::isdigit(c)) cp = cp * 10 + (c - '0');
                else ok = false;
                if (cp > 0x10FFFF) cp = 0x110000;
            }
            if (ok && ent.size() > (hex ? 2u : 1u)) {
                append_utf8(out, cp);
                i = semi;
                continue;
            }
        } else if (ent == "amp") { out += '&'; i = semi; continue; }
        else if (ent == "lt") { out += '<'; i = semi; continue; }
        else if (ent == "gt") { out += '>'; i = semi; continue; }
        else if (ent == "quot") { out += '"'; i = semi; continue; }
        else if (ent == "apos") { out += '\''; i = semi; continue; }
        else if (ent == "nbsp") { out += ' '; i = semi; continue; }
        else if (auto cp = named_codepoint(ent)) { append_utf8(out, cp); i = semi; continue; }
        out.push_back('&');
    }
    return out;
}

namespace {

void collect_text(const Node& n, std::string& out) {
    if (!n.is_element()) {
        out += n.text;
        out += ' ';
        return;
    }
    if (n.tag == "script" || n.tag == "style") return;
    for (const auto& c : n.children) collect_text(*c, out);
}

}  // namespace

std::string inner_text(const Node& node) {
    std::string raw;
    collect_text(node, raw);
    std::string out;
    bool space = false;
    for (char c : raw) {
        if (is_space(c)) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

std::string element_path(const Node& node) {
    std::vector<std::string> parts;
    for (const Node* n = &node; n && n->parent; n = n->parent) {
        std::size_t index = 0;
        for (const auto& sib : n->parent->children) {
            if (sib->is_element() && sib->tag == n->tag) ++index;
            if (sib.get() == n) break;
        }
        parts.push_back(n->tag + "[" + std::to_string(index) + "]");
    }
    std::string out;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += "/" + *it;
    return out;
}

}  // namespace cookieaudit::html
