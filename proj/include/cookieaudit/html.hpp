#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cookieaudit::html {

struct Node {
    enum class Type { Element, Text };

    Type type{Type::Element};
    std::string tag;                                // lowercase; empty for text
    std::map<std::string, std::string> attributes;  // names lowercase, values entity-decoded
    std::string text;                               // text nodes only
    std::vector<std::unique_ptr<Node>> children;
    Node* parent{nullptr};

    bool is_element() const noexcept { return type == Type::Element; }
    bool has_element_children() const;
    const std::string* attribute(std::string_view name) const;
};

struct Document {
    Node root;  // synthetic, tag "#document"

    Document() = default;
    // Top-level children point at `root`, so a move has to re-point them.
    Document(Document&& other) noexcept : root(std::move(other.root)) { adopt(); }
    Document& operator=(Document&& other) noexcept {
        root = std::move(other.root);
        adopt();
        return *this;
    }

private:
    void adopt() noexcept {
        for (auto& c : root.children) c->parent = &root;
    }
};

/// Error-tolerant parser in the spirit of browsers: unknown end tags are
/// dropped, unclosed elements are closed at EOF, a few elements close their
/// open siblings implicitly. Throws audit_error(parse_failure) only when the
/// input ends inside a start tag, a quoted attribute value or a comment.
Document parse(std::string_view source);

std::string decode_entities(std::string_view text);

/// Descendant text with whitespace collapsed, skipping script/style.
std::string inner_text(const Node& node);

/// "/html[1]/body[1]/div[2]": element path with 1-based per-tag indices.
std::string element_path(const Node& node);

bool is_void_element(std::string_view tag) noexcept;

}  // namespace cookieaudit::html
