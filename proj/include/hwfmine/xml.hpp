#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace hwfmine::xml {

/// One parsed XML element. Character data of the element itself (not of its
/// children) is accumulated in `text`.
struct Node {
    std::string name;
    std::map<std::string, std::string> attributes;
    std::vector<Node> children;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;

    const std::string* attribute(const std::string& key) const;
    const Node* first_child(const std::string& child_name) const;
    std::vector<const Node*> children_named(const std::string& child_name) const;
};

/// Parses a whole document and returns its root element.
/// Throws parse_error with line/column on malformed input.
Node parse(const std::string& content, const std::string& source_name = "<input>");

/// Escapes &, <, >, " and ' for use in attribute values and text.
std::string escape(const std::string& raw);

} // namespace hwfmine::xml
