#include "hwfmine/xml.hpp"

#include "hwfmine/errors.hpp"

#include <expat.h>

namespace hwfmine::xml {

const std::string* Node::attribute(const std::string& key) const {
    auto it = attributes.find(key);
    return it == attributes.end() ? nullptr : &it->second;
}

const Node* Node::first_child(const std::string& child_name) const {
    for (const auto& child : children)
        if (child.name == child_name) return &child;
    return nullptr;
}

std::vector<const Node*> Node::children_named(const std::string& child_name) const {
    std::vector<const Node*> result;
    for (const auto& child : children)
        if (child.name == child_name) result.push_back(&child);
    return result;
}

namespace {

struct ParseState {
    Node root;
    std::vector<Node*> stack;
    XML_Parser parser = nullptr;
    bool seen_root = false;
};

void start_element(void* user, const XML_Char* name, const XML_Char** attrs) {
    auto* state = static_cast<ParseState*>(user);
    Node node;
    node.name = name;
    for (int i = 0; attrs[i]; i += 2)
        node.attributes.emplace(attrs[i], attrs[i + 1]);
    node.line = static_cast<std::size_t>(XML_GetCurrentLineNumber(state->parser));
    node.column = static_cast<std::size_t>(XML_GetCurrentColumnNumber(state->parser));

    if (state->stack.empty()) {
        state->root = std::move(node);
        state->seen_root = true;
        state->stack.push_back(&state->root);
    } else {
        Node* parent = state->stack.back();
        parent->children.push_back(std::move(node));
        state->stack.push_back(&parent->children.back());
    }
}

void end_element(void* user, const XML_Char*) {
    auto* state = static_cast<ParseState*>(user);
    if (!state->stack.empty()) state->stack.pop_back();
}

void character_data(void* user, const XML_Char* data, int len) {
    auto* state = static_cast<ParseState*>(user);
    if (!state->stack.empty())
        state->stack.back()->text.append(data, static_cast<std::size_t>(len));
}

} // namespace

Node parse(const std::string& content, const std::string& source_name) {
    XML_Parser parser = XML_ParserCreate(nullptr);
    if (!parser) throw error("failed to create XML parser");

    ParseState state;
    state.parser = parser;
    XML_SetUserData(parser, &state);
    XML_SetElementHandler(parser, start_element, end_element);
    XML_SetCharacterDataHandler(parser, character_data);

    const XML_Status status =
        XML_Parse(parser, content.data(), static_cast<int>(content.size()), /*isFinal=*/1);
    if (status == XML_STATUS_ERROR) {
        const auto line = static_cast<std::size_t>(XML_GetCurrentLineNumber(parser));
        const auto column = static_cast<std::size_t>(XML_GetCurrentColumnNumber(parser));
        std::string message = source_name;
        message += ": ";
        message += XML_ErrorString(XML_GetErrorCode(parser));
        XML_ParserFree(parser);
        throw parse_error(message, line, column);
    }
    XML_ParserFree(parser);

    if (!state.seen_root) throw parse_error(source_name + ": document has no root element");
    return std::move(state.root);
}

std::string escape(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace hwfmine::xml
