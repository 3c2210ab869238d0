#include "xml.hpp"

#include <expat.h>

#include <climits>

#include "wpsenv/error.hpp"

namespace wpsenv::wps::xml {

namespace {

constexpr char kSep = '\x01';

void split_name(const char* raw, std::string& ns, std::string& local) {
  std::string_view name(raw);
  auto pos = name.find(kSep);
  if (pos == std::string_view::npos) {
    ns.clear();
    local.assign(name);
  } else {
    ns.assign(name.substr(0, pos));
    local.assign(name.substr(pos + 1));
  }
}

struct Builder {
  std::unique_ptr<Node> root;
  std::vector<Node*> stack;
};

void on_start(void* user, const XML_Char* name, const XML_Char** atts) {
  auto* b = static_cast<Builder*>(user);
  auto node = std::make_unique<Node>();
  split_name(name, node->ns, node->local);
  for (int i = 0; atts[i] != nullptr; i += 2) {
    Attribute a;
    split_name(atts[i], a.ns, a.local);
    a.value = atts[i + 1];
    node->attrs.push_back(std::move(a));
  }
  Node* raw = node.get();
  if (b->stack.empty())
    b->root = std::move(node);
  else
    b->stack.back()->children.push_back(std::move(node));
  b->stack.push_back(raw);
}

void on_end(void* user, const XML_Char*) {
  auto* b = static_cast<Builder*>(user);
  if (!b->stack.empty()) b->stack.pop_back();
}

void on_text(void* user, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(user);
  if (!b->stack.empty()) b->stack.back()->text.append(s, static_cast<size_t>(len));
}

void write_node(const Node& n, std::string& out) {
  out += '<';
  out += n.local;
  if (!n.ns.empty()) {
    out += " xmlns=\"";
    out += escape_attr(n.ns);
    out += '"';
  }
  for (const auto& a : n.attrs) {
    if (!a.ns.empty()) continue;
    out += ' ';
    out += a.local;
    out += "=\"";
    out += escape_attr(a.value);
    out += '"';
  }
  out += '>';
  out += escape_text(n.text);
  for (const auto& c : n.children) write_node(*c, out);
  out += "</";
  out += n.local;
  out += '>';
}

bool name_matches(const Node& n, std::string_view ns_uri, std::string_view name, bool lenient) {
  return n.local == name && (n.ns == ns_uri || (lenient && n.ns.empty()));
}

}  // namespace

const Node* Node::child(std::string_view ns_uri, std::string_view name, bool lenient) const {
  for (const auto& c : children)
    if (name_matches(*c, ns_uri, name, lenient)) return c.get();
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view ns_uri, std::string_view name, bool lenient) const {
  std::vector<const Node*> out;
  for (const auto& c : children)
    if (name_matches(*c, ns_uri, name, lenient)) out.push_back(c.get());
  return out;
}

const std::string* Node::attr(std::string_view ns_uri, std::string_view name) const {
  for (const auto& a : attrs)
    if (a.ns == ns_uri && a.local == name) return &a.value;
  return nullptr;
}

std::string Node::inner_xml() const {
  std::string out;
  for (const auto& c : children) write_node(*c, out);
  return out;
}

std::unique_ptr<Node> parse(std::string_view text) {
  if (text.size() > static_cast<size_t>(INT_MAX)) throw ProtocolError("document too large");
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreateNS("UTF-8", kSep),
                                                                       &XML_ParserFree);
  if (!parser) throw ProtocolError("cannot allocate XML parser");
  Builder b;
  XML_SetUserData(parser.get(), &b);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) == XML_STATUS_ERROR) {
    throw ProtocolError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())) +
                        " at line " + std::to_string(XML_GetCurrentLineNumber(parser.get())));
  }
  if (!b.root) throw ProtocolError("malformed XML: no root element");
  return std::move(b.root);
}

namespace {

// Characters XML 1.0 cannot carry at all are dropped.
bool representable(unsigned char c) { return c >= 0x20 || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default:
        if (representable(c)) out += ch;
    }
  }
  return out;
}

std::string escape_attr(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default:
        if (representable(c)) out += ch;
    }
  }
  return out;
}

Writer::Writer() { out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

void Writer::close_start_tag() {
  if (start_tag_open_) {
    out_ += '>';
    start_tag_open_ = false;
  }
}

Writer& Writer::start(std::string_view qname) {
  close_start_tag();
  if (!stack_.empty()) {
    stack_.back().has_children = true;
    if (!stack_.back().has_text) {
      out_ += '\n';
      out_.append(stack_.size() * 2, ' ');
    }
  }
  out_ += '<';
  out_ += qname;
  stack_.push_back({std::string(qname)});
  start_tag_open_ = true;
  return *this;
}

Writer& Writer::attr(std::string_view qname, std::string_view value) {
  out_ += ' ';
  out_ += qname;
  out_ += "=\"";
  out_ += escape_attr(value);
  out_ += '"';
  return *this;
}

Writer& Writer::text(std::string_view value) {
  close_start_tag();
  if (!stack_.empty()) stack_.back().has_text = true;
  out_ += escape_text(value);
  return *this;
}

Writer& Writer::raw(std::string_view fragment) {
  close_start_tag();
  if (!stack_.empty()) stack_.back().has_text = true;
  out_ += fragment;
  return *this;
}

Writer& Writer::end() {
  Open top = std::move(stack_.back());
  stack_.pop_back();
  if (start_tag_open_) {
    out_ += "/>";
    start_tag_open_ = false;
    return *this;
  }
  if (top.has_children && !top.has_text) {
    out_ += '\n';
    out_.append(stack_.size() * 2, ' ');
  }
  out_ += "</";
  out_ += top.qname;
  out_ += '>';
  return *this;
}

Writer& Writer::leaf(std::string_view qname, std::string_view value) {
  start(qname);
  if (value.empty()) {
    // keep an explicit empty element so the decoder sees "" rather than absence
    close_start_tag();
    stack_.back().has_text = true;
  } else {
    text(value);
  }
  return end();
}

std::string Writer::finish() {
  while (!stack_.empty()) end();
  out_ += '\n';
  return std::move(out_);
}

}  // namespace wpsenv::wps::xml
