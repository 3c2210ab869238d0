#pragma once

// Minimal namespace-aware XML tree over expat, plus a streaming writer.
// Internal to the WPS codec.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wpsenv::wps::xml {

struct Attribute {
  std::string ns;
  std::string local;
  std::string value;
};

struct Node {
  std::string ns;
  std::string local;
  std::vector<Attribute> attrs;
  std::vector<std::unique_ptr<Node>> children;
  std::string text;  // concatenation of this element's direct character data

  bool is(std::string_view ns_uri, std::string_view name) const { return ns == ns_uri && local == name; }

  /// First child named `name` in `ns_uri`; when `lenient` also matches the
  /// same local name without a namespace.
  const Node* child(std::string_view ns_uri, std::string_view name, bool lenient = true) const;
  std::vector<const Node*> children_named(std::string_view ns_uri, std::string_view name,
                                          bool lenient = true) const;
  const std::string* attr(std::string_view ns_uri, std::string_view name) const;

  /// Serialized child elements (used when complex payloads embed XML).
  std::string inner_xml() const;
};

/// Throws ProtocolError on malformed input.
std::unique_ptr<Node> parse(std::string_view text);

std::string escape_text(std::string_view s);
std::string escape_attr(std::string_view s);

class Writer {
 public:
  Writer();

  Writer& start(std::string_view qname);
  Writer& attr(std::string_view qname, std::string_view value);
  Writer& text(std::string_view value);
  Writer& end();
  /// start(qname).text(value).end()
  Writer& leaf(std::string_view qname, std::string_view value);
  Writer& raw(std::string_view fragment);

  std::string finish();

 private:
  void close_start_tag();

  struct Open {
    std::string qname;
    bool has_children = false;
    bool has_text = false;
  };
  std::string out_;
  std::vector<Open> stack_;
  bool start_tag_open_ = false;
};

}  // namespace wpsenv::wps::xml
