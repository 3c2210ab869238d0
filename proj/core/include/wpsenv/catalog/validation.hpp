#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "wpsenv/catalog/descriptor.hpp"
#include "wpsenv/wps/types.hpp"

namespace wpsenv::store {
class Datastore;
}

namespace wpsenv::catalog {

struct Text {
  std::string value;
  bool operator==(const Text&) const = default;
};
struct Number {
  double value = 0;
  bool operator==(const Number&) const = default;
};
struct Flag {
  bool value = false;
  bool operator==(const Flag&) const = default;
};
struct Extent {
  double minx = 0, miny = 0, maxx = 0, maxy = 0;
  bool operator==(const Extent&) const = default;
};
/// Existing file in the caller's store (normalized user-relative path).
struct FilePath {
  std::string path;
  bool operator==(const FilePath&) const = default;
};
/// Destination in the caller's store; parents are created on write.
struct SavePath {
  std::string path;
  bool operator==(const SavePath&) const = default;
};
struct TableRef {
  std::string table;
  std::optional<std::string> attr;
  bool operator==(const TableRef&) const = default;
};
/// A value that already has its WPS form (e.g. an href handed in by a
/// scenario or a remote Execute request).
struct Marshaled {
  wps::InputValue value;
  bool operator==(const Marshaled&) const = default;
};

using ValidatedValue = std::variant<Text, Number, Flag, Extent, FilePath, SavePath, TableRef, Marshaled>;

/// Checks raw form text against a widget's rules. Throws ValidationError
/// naming the widget kind.
ValidatedValue validate_input(const WidgetDescriptor& widget, std::string_view raw, const std::string& user,
                              const store::Datastore& store);

/// "minx,miny,maxx,maxy" or WKT POLYGON((...)) whose envelope is taken.
Extent parse_extent(std::string_view raw);

bool is_identifier(std::string_view s);

}  // namespace wpsenv::catalog
